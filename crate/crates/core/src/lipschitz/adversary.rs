use rand::Rng;

use super::{linf, mcshane_extend, McShane};
use crate::error::{Error, Result};
use crate::protocol::{Environment, Query, Transcript};

/// Feasible label interval at `x` given compatible anchors.
fn feasible(anchors: &[(Vec<f64>, f64)], l: f64, x: &[f64]) -> (f64, f64) {
    let mut lo: f64 = 0.0;
    let mut hi: f64 = 1.0;
    for (xs, ys) in anchors {
        let r = l * linf(x, xs);
        lo = lo.max(ys - r);
        hi = hi.min(ys + r);
    }
    // anchors are compatible, so any crossing is rounding noise
    if lo > hi {
        let m = (lo + hi) / 2.0;
        (m, m)
    } else {
        (lo, hi)
    }
}

/// The end of `[lo, hi]` farther from `y_hat`; ties go to `hi`.
fn far_end(lo: f64, hi: f64, y_hat: f64) -> f64 {
    if (y_hat - lo).abs() > (y_hat - hi).abs() {
        lo
    } else {
        hi
    }
}

/// Integer `m` with `m^d <= t < (m+1)^d`.
fn int_root(t: usize, d: usize) -> usize {
    let mut m = (t as f64).powf(1.0 / d as f64).round() as usize;
    let pow = |b: usize| (b as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    while m > 0 && pow(m) > t as u128 {
        m -= 1;
    }
    while pow(m + 1) <= t as u128 {
        m += 1;
    }
    m
}

/// Lexicographic digits of `idx` in base `n`, most significant first.
fn lattice_coords(mut idx: usize, n: usize, d: usize) -> Vec<usize> {
    let mut c = vec![0; d];
    for slot in c.iter_mut().rev() {
        *slot = idx % n;
        idx /= n;
    }
    c
}

/// A fresh query where the learner's miss fell short of `2^{-j-3}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Shortfall {
    pub round: usize,
    pub level: usize,
    pub miss: f64,
    pub target: f64,
}

/// Multiscale adversary for the critical case `q = d`.
///
/// Level `j` tiles `[-1,1]^d` with cubes of side `a_j = 2^{-j}/L` (as many as
/// fit per axis) and queries their centers in lexicographic order. Each label
/// is the end of the interval still consistent with an `L`-Lipschitz target
/// that lies farther from the prediction, which keeps every transcript
/// realizable by construction. A learner that predicts inside that interval
/// misses by at least half its width; rounds that miss by less than
/// `delta_j / 2 = 2^{-j-3}` are recorded as shortfalls.
#[derive(Debug, Clone)]
pub struct DyadicAdversary {
    l: f64,
    d: usize,
    level: usize,
    index: usize,
    round: usize,
    anchors: Vec<(Vec<f64>, f64)>,
    levels: Vec<usize>,
    shortfalls: Vec<Shortfall>,
}

pub fn dyadic_adversary(l: f64, d: usize) -> Result<DyadicAdversary> {
    if !(l >= 1.0) || d == 0 {
        return Err(Error::Domain(format!("dyadic adversary needs L >= 1 and d >= 1, got L={l}, d={d}")));
    }
    Ok(DyadicAdversary {
        l,
        d,
        level: 0,
        index: 0,
        round: 0,
        anchors: Vec::new(),
        levels: Vec::new(),
        shortfalls: Vec::new(),
    })
}

impl DyadicAdversary {
    /// Side length `a_j = 2^{-j} / L`.
    pub fn side(&self, level: usize) -> f64 {
        2f64.powi(-(level as i32)) / self.l
    }

    /// Cube centers per axis at `level`: `floor(2 / a_j)`.
    pub fn per_axis(&self, level: usize) -> usize {
        (2.0 / self.side(level) + 1e-9).floor() as usize
    }

    /// Number of cubes `M_j` at `level`.
    pub fn cubes(&self, level: usize) -> usize {
        self.per_axis(level).saturating_pow(self.d as u32)
    }

    /// Increment scale `delta_j = 2^{-j-2}`.
    pub fn delta(level: usize) -> f64 {
        2f64.powi(-(level as i32) - 2)
    }

    pub fn center(&self, level: usize, index: usize) -> Vec<f64> {
        let n = self.per_axis(level);
        let a = self.side(level);
        lattice_coords(index, n, self.d).into_iter().map(|i| -1.0 + (i as f64 + 0.5) * a).collect()
    }

    /// Level of each emitted query.
    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn shortfalls(&self) -> &[Shortfall] {
        &self.shortfalls
    }

    pub fn labeled_points(&self) -> &[(Vec<f64>, f64)] {
        &self.anchors
    }

    pub fn witness(&self) -> Result<McShane> {
        mcshane_extend(self.anchors.clone(), self.l)
    }
}

impl Environment for DyadicAdversary {
    fn next_instance(&mut self, _: &Transcript) -> Query {
        while self.index >= self.cubes(self.level) {
            self.level += 1;
            self.index = 0;
        }
        let x = self.center(self.level, self.index);
        self.index += 1;
        self.levels.push(self.level);
        Query::Instance(x)
    }

    fn reveal_label(&mut self, x: &[f64], y_hat: f64) -> f64 {
        self.round += 1;
        let (lo, hi) = feasible(&self.anchors, self.l, x);
        let y = far_end(lo, hi, y_hat);
        let level = *self.levels.last().unwrap_or(&0);
        let target = Self::delta(level) / 2.0;
        let miss = (y - y_hat).abs();
        if miss < target {
            self.shortfalls.push(Shortfall { round: self.round, level, miss, target });
        }
        self.anchors.push((x.to_vec(), y));
        y
    }

    fn label_range(&self) -> (f64, f64) {
        (0.0, 1.0)
    }
}

/// Separated-grid adversary for `q < d`.
///
/// Queries the first `T` points of `{-1, -1+2/m, ..., 1}^d` (`m = floor(T^{1/d})`)
/// and answers `0` or `Delta = 2L T^{-1/d}`, whichever is farther from the
/// prediction (ties go to `Delta`).
#[derive(Debug, Clone)]
pub struct GridAdversary {
    l: f64,
    d: usize,
    q: f64,
    points: Vec<Vec<f64>>,
    delta: f64,
    next: usize,
    answers: Vec<(Vec<f64>, f64)>,
}

pub fn grid_adversary(l: f64, d: usize, q: f64, t: usize) -> Result<GridAdversary> {
    if !(l > 0.0) || d == 0 || !(q >= 1.0) {
        return Err(Error::Domain(format!("grid adversary needs L > 0, d >= 1, q >= 1; got L={l}, d={d}, q={q}")));
    }
    if (t as f64) < (2.0 * l).powi(d as i32) - 1e-9 || t == 0 {
        return Err(Error::Domain(format!(
            "grid adversary needs T >= (2L)^d = {}, got T={t}",
            (2.0 * l).powi(d as i32)
        )));
    }
    let m = int_root(t, d);
    let root = if (m as u128).pow(d as u32) == t as u128 { m as f64 } else { (t as f64).powf(1.0 / d as f64) };
    let delta = (2.0 * l / root).min(1.0);
    let n = m + 1;
    let points = (0..t)
        .map(|i| {
            lattice_coords(i, n, d)
                .into_iter()
                .map(|c| if c == m { 1.0 } else { -1.0 + 2.0 * c as f64 / m as f64 })
                .collect()
        })
        .collect();
    Ok(GridAdversary { l, d, q, points, delta, next: 0, answers: Vec::new() })
}

/// The `T = ceil((2L)^d)` grid game with labels in `{0, 1}`.
pub fn baseline_adversary(l: f64, d: usize, q: f64) -> Result<GridAdversary> {
    let t = ((2.0 * l).powi(d as i32) - 1e-9).ceil().max(1.0) as usize;
    grid_adversary(l, d, q, t)
}

impl GridAdversary {
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// `T (Delta/2)^q`: the loss forced on any learner.
    pub fn forced_loss(&self) -> f64 {
        self.points.len() as f64 * (self.delta / 2.0).powf(self.q)
    }

    pub fn witness(&self) -> Result<McShane> {
        mcshane_extend(self.answers.clone(), self.l)
    }
}

impl Environment for GridAdversary {
    fn next_instance(&mut self, _: &Transcript) -> Query {
        match self.points.get(self.next) {
            Some(x) => {
                self.next += 1;
                Query::Instance(x.clone())
            }
            None => Query::Halt,
        }
    }

    fn reveal_label(&mut self, x: &[f64], y_hat: f64) -> f64 {
        let y = far_end(0.0, self.delta, y_hat);
        self.answers.push((x.to_vec(), y));
        y
    }

    fn label_range(&self) -> (f64, f64) {
        (0.0, self.delta)
    }
}

/// Uniform random queries answered with the far end of the feasible interval.
#[derive(Debug, Clone)]
pub struct FarEndpointAdversary<R> {
    rng: R,
    l: f64,
    d: usize,
    remaining: usize,
    anchors: Vec<(Vec<f64>, f64)>,
}

impl<R: Rng> FarEndpointAdversary<R> {
    pub fn new(rng: R, l: f64, d: usize, t: usize) -> Result<Self> {
        if !(l >= 1.0) || d == 0 {
            return Err(Error::Domain(format!("needs L >= 1 and d >= 1, got L={l}, d={d}")));
        }
        Ok(Self { rng, l, d, remaining: t, anchors: Vec::new() })
    }

    pub fn witness(&self) -> Result<McShane> {
        mcshane_extend(self.anchors.clone(), self.l)
    }
}

impl<R: Rng> Environment for FarEndpointAdversary<R> {
    fn next_instance(&mut self, _: &Transcript) -> Query {
        if self.remaining == 0 {
            return Query::Halt;
        }
        self.remaining -= 1;
        Query::Instance((0..self.d).map(|_| self.rng.gen_range(-1.0..=1.0)).collect())
    }

    fn reveal_label(&mut self, x: &[f64], y_hat: f64) -> f64 {
        let (lo, hi) = feasible(&self.anchors, self.l, x);
        let y = far_end(lo, hi, y_hat);
        self.anchors.push((x.to_vec(), y));
        y
    }

    fn label_range(&self) -> (f64, f64) {
        (0.0, 1.0)
    }
}

/// A random `L`-Lipschitz target: `k` anchors placed one at a time, each value
/// drawn uniformly from the interval left feasible by the earlier ones.
pub fn random_lipschitz_target<R: Rng>(rng: &mut R, l: f64, d: usize, k: usize) -> Result<McShane> {
    let mut anchors: Vec<(Vec<f64>, f64)> = Vec::with_capacity(k);
    for _ in 0..k {
        let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let (lo, hi) = feasible(&anchors, l, &x);
        let y = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
        anchors.push((x, y));
    }
    mcshane_extend(anchors, l)
}
