use rand::Rng;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::losses::Loss;

/// Largest class a [`RowSet`] can index.
pub const MAX_ROWS: usize = 128;

/// A subset of class rows as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RowSet(pub u128);

impl RowSet {
    pub const EMPTY: RowSet = RowSet(0);

    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_ROWS);
        if n == MAX_ROWS {
            RowSet(u128::MAX)
        } else {
            RowSet((1u128 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        RowSet(1u128 << i)
    }

    pub fn from_rows<I: IntoIterator<Item = usize>>(rows: I) -> Self {
        RowSet(rows.into_iter().fold(0u128, |m, i| m | (1u128 << i)))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1u128 << i;
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: RowSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i)
        })
    }
}

impl std::ops::BitAnd for RowSet {
    type Output = RowSet;
    fn bitand(self, o: RowSet) -> RowSet {
        RowSet(self.0 & o.0)
    }
}

impl std::ops::BitOr for RowSet {
    type Output = RowSet;
    fn bitor(self, o: RowSet) -> RowSet {
        RowSet(self.0 | o.0)
    }
}

impl std::ops::Not for RowSet {
    type Output = RowSet;
    fn not(self) -> RowSet {
        RowSet(!self.0)
    }
}

/// `n` hypotheses tabulated on `m` points, with the sup pseudo-metric
/// `d(i, j) = max_x loss(h_i(x), h_j(x))`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteClass {
    values: Vec<Vec<f64>>,
    loss: Loss,
    dist: Vec<f64>,
    diam: f64,
}

impl FiniteClass {
    pub fn new(values: Vec<Vec<f64>>, loss: Loss) -> Result<Self> {
        let n = values.len();
        if n == 0 || n > MAX_ROWS {
            return Err(Error::Domain(format!("class must have 1..={MAX_ROWS} rows, got {n}")));
        }
        let m = values[0].len();
        if m == 0 || values.iter().any(|r| r.len() != m) {
            return Err(Error::Domain("class rows must share a positive number of points".into()));
        }
        let mut dist = vec![0.0; n * n];
        let mut diam: f64 = 0.0;
        for i in 0..n {
            for v in &values[i] {
                loss.evaluate(*v, *v)?;
            }
            for j in 0..i {
                let mut d: f64 = 0.0;
                for x in 0..m {
                    d = d.max(loss.evaluate(values[i][x], values[j][x])?);
                }
                dist[i * n + j] = d;
                dist[j * n + i] = d;
                diam = diam.max(d);
            }
        }
        Ok(Self { values, loss, dist, diam })
    }

    /// Random `n x m` table with entries drawn from `labels`.
    pub fn random<R: Rng>(rng: &mut R, n: usize, m: usize, labels: &[f64], loss: Loss) -> Result<Self> {
        let values = (0..n).map(|_| (0..m).map(|_| labels[rng.gen_range(0..labels.len())]).collect()).collect();
        Self::new(values, loss)
    }

    /// Reads rows of point values; the header row names the points.
    pub fn from_csv<R: Read>(reader: R, loss: Loss) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let mut values = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let row = rec?
                .iter()
                .map(|s| {
                    s.parse::<f64>().map_err(|e| Error::Format(format!("row {}: cannot parse {s:?}: {e}", line + 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            values.push(row);
        }
        Self::new(values, loss)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record((0..self.m()).map(|x| format!("x{x}")))?;
        for row in &self.values {
            wtr.write_record(row.iter().map(|v| v.to_string()))?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn m(&self) -> usize {
        self.values[0].len()
    }

    pub fn loss(&self) -> &Loss {
        &self.loss
    }

    pub fn value(&self, row: usize, x: usize) -> f64 {
        self.values[row][x]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n() + j]
    }

    pub fn diam(&self) -> f64 {
        self.diam
    }

    pub fn all(&self) -> RowSet {
        RowSet::full(self.n())
    }

    /// Rows of `u` taking value `s` at point `x`.
    pub fn restrict(&self, u: RowSet, x: usize, s: f64) -> RowSet {
        RowSet::from_rows(u.iter().filter(|&i| self.values[i][x] == s))
    }

    /// Distinct values taken at `x` by rows of `u`, ascending.
    pub fn labels_at(&self, u: RowSet, x: usize) -> Vec<f64> {
        let mut v: Vec<f64> = u.iter().map(|i| self.values[i][x]).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// Sorted pairwise distances (including 0) with values closer than
    /// `1e-12` merged; each cluster is represented by its largest member.
    pub fn breakpoints(&self) -> Vec<f64> {
        let n = self.n();
        let mut d: Vec<f64> = (0..n).flat_map(|i| (0..i).map(move |j| (i, j))).map(|(i, j)| self.dist(i, j)).collect();
        d.push(0.0);
        d.sort_by(f64::total_cmp);
        let mut out: Vec<f64> = Vec::new();
        let mut start = f64::NEG_INFINITY;
        for v in d {
            if v - start <= MERGE_TOL {
                *out.last_mut().unwrap() = v;
            } else {
                out.push(v);
                start = v;
            }
        }
        out
    }
}

/// Distances closer than this are treated as one breakpoint.
pub const MERGE_TOL: f64 = 1e-12;

/// Four `{0,1}`-valued functions on two points under absolute loss.
pub fn cube_class() -> FiniteClass {
    let values = vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]];
    FiniteClass::new(values, Loss::absolute()).expect("valid fixture")
}

/// All `{0,1}` labelings of `k` points.
pub fn hypercube_class(k: usize, loss: Loss) -> Result<FiniteClass> {
    if k == 0 || k > 7 {
        return Err(Error::Domain(format!("hypercube needs 1..=7 points, got {k}")));
    }
    let values = (0..1usize << k).map(|r| (0..k).map(|x| ((r >> (k - 1 - x)) & 1) as f64).collect()).collect();
    FiniteClass::new(values, loss)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rowset_ops() {
        let s = RowSet::from_rows([0, 3, 5]);
        assert_eq!(s.len(), 3);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 3, 5]);
        assert!(s.contains(3) && !s.contains(4));
        assert!(RowSet::singleton(3).is_subset(s));
        assert_eq!(RowSet::full(128).len(), 128);
    }

    #[test]
    fn cube_metric() {
        let c = cube_class();
        assert_eq!(c.diam(), 1.0);
        assert_eq!(c.dist(0, 3), 1.0);
        assert_eq!(c.breakpoints(), vec![0.0, 1.0]);
        assert_eq!(c.dist(1, 2), 1.0);
        assert_eq!(c.labels_at(c.all(), 0), vec![0.0, 1.0]);
        assert_eq!(c.restrict(c.all(), 0, 1.0), RowSet::from_rows([2, 3]));
    }

    #[test]
    fn breakpoints_merge() {
        let c = FiniteClass::new(vec![vec![0.0], vec![0.5], vec![0.5 + 1e-14], vec![0.9]], Loss::absolute()).unwrap();
        let b = c.breakpoints();
        assert_eq!(b.len(), 4, "{b:?}");
        assert!(b[0] < 1e-12);
    }

    #[test]
    fn csv_roundtrip() {
        let c = cube_class();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        assert_eq!(FiniteClass::from_csv(buf.as_slice(), Loss::absolute()).unwrap(), c);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(FiniteClass::new(vec![], Loss::absolute()).is_err());
        assert!(FiniteClass::new(vec![vec![0.0], vec![0.0, 1.0]], Loss::absolute()).is_err());
        assert_eq!(hypercube_class(2, Loss::absolute()).unwrap(), cube_class());
    }
}
