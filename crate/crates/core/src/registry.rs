//! Named learners, environments, losses and fixtures, and single-game assembly.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::entropy::{cube_class, divergence_example, FiniteClass};
use crate::error::{Error, Result};
use crate::exec::stream_rng;
use crate::lipschitz::{
    critical_bound, dyadic_adversary, envelope_learner, grid_adversary, random_lipschitz_target,
    supercritical_constant, DyadicAdversary, FarEndpointAdversary, GridAdversary,
};
use crate::losses::Loss;
use crate::protocol::{
    certify_realizable, elimination_learner, run_game, BoxHypothesis, ConstantLearner, Environment, Learner, TargetEnv,
    Transcript, CERTIFY_TOL,
};
use crate::relu::{interval_adversary, one_relu_learner, relu, two_relu_witness, IntervalAdversary};

pub const LEARNERS: &[&str] = &["constant-half", "elimination", "envelope", "one_relu"];
pub const ENVIRONMENTS: &[&str] = &["dyadic", "far-endpoint", "grid", "interval", "random-lipschitz", "random-relu"];
pub const ADVERSARIES: &[&str] = &["dyadic", "far-endpoint", "grid", "interval"];
pub const LOSSES: &[&str] = &["clipped_squared", "custom", "power_q", "zero_one"];
pub const FIXTURES: &[&str] = &["cube-class", "divergence-example"];

/// Alphabetized listing of every registered name.
pub fn listing() -> String {
    let mut out = String::new();
    for (title, names) in
        [("environments", ENVIRONMENTS), ("fixtures", FIXTURES), ("learners", LEARNERS), ("losses", LOSSES)]
    {
        out.push_str(title);
        out.push_str(":\n");
        let mut sorted = names.to_vec();
        sorted.sort_unstable();
        for n in sorted {
            out.push_str("  ");
            out.push_str(n);
            out.push('\n');
        }
    }
    out
}

pub fn fixture(name: &str) -> Result<FiniteClass> {
    match name {
        "cube-class" => Ok(cube_class()),
        "divergence-example" => divergence_example(2)?.class.materialize(),
        _ => Err(Error::Domain(format!("unknown fixture {name:?}"))),
    }
}

/// Parameters of one game cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameSpec {
    pub l: f64,
    pub d: usize,
    pub q: f64,
    pub t: usize,
    /// Interval adversary depth.
    pub depth: usize,
    /// Elimination threshold.
    pub eps: f64,
}

impl Default for GameSpec {
    fn default() -> Self {
        Self { l: 1.0, d: 1, q: 1.0, t: 100, depth: 3, eps: 0.1 }
    }
}

/// Net used by the elimination learner: threshold nets on a `theta` grid for
/// the interval game, constants `i/16` otherwise.
pub fn elimination_net(env: &str, spec: &GameSpec) -> Result<Vec<BoxHypothesis>> {
    if env == "interval" {
        let eps = 2f64.powi(-(spec.depth as i32) - 2);
        let lo = -1.0 + eps;
        (0..=64)
            .map(|i| {
                let theta = lo + (1.0 - lo) * i as f64 / 64.0;
                two_relu_witness(theta, eps).map(|f| Box::new(f) as BoxHypothesis)
            })
            .collect()
    } else {
        Ok((0..=16).map(|i| Box::new(move |_: &[f64]| i as f64 / 16.0) as BoxHypothesis).collect())
    }
}

pub fn make_learner(name: &str, env: &str, spec: &GameSpec, loss: &Loss) -> Result<Box<dyn Learner + Send>> {
    Ok(match name {
        "constant-half" => Box::new(ConstantLearner(0.5)),
        "elimination" => Box::new(elimination_learner(elimination_net(env, spec)?, loss.clone(), spec.eps)?),
        "envelope" => Box::new(envelope_learner(spec.l.max(1.0), spec.d)?),
        "one_relu" => Box::new(one_relu_learner(spec.d)),
        _ => return Err(Error::Domain(format!("unknown learner {name:?}"))),
    })
}

/// Uniform point of the closed Euclidean unit ball.
pub fn unit_ball_point<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    let g: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
    let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let r = rng.gen::<f64>().powf(1.0 / d as f64);
    g.into_iter().map(|v| v * r / norm).collect()
}

/// Uniform point of `[-1,1]^d`.
pub fn cube_point<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

/// A realizable one-neuron game: `w*` and queries uniform in the unit ball.
pub fn random_relu_game<R: Rng>(rng: &mut R, d: usize, t: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let w = unit_ball_point(rng, d);
    let xs = (0..t).map(|_| unit_ball_point(rng, d)).collect();
    (w, xs)
}

/// An environment together with what is needed to certify its transcript.
pub enum GameEnv {
    Dyadic(DyadicAdversary),
    Grid(GridAdversary),
    Interval(IntervalAdversary),
    FarEndpoint(FarEndpointAdversary<ChaCha8Rng>),
    Target { env: TargetEnv, witness: BoxHypothesis, w_star: Option<Vec<f64>> },
}

impl GameEnv {
    pub fn as_env(&mut self) -> &mut dyn Environment {
        match self {
            GameEnv::Dyadic(e) => e,
            GameEnv::Grid(e) => e,
            GameEnv::Interval(e) => e,
            GameEnv::FarEndpoint(e) => e,
            GameEnv::Target { env, .. } => env,
        }
    }

    /// Whether the played transcript is reproduced by the environment's witness.
    pub fn certify(&self, tr: &Transcript) -> Result<bool> {
        Ok(match self {
            GameEnv::Dyadic(e) => certify_realizable(tr, &e.witness()?, CERTIFY_TOL),
            GameEnv::Grid(e) => certify_realizable(tr, &e.witness()?, CERTIFY_TOL),
            GameEnv::Interval(e) => {
                let w = e.witness()?;
                w.in_unit_box() && certify_realizable(tr, &w, CERTIFY_TOL)
            }
            GameEnv::FarEndpoint(e) => certify_realizable(tr, &e.witness()?, CERTIFY_TOL),
            GameEnv::Target { witness, .. } => certify_realizable(tr, witness.as_ref(), CERTIFY_TOL),
        })
    }
}

/// Builds environment `name`; randomness comes from `rng`.
pub fn make_env(name: &str, spec: &GameSpec, mut rng: ChaCha8Rng) -> Result<GameEnv> {
    Ok(match name {
        "dyadic" => GameEnv::Dyadic(dyadic_adversary(spec.l, spec.d)?),
        "grid" => GameEnv::Grid(grid_adversary(spec.l, spec.d, spec.q, spec.t)?),
        "interval" => GameEnv::Interval(interval_adversary(spec.depth)?),
        "far-endpoint" => GameEnv::FarEndpoint(FarEndpointAdversary::new(rng, spec.l, spec.d, spec.t)?),
        "random-lipschitz" => {
            let target = random_lipschitz_target(&mut rng, spec.l, spec.d, 32)?;
            let xs = (0..spec.t).map(|_| cube_point(&mut rng, spec.d)).collect();
            let env = TargetEnv::new(xs, Box::new(target.clone()), (0.0, 1.0));
            GameEnv::Target { env, witness: Box::new(target), w_star: None }
        }
        "random-relu" => {
            let (w, xs) = random_relu_game(&mut rng, spec.d, spec.t);
            let target = {
                let w = w.clone();
                move |x: &[f64]| relu(w.iter().zip(x).map(|(a, b)| a * b).sum())
            };
            let env = TargetEnv::new(xs, Box::new(target.clone()), (0.0, 1.0));
            GameEnv::Target { env, witness: Box::new(target), w_star: Some(w) }
        }
        _ => return Err(Error::Domain(format!("unknown environment {name:?}"))),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// Cumulative loss must not exceed the value.
    Upper,
    /// Cumulative loss must reach at least the value.
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound {
    pub kind: BoundKind,
    pub value: f64,
}

impl Bound {
    pub fn holds(&self, loss: f64) -> bool {
        match self.kind {
            BoundKind::Upper => loss <= self.value + 1e-9,
            BoundKind::Lower => loss >= self.value - 1e-9,
        }
    }
}

#[derive(Debug)]
pub struct GameOutcome {
    pub transcript: Transcript,
    pub certified: bool,
    /// Bounds that apply to this learner, environment and loss.
    pub bounds: Vec<Bound>,
}

impl GameOutcome {
    pub fn bounds_hold(&self) -> bool {
        self.bounds.iter().all(|b| b.holds(self.transcript.cumulative_loss))
    }
}

/// Guarantees known for a matchup, given the horizon actually played.
pub fn known_bounds(learner: &str, env: &GameEnv, spec: &GameSpec, loss: &Loss, horizon: usize) -> Vec<Bound> {
    let mut out = Vec::new();
    let q = loss.q();
    if learner == "envelope" && !matches!(env, GameEnv::Interval(_)) {
        if let Some(q) = q {
            let d = spec.d as f64;
            if q > d {
                let value = supercritical_constant(spec.d, q) * spec.l.powi(spec.d as i32);
                out.push(Bound { kind: BoundKind::Upper, value });
            } else if q == d {
                out.push(Bound { kind: BoundKind::Upper, value: critical_bound(spec.l, spec.d, horizon) });
            }
        }
    }
    match env {
        GameEnv::Target { w_star: Some(w), .. } if learner == "one_relu" && q == Some(2.0) => {
            out.push(Bound { kind: BoundKind::Upper, value: w.iter().map(|v| v * v).sum() });
        }
        GameEnv::Grid(g) if q.is_some() => {
            out.push(Bound { kind: BoundKind::Lower, value: g.forced_loss() });
        }
        GameEnv::Interval(_) if matches!(loss.kind(), crate::losses::LossKind::ZeroOne) => {
            out.push(Bound { kind: BoundKind::Lower, value: spec.depth as f64 });
        }
        _ => {}
    }
    out
}

/// Plays one named matchup for at most `spec.t` rounds.
pub fn play(learner: &str, env: &str, spec: &GameSpec, loss: &Loss, seed: u64, stream: u64) -> Result<GameOutcome> {
    let mut l = make_learner(learner, env, spec, loss)?;
    let mut e = make_env(env, spec, stream_rng(seed, stream))?;
    let max_t = if env == "interval" { spec.depth } else { spec.t };
    let transcript = run_game(l.as_mut(), e.as_env(), loss, max_t)?;
    let certified = e.certify(&transcript)?;
    let bounds = known_bounds(learner, &e, spec, loss, transcript.horizon());
    Ok(GameOutcome { transcript, certified, bounds })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn listing_is_sorted_and_complete() {
        let text = listing();
        for name in
            ["envelope", "one_relu", "elimination", "dyadic", "grid", "interval", "cube-class", "divergence-example"]
        {
            assert!(text.lines().any(|l| l.trim() == name), "{name}");
        }
        let learners: Vec<&str> = text
            .split("learners:\n")
            .nth(1)
            .unwrap()
            .lines()
            .take_while(|l| l.starts_with("  "))
            .map(str::trim)
            .collect();
        assert_eq!(learners, vec!["constant-half", "elimination", "envelope", "one_relu"]);
    }

    #[test]
    fn fixtures_load() {
        assert_eq!(fixture("cube-class").unwrap().n(), 4);
        assert_eq!(fixture("divergence-example").unwrap().n(), 64);
        assert!(fixture("nope").is_err());
    }

    #[test]
    fn ball_points() {
        let mut rng = stream_rng(3, 0);
        for d in [1, 2, 50] {
            for _ in 0..100 {
                let x = unit_ball_point(&mut rng, d);
                assert!(x.iter().map(|v| v * v).sum::<f64>() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn every_pair_plays() {
        let spec = GameSpec { t: 16, d: 1, ..Default::default() };
        for l in LEARNERS {
            for e in ENVIRONMENTS {
                let loss = if *e == "interval" { Loss::zero_one() } else { Loss::absolute() };
                let out = play(l, e, &spec, &loss, 1, 0).unwrap();
                assert!(out.certified, "{l} vs {e}");
            }
        }
    }
}
