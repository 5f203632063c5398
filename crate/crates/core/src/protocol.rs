//! The realizable online game: learners, environments, transcripts.

use std::io::Write;

use crate::error::{Error, Result};
use crate::losses::Loss;

/// A real-valued function on instances.
pub trait Hypothesis: Send + Sync {
    fn eval(&self, x: &[f64]) -> f64;
}

impl<F> Hypothesis for F
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    fn eval(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

pub type BoxHypothesis = Box<dyn Hypothesis>;

#[derive(Debug, Clone, PartialEq)]
pub struct Round {
    pub x: Vec<f64>,
    pub y_hat: f64,
    pub y: f64,
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Transcript {
    pub rounds: Vec<Round>,
    pub cumulative_loss: f64,
    /// Set when the learner reports that its own precondition failed.
    pub flagged: bool,
}

impl Transcript {
    pub fn horizon(&self) -> usize {
        self.rounds.len()
    }

    pub fn push(&mut self, round: Round) {
        self.cumulative_loss += round.loss;
        self.rounds.push(round);
    }

    /// Number of rounds whose loss exceeds `eps`.
    pub fn count_loss_above(&self, eps: f64) -> usize {
        self.rounds.iter().filter(|r| r.loss > eps).count()
    }

    /// Number of rounds with `|y_hat - y| > eps`.
    pub fn count_miss_above(&self, eps: f64) -> usize {
        self.rounds.iter().filter(|r| (r.y_hat - r.y).abs() > eps).count()
    }

    /// `(x_t, y_t)` pairs in round order.
    pub fn labeled_points(&self) -> Vec<(Vec<f64>, f64)> {
        self.rounds.iter().map(|r| (r.x.clone(), r.y)).collect()
    }

    /// Writes `t,x,y_hat,y,loss,cum_loss` rows; `x` coordinates are `;`-joined.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["t", "x", "y_hat", "y", "loss", "cum_loss"])?;
        let mut cum = 0.0;
        for (t, r) in self.rounds.iter().enumerate() {
            cum += r.loss;
            let x = r.x.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";");
            wtr.write_record([
                (t + 1).to_string(),
                x,
                r.y_hat.to_string(),
                r.y.to_string(),
                r.loss.to_string(),
                cum.to_string(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

pub trait Learner {
    /// Prediction for `x` given the rounds played so far.
    fn predict(&self, x: &[f64], history: &Transcript) -> Result<f64>;

    /// Called once per round, after the label is revealed.
    fn update(&mut self, x: &[f64], y: f64);

    /// True once the learner has detected that its precondition is violated.
    fn flagged(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Query {
    Instance(Vec<f64>),
    Halt,
}

pub trait Environment {
    fn next_instance(&mut self, history: &Transcript) -> Query;

    /// Label for `x`, chosen after seeing the learner's prediction.
    fn reveal_label(&mut self, x: &[f64], y_hat: f64) -> f64;

    /// Closed interval every revealed label must lie in.
    fn label_range(&self) -> (f64, f64);
}

/// Plays up to `max_t` rounds, stopping early if the environment halts.
pub fn run_game(learner: &mut dyn Learner, env: &mut dyn Environment, loss: &Loss, max_t: usize) -> Result<Transcript> {
    let mut tr = Transcript::default();
    let (lo, hi) = env.label_range();
    for t in 1..=max_t {
        let x = match env.next_instance(&tr) {
            Query::Instance(x) => x,
            Query::Halt => break,
        };
        let y_hat = learner.predict(&x, &tr)?;
        let y = env.reveal_label(&x, y_hat);
        if !(y >= lo && y <= hi) || !loss.accepts(y) {
            return Err(Error::Protocol {
                round: t,
                message: format!("label {y} outside declared range [{lo}, {hi}]"),
            });
        }
        let l = loss.evaluate(y_hat, y).map_err(|e| Error::Protocol { round: t, message: e.to_string() })?;
        learner.update(&x, y);
        tr.push(Round { x, y_hat, y, loss: l });
    }
    tr.flagged = learner.flagged();
    Ok(tr)
}

/// True iff `|h(x_t) - y_t| <= tol` on every round.
pub fn certify_realizable(transcript: &Transcript, hypothesis: &dyn Hypothesis, tol: f64) -> bool {
    transcript.rounds.iter().all(|r| (hypothesis.eval(&r.x) - r.y).abs() <= tol)
}

/// Default tolerance for realizability checks.
pub const CERTIFY_TOL: f64 = 1e-9;

/// Predicts a fixed value.
#[derive(Debug, Clone, Copy)]
pub struct ConstantLearner(pub f64);

impl Learner for ConstantLearner {
    fn predict(&self, _: &[f64], _: &Transcript) -> Result<f64> {
        Ok(self.0)
    }

    fn update(&mut self, _: &[f64], _: f64) {}
}

/// Follows the lowest-index surviving net member and drops it once its
/// round loss exceeds `eps`.
pub struct EliminationLearner {
    net: Vec<BoxHypothesis>,
    loss: Loss,
    eps: f64,
    current: usize,
    exhausted: bool,
}

pub fn elimination_learner(net: Vec<BoxHypothesis>, loss: Loss, eps: f64) -> Result<EliminationLearner> {
    if net.is_empty() {
        return Err(Error::Domain("elimination learner needs a nonempty net".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    Ok(EliminationLearner { net, loss, eps, current: 0, exhausted: false })
}

impl EliminationLearner {
    /// Index of the member currently used for prediction.
    pub fn active(&self) -> usize {
        self.current.min(self.net.len() - 1)
    }

    pub fn eliminated(&self) -> usize {
        self.current
    }
}

impl Learner for EliminationLearner {
    fn predict(&self, x: &[f64], _: &Transcript) -> Result<f64> {
        Ok(self.net[self.active()].eval(x))
    }

    fn update(&mut self, x: &[f64], y: f64) {
        if self.exhausted {
            return;
        }
        let pred = self.net[self.current].eval(x);
        // a label the loss cannot score counts as an error of the member
        let l = self.loss.evaluate(pred, y).unwrap_or(f64::INFINITY);
        if l > self.eps {
            self.current += 1;
            if self.current == self.net.len() {
                self.exhausted = true;
            }
        }
    }

    fn flagged(&self) -> bool {
        self.exhausted
    }
}

/// Queries a fixed list of points and labels them with a target hypothesis.
pub struct TargetEnv {
    points: Vec<Vec<f64>>,
    target: BoxHypothesis,
    range: (f64, f64),
    next: usize,
}

impl TargetEnv {
    pub fn new(points: Vec<Vec<f64>>, target: BoxHypothesis, range: (f64, f64)) -> Self {
        Self { points, target, range, next: 0 }
    }
}

impl Environment for TargetEnv {
    fn next_instance(&mut self, _: &Transcript) -> Query {
        match self.points.get(self.next) {
            Some(x) => {
                self.next += 1;
                Query::Instance(x.clone())
            }
            None => Query::Halt,
        }
    }

    fn reveal_label(&mut self, x: &[f64], _: f64) -> f64 {
        self.target.eval(x)
    }

    fn label_range(&self) -> (f64, f64) {
        self.range
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_env(v: f64, t: usize) -> TargetEnv {
        TargetEnv::new(vec![vec![0.0]; t], Box::new(move |_: &[f64]| v), (0.0, 1.0))
    }

    #[test]
    fn perfect_constant_learner() {
        let tr = run_game(&mut ConstantLearner(0.0), &mut constant_env(0.0, 5), &Loss::squared(), 100).unwrap();
        assert_eq!(tr.horizon(), 5);
        assert_eq!(tr.cumulative_loss, 0.0);
    }

    #[test]
    fn midpoint_learner_against_ones() {
        let tr = run_game(&mut ConstantLearner(0.5), &mut constant_env(1.0, 10), &Loss::squared(), 4).unwrap();
        assert_eq!(tr.horizon(), 4);
        assert_eq!(tr.cumulative_loss, 1.0);
    }

    #[test]
    fn out_of_range_label_reports_round() {
        let mut env = TargetEnv::new(vec![vec![0.0], vec![1.0], vec![2.0]], Box::new(|x: &[f64]| x[0]), (0.0, 1.0));
        let err = run_game(&mut ConstantLearner(0.0), &mut env, &Loss::absolute(), 10).unwrap_err();
        assert!(matches!(err, Error::Protocol { round: 3, .. }), "{err:?}");
    }

    #[test]
    fn elimination_errs_once() {
        let net: Vec<BoxHypothesis> = vec![Box::new(|_: &[f64]| 0.0), Box::new(|_: &[f64]| 1.0)];
        let mut l = elimination_learner(net, Loss::absolute(), 0.1).unwrap();
        let tr = run_game(&mut l, &mut constant_env(1.0, 6), &Loss::absolute(), 6).unwrap();
        assert_eq!(tr.count_loss_above(0.1), 1);
        assert!(!tr.flagged);
    }

    #[test]
    fn elimination_flags_when_exhausted() {
        let net: Vec<BoxHypothesis> = vec![Box::new(|_: &[f64]| 0.0), Box::new(|_: &[f64]| 0.2)];
        let mut l = elimination_learner(net, Loss::absolute(), 0.1).unwrap();
        let tr = run_game(&mut l, &mut constant_env(1.0, 4), &Loss::absolute(), 4).unwrap();
        assert!(tr.flagged);
        assert_eq!(tr.rounds[3].y_hat, 0.2);
    }

    #[test]
    fn certify_and_perturb() {
        let tr = run_game(&mut ConstantLearner(0.0), &mut constant_env(0.3, 3), &Loss::absolute(), 3).unwrap();
        assert!(certify_realizable(&tr, &|_: &[f64]| 0.3, CERTIFY_TOL));
        assert!(!certify_realizable(&tr, &|_: &[f64]| 0.4, CERTIFY_TOL));
        assert!(certify_realizable(&tr, &|_: &[f64]| 0.4, 0.2));
    }

    #[test]
    fn csv_schema() {
        let tr = run_game(&mut ConstantLearner(0.5), &mut constant_env(1.0, 2), &Loss::squared(), 2).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "t,x,y_hat,y,loss,cum_loss\n1,0,0.5,1,0.25,0.25\n2,0,0.5,1,0.25,0.5\n");
    }
}
