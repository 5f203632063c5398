use super::{two_relu_witness, TwoReluNet};
use crate::error::{Error, Result};
use crate::protocol::{Environment, Query, Transcript};

/// Binary-search adversary against two-neuron threshold nets under 0/1 loss.
///
/// Keeps the interval of thresholds `theta` consistent with every answer,
/// queries `x = (lo + hi - eps)/2` and answers the label in `{0, eps}` that
/// differs from the prediction. Halts after `D` rounds.
#[derive(Debug, Clone)]
pub struct IntervalAdversary {
    depth: usize,
    eps: f64,
    lo: f64,
    hi: f64,
    round: usize,
}

pub fn interval_adversary(depth: usize) -> Result<IntervalAdversary> {
    if depth == 0 || depth > 60 {
        return Err(Error::Domain(format!("depth must lie in 1..=60, got {depth}")));
    }
    let eps = 2f64.powi(-(depth as i32) - 2);
    Ok(IntervalAdversary { depth, eps, lo: -1.0 + eps, hi: 1.0, round: 0 })
}

impl IntervalAdversary {
    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// The threshold net at the middle of the surviving interval.
    pub fn witness(&self) -> Result<TwoReluNet> {
        two_relu_witness((self.lo + self.hi) / 2.0, self.eps)
    }
}

impl Environment for IntervalAdversary {
    fn next_instance(&mut self, _: &Transcript) -> Query {
        if self.round >= self.depth {
            return Query::Halt;
        }
        Query::Instance(vec![(self.lo + self.hi - self.eps) / 2.0])
    }

    fn reveal_label(&mut self, x: &[f64], y_hat: f64) -> f64 {
        self.round += 1;
        let x = x[0];
        if y_hat == 0.0 {
            // eps at x means theta >= x + eps
            self.lo = x + self.eps;
            self.eps
        } else {
            self.hi = x;
            0.0
        }
    }

    fn label_range(&self) -> (f64, f64) {
        (0.0, self.eps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::losses::Loss;
    use crate::protocol::{certify_realizable, run_game, ConstantLearner, CERTIFY_TOL};

    #[test]
    fn first_query_at_zero() {
        let mut adv = interval_adversary(3).unwrap();
        assert_eq!(adv.eps(), 1.0 / 32.0);
        assert_eq!(adv.next_instance(&Transcript::default()), Query::Instance(vec![0.0]));
    }

    #[test]
    fn interval_halves() {
        for pred in [0.0, 0.5] {
            let mut adv = interval_adversary(6).unwrap();
            let eps = adv.eps();
            let tr = run_game(&mut ConstantLearner(pred), &mut adv, &Loss::zero_one(), 100).unwrap();
            assert_eq!(tr.horizon(), 6);
            assert_eq!(tr.cumulative_loss, 6.0);
            let (lo, hi) = adv.interval();
            assert!((hi - lo - (2f64.powi(-5) - eps)).abs() < 1e-15);
            let w = adv.witness().unwrap();
            assert!(w.in_unit_box());
            assert!(certify_realizable(&tr, &w, CERTIFY_TOL));
        }
    }
}
