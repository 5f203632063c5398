use super::{dot, relu};
use crate::error::Result;
use crate::protocol::{Learner, Transcript};

/// Online learner for `x -> ReLU(w* . x)`: starts at `w = 0`, predicts
/// `ReLU(w . x)` and steps `w <- w - (y_hat - y) x`.
#[derive(Debug, Clone)]
pub struct OneReluLearner {
    w: Vec<f64>,
    trace: Option<Vec<Vec<f64>>>,
}

pub fn one_relu_learner(d: usize) -> OneReluLearner {
    OneReluLearner { w: vec![0.0; d], trace: None }
}

impl OneReluLearner {
    /// Keeps a copy of every iterate `w_1, w_2, ...` for [`potential_trace`].
    pub fn with_trace(mut self) -> Self {
        self.trace = Some(vec![self.w.clone()]);
        self
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    /// Recorded iterates, starting with the initial `w_1 = 0`.
    pub fn iterates(&self) -> &[Vec<f64>] {
        self.trace.as_deref().unwrap_or(&[])
    }
}

impl Learner for OneReluLearner {
    fn predict(&self, x: &[f64], _: &Transcript) -> Result<f64> {
        Ok(relu(dot(&self.w, x)))
    }

    fn update(&mut self, x: &[f64], y: f64) {
        let alpha = relu(dot(&self.w, x)) - y;
        for (wi, xi) in self.w.iter_mut().zip(x) {
            *wi -= alpha * xi;
        }
        if let Some(t) = self.trace.as_mut() {
            t.push(self.w.clone());
        }
    }
}

/// `phi_t = |w_t - w*|_2^2` for each recorded iterate.
pub fn potential_trace(iterates: &[Vec<f64>], w_star: &[f64]) -> Vec<f64> {
    iterates.iter().map(|w| w.iter().zip(w_star).map(|(a, b)| (a - b) * (a - b)).sum()).collect()
}

/// `2 alpha (w_t - w) . x - 2 alpha^2` with `alpha = ReLU(w_t . x) - ReLU(w . x)`.
///
/// Nonnegative because ReLU is monotone and 1-Lipschitz; this is the step
/// that makes the potential drop by at least the round loss.
pub fn update_inequality_slack(w_t: &[f64], w: &[f64], x: &[f64]) -> f64 {
    let alpha = relu(dot(w_t, x)) - relu(dot(w, x));
    let diff: f64 = w_t.iter().zip(w).zip(x).map(|((a, b), c)| (a - b) * c).sum();
    2.0 * alpha * diff - 2.0 * alpha * alpha
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::losses::Loss;
    use crate::protocol::{run_game, TargetEnv};

    #[test]
    fn hand_example() {
        let mut l = one_relu_learner(1).with_trace();
        let mut env = TargetEnv::new(vec![vec![1.0], vec![1.0]], Box::new(|x: &[f64]| relu(x[0])), (0.0, 1.0));
        let tr = run_game(&mut l, &mut env, &Loss::squared(), 2).unwrap();
        assert_eq!(tr.rounds[0].loss, 1.0);
        assert_eq!(tr.rounds[1].loss, 0.0);
        assert_eq!(tr.cumulative_loss, 1.0);
        assert_eq!(potential_trace(l.iterates(), &[1.0]), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn zero_target_never_moves() {
        let mut l = one_relu_learner(3).with_trace();
        let pts = vec![vec![0.5, 0.5, 0.0], vec![-0.2, 0.1, 0.9]];
        let mut env = TargetEnv::new(pts, Box::new(|_: &[f64]| 0.0), (0.0, 1.0));
        let tr = run_game(&mut l, &mut env, &Loss::squared(), 10).unwrap();
        assert_eq!(tr.cumulative_loss, 0.0);
        assert!(potential_trace(l.iterates(), &[0.0; 3]).iter().all(|&p| p == 0.0));
    }

    #[test]
    fn slack_is_nonnegative_on_corners() {
        assert!(update_inequality_slack(&[1.0], &[-1.0], &[1.0]) >= 0.0);
        assert!(update_inequality_slack(&[-1.0], &[1.0], &[1.0]) >= 0.0);
        assert_eq!(update_inequality_slack(&[-1.0], &[-0.5], &[1.0]), 0.0);
    }
}
