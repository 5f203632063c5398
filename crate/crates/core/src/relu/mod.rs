//! ReLU hypotheses, the one-neuron online learner and the two-neuron
//! classification adversary.

mod deep;
mod interval;
mod online;
mod shallow;

pub use deep::{deep_lipschitz_constant, eval_deep, Activation, DeepNetParams};
pub use interval::{interval_adversary, IntervalAdversary};
pub use online::{one_relu_learner, potential_trace, update_inequality_slack, OneReluLearner};
pub use shallow::{eval_krelu, two_relu_witness, KReluParams, TwoReluNet};

pub fn relu(v: f64) -> f64 {
    v.max(0.0)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Tolerance on norm constraints of inputs and weights.
pub const NORM_TOL: f64 = 1e-9;
