//! Lipschitz regression on `[-1,1]^d` under the sup norm.

mod adversary;
mod envelope;
mod mcshane;

pub use adversary::{
    baseline_adversary, dyadic_adversary, grid_adversary, random_lipschitz_target, DyadicAdversary,
    FarEndpointAdversary, GridAdversary, Shortfall,
};
pub use envelope::{envelope_learner, envelope_potential, envelope_predict, EnvelopeLearner, EnvelopeState};
pub use mcshane::{mcshane_extend, McShane};

/// `max_i |a_i - b_i|`.
pub fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| f64::max(m, (x - y).abs()))
}

pub(crate) fn clip01(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

/// `c_{d,q} = 8^{-d}((3/4)^{q-d} - (1/4)^{q-d})`, the per-round potential
/// decrease rate of the envelope learner for `q > d`.
pub fn potential_rate(d: usize, q: f64) -> f64 {
    let e = q - d as f64;
    8f64.powi(-(d as i32)) * (0.75f64.powf(e) - 0.25f64.powf(e))
}

/// `C'_{d,q} = 2^{-q} 2^d / c_{d,q}`: the envelope learner's total `l_q` loss
/// is at most `C'_{d,q} L^d` when `q > d`. Infinite for `q <= d`.
pub fn supercritical_constant(d: usize, q: f64) -> f64 {
    if q <= d as f64 {
        return f64::INFINITY;
    }
    2f64.powf(-q) * 2f64.powi(d as i32) / potential_rate(d, q)
}

/// `(8L/eps)^d`: bound on rounds with `|y_hat - y| > eps` for the envelope learner.
pub fn pointwise_mistake_bound(l: f64, d: usize, eps: f64) -> f64 {
    (8.0 * l / eps).powi(d as i32)
}

/// `8^d L^d (1 + ln T)`: envelope loss bound in the critical case `q = d`.
pub fn critical_bound(l: f64, d: usize, t: usize) -> f64 {
    (8.0 * l).powi(d as i32) * (1.0 + (t.max(1) as f64).ln())
}
