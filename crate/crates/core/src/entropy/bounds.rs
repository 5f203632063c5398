//! Closed-form covering and potential bounds for parametric and Lipschitz classes.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};

/// Default `C_0` in the Lipschitz covering bound, from `2 ceil(4/delta) + 1 <= 9/delta`.
pub const LIPSCHITZ_C0: f64 = 9.0;

/// For covers `N(H, eps) <= (A/eps)^p`: `(p (log2 A + 1/ln 2), 4c` times that`)`,
/// bounds on the potential and on the online dimension.
pub fn poly_cover_potential_bound(a: f64, p: f64, c: f64) -> Result<(f64, f64)> {
    if !(a >= 1.0 && p >= 1.0 && c >= 1.0) {
        return Err(Error::Domain(format!("need A, p, c >= 1; got A={a}, p={p}, c={c}")));
    }
    let phi = p * (a.log2() + 1.0 / LN_2);
    Ok((phi, 4.0 * c * phi))
}

/// `(8L/delta)^d log2(C0/delta)`: bound on `log2 N` of `L`-Lipschitz maps
/// `[-1,1]^d -> [0,1]` at sup-norm scale `delta`.
pub fn lipschitz_cover_bound(l: f64, delta: f64, d: usize, c0: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Domain(format!("delta must lie in (0, 1], got {delta}")));
    }
    if !(l >= 1.0) || d == 0 {
        return Err(Error::Domain(format!("need L >= 1 and d >= 1, got L={l}, d={d}")));
    }
    Ok((8.0 * l / delta).powi(d as i32) * (c0 / delta).log2())
}

/// Under `|a-b|^q` an `eps`-cover is a sup-norm `eps^{1/q}`-cover.
pub fn lipschitz_cover_bound_power(l: f64, eps: f64, d: usize, q: f64, c0: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::Domain(format!("need q >= 1, got {q}")));
    }
    lipschitz_cover_bound(l, eps.powf(1.0 / q), d, c0)
}

/// `(1 + 2 alpha / r)^p`: cover of an `alpha`-radius parameter ball at scale `r`.
pub fn grid_cover_bound(p: usize, alpha: f64, r: f64) -> f64 {
    (1.0 + 2.0 * alpha / r).powi(p as i32)
}

/// `(4 alpha K / phi_inv(eps))^p` for a `K`-Lipschitz parameterization with
/// loss modulus inverse `phi_inv`. `1` when `K = 0`, `+inf` when `phi_inv(eps) = 0`.
pub fn transfer_cover_bound(p: usize, alpha: f64, k: f64, phi_inverse: &dyn Fn(f64) -> f64, eps: f64) -> f64 {
    if k == 0.0 {
        return 1.0;
    }
    let t = phi_inverse(eps);
    if !(t > 0.0) {
        return f64::INFINITY;
    }
    (4.0 * alpha * k / t).powi(p as i32)
}

/// The transfer bound with `phi(t) = t`.
pub fn linear_modulus_cover_bound(p: usize, alpha: f64, k: f64, eps: f64) -> f64 {
    transfer_cover_bound(p, alpha, k, &|e| e, eps)
}

/// `p log2(4 alpha K) + p/(q ln 2)`: potential bound for `phi(t) = t^q`
/// when the class diameter is at most 1.
pub fn power_modulus_potential_bound(p: usize, alpha: f64, k: f64, q: f64) -> f64 {
    let p = p as f64;
    p * (4.0 * alpha * k).log2() + p / (q * LN_2)
}
