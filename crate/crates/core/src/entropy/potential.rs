use super::class::{FiniteClass, RowSet};
use super::cover::{cover, Centers};
use crate::error::{Error, Result};

/// `N(U, b)` at each breakpoint `b` of the class, with an exactness flag.
///
/// `N(U, .)` is constant on `[b_i, b_{i+1})`.
pub fn covering_profile(class: &FiniteClass, u: RowSet) -> Result<Vec<(f64, usize, bool)>> {
    class.breakpoints().into_iter().map(|b| cover(class, u, b, Centers::All).map(|c| (b, c.size, c.exact))).collect()
}

/// `Phi(U) = int_0^{diam(H)} log2 N(U, eps) d eps`, integrated exactly over the
/// breakpoint partition.
pub fn entropy_potential(class: &FiniteClass, u: RowSet) -> Result<f64> {
    entropy_potential_window(class, u, 0.0, class.diam())
}

/// The same integral restricted to `[lo, hi]`.
pub fn entropy_potential_window(class: &FiniteClass, u: RowSet, lo: f64, hi: f64) -> Result<f64> {
    Ok(potential_report(class, u, lo, hi)?.0)
}

/// Value and whether every covering number used was exact.
pub fn potential_report(class: &FiniteClass, u: RowSet, lo: f64, hi: f64) -> Result<(f64, bool)> {
    if u.is_empty() {
        return Err(Error::Domain("potential of an empty set".into()));
    }
    if !(lo <= hi) {
        return Err(Error::Domain(format!("empty window [{lo}, {hi}]")));
    }
    if u.len() == 1 {
        return Ok((0.0, true));
    }
    let profile = covering_profile(class, u)?;
    let mut total = 0.0;
    let mut exact = true;
    for (i, &(b, n, ex)) in profile.iter().enumerate() {
        let start = if i == 0 { 0.0 } else { b };
        let end = profile.get(i + 1).map_or(f64::INFINITY, |p| p.0);
        let (a, z) = (start.max(lo), end.min(hi));
        if z > a && n > 1 {
            total += (z - a) * (n as f64).log2();
            exact &= ex;
        }
    }
    Ok((total, exact))
}

/// One tested scale of a cover-split check.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitRow {
    pub eps: f64,
    pub n: usize,
    pub n0: usize,
    pub n1: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitReport {
    pub gamma: f64,
    pub rows: Vec<SplitRow>,
    pub violations: Vec<SplitRow>,
}

/// Checks `N(U, eps) >= N(U_0, eps) + N(U_1, eps)` for the grid scales below
/// `gamma / (2c)`, where `U_b` are the rows of `u` labelled `s_b` at `x`.
pub fn check_cover_split(
    class: &FiniteClass,
    u: RowSet,
    node: (usize, f64, f64),
    eps_grid: &[f64],
) -> Result<SplitReport> {
    let (x, s0, s1) = node;
    let u0 = class.restrict(u, x, s0);
    let u1 = class.restrict(u, x, s1);
    if u0.is_empty() || u1.is_empty() {
        return Err(Error::Precondition(format!("node ({x}, {s0}, {s1}) has an empty child version space")));
    }
    let gamma = class.loss().evaluate(s0, s1)?;
    let limit = gamma / (2.0 * class.loss().c());
    let mut rows = Vec::new();
    for &eps in eps_grid.iter().filter(|&&e| e > 0.0 && e < limit) {
        rows.push(SplitRow {
            eps,
            n: cover(class, u, eps, Centers::All)?.size,
            n0: cover(class, u0, eps, Centers::All)?.size,
            n1: cover(class, u1, eps, Centers::All)?.size,
        });
    }
    let violations = rows.iter().filter(|r| r.n < r.n0 + r.n1).cloned().collect();
    Ok(SplitReport { gamma, rows, violations })
}

/// `k` evenly spaced scales strictly inside `(0, gamma / (2c))`.
pub fn admissible_grid(gamma: f64, c: f64, k: usize) -> Vec<f64> {
    let limit = gamma / (2.0 * c);
    (1..=k).map(|i| limit * i as f64 / (k + 1) as f64).collect()
}
