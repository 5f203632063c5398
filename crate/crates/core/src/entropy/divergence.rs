//! A class with infinite potential but bounded online dimension, truncated to
//! `K` points.
//!
//! Point `k` carries `m_k = 2^{2^k}` labels at mutual distance `a_k = 2^{-k}`,
//! chosen independently per point, so two hypotheses are `a_k` apart where
//! `k` is the first point they disagree on.

use super::class::FiniteClass;
use crate::error::{Error, Result};
use crate::losses::{CustomTable, Loss};

/// Largest truncation handled.
pub const MAX_TRUNCATION: usize = 4;

/// Largest truncation that can be tabulated row by row.
pub const MAX_MATERIALIZED: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockClass {
    k: usize,
}

impl BlockClass {
    pub fn truncation(&self) -> usize {
        self.k
    }

    /// `a_i = 2^{-i}`.
    pub fn scale(i: usize) -> f64 {
        2f64.powi(-(i as i32))
    }

    /// `log2 m_i = 2^i`.
    pub fn log2_labels(i: usize) -> f64 {
        2f64.powi(i as i32)
    }

    /// `log2 N(H, eps) = sum_{i <= K, a_i > eps} 2^i`.
    pub fn log2_covering_number(&self, eps: f64) -> f64 {
        (1..=self.k).filter(|&i| Self::scale(i) > eps).map(Self::log2_labels).sum()
    }

    /// `int_lo^hi log2 N(H, eps) d eps`, summed piece by piece.
    pub fn potential_window(&self, lo: f64, hi: f64) -> f64 {
        (1..=self.k)
            .map(|i| {
                let width = (hi.min(Self::scale(i)) - lo.max(0.0)).max(0.0);
                width * Self::log2_labels(i)
            })
            .sum()
    }

    /// Every hypothesis as a row; labels at point `i` are indices into a
    /// shared table where same-point labels sit `a_i` apart and labels of
    /// different points `max(a_i, a_j)` apart (an ultrametric, so `c = 1`).
    pub fn materialize(&self) -> Result<FiniteClass> {
        if self.k > MAX_MATERIALIZED {
            return Err(Error::Resource {
                message: format!("truncation {} has too many rows to tabulate", self.k),
                partial: 0.0,
            });
        }
        let sizes: Vec<usize> = (1..=self.k).map(|i| 1usize << (1usize << i)).collect();
        let offsets: Vec<usize> = sizes
            .iter()
            .scan(0, |acc, s| {
                let o = *acc;
                *acc += s;
                Some(o)
            })
            .collect();
        let total: usize = sizes.iter().sum();
        let block_of: Vec<usize> = (0..self.k).flat_map(|b| std::iter::repeat_n(b + 1, sizes[b])).collect();
        let names = (0..total).map(|l| format!("p{}_{}", block_of[l], l - offsets[block_of[l] - 1])).collect();
        let matrix = (0..total)
            .map(|i| (0..total).map(|j| if i == j { 0.0 } else { Self::scale(block_of[i].min(block_of[j])) }).collect())
            .collect();
        let loss = Loss::custom(CustomTable::new(names, matrix)?, 1.0)?;
        let rows: usize = sizes.iter().product();
        let values = (0..rows)
            .map(|mut r| {
                let mut row = vec![0.0; self.k];
                for p in (0..self.k).rev() {
                    row[p] = (offsets[p] + r % sizes[p]) as f64;
                    r /= sizes[p];
                }
                row
            })
            .collect();
        FiniteClass::new(values, loss)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Divergence {
    pub class: BlockClass,
    /// Potential over `[a_{K+1}, a_1]`: `K - (1 - 2^{-K})`.
    pub phi_partial: f64,
    /// `sum_{k <= K} a_k = 1 - 2^{-K}`.
    pub donl_bound: f64,
}

pub fn divergence_example(k: usize) -> Result<Divergence> {
    if k > MAX_TRUNCATION {
        return Err(Error::Resource { message: format!("truncation {k} exceeds {MAX_TRUNCATION}"), partial: 0.0 });
    }
    if k == 0 {
        return Err(Error::Domain("truncation must be at least 1".into()));
    }
    let class = BlockClass { k };
    // sum_k (a_k - a_{k+1}) sum_{i <= k} log2 m_i
    let phi_partial = (1..=k)
        .map(|j| (BlockClass::scale(j) - BlockClass::scale(j + 1)) * (1..=j).map(BlockClass::log2_labels).sum::<f64>())
        .sum();
    let donl_bound = (1..=k).map(BlockClass::scale).sum();
    Ok(Divergence { class, phi_partial, donl_bound })
}
