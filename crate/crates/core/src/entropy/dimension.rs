use std::collections::HashMap;

use super::class::{FiniteClass, RowSet};
use crate::error::{Error, Result};

/// Deepest tree the exhaustive search accepts.
pub const MAX_SEARCH_DEPTH: usize = 4;

/// Default cap on distinct `(version space, depth)` states visited.
pub const DEFAULT_BUDGET: usize = 2_000_000;

/// Best worst-branch gap sum over realizable trees of depth at most `max_depth`.
///
/// Edge labels range over the values the version space takes at the queried
/// point, so both children are always nonempty.
pub fn online_dim_lower_bound(class: &FiniteClass, max_depth: usize) -> Result<f64> {
    online_dim_lower_bound_with_budget(class, max_depth, DEFAULT_BUDGET)
}

pub fn online_dim_lower_bound_with_budget(class: &FiniteClass, max_depth: usize, budget: usize) -> Result<f64> {
    if max_depth > MAX_SEARCH_DEPTH {
        return Err(Error::Precondition(format!(
            "exhaustive search is limited to depth {MAX_SEARCH_DEPTH}, got {max_depth}"
        )));
    }
    let mut s = Search { class, memo: HashMap::new(), budget, root_best: 0.0, root_depth: max_depth };
    match s.value(class.all(), max_depth) {
        Some(v) => Ok(v),
        None => Err(Error::Resource { message: format!("more than {budget} search states"), partial: s.root_best }),
    }
}

struct Search<'a> {
    class: &'a FiniteClass,
    memo: HashMap<(RowSet, usize), f64>,
    budget: usize,
    root_best: f64,
    root_depth: usize,
}

impl Search<'_> {
    /// `None` once the budget is spent.
    fn value(&mut self, u: RowSet, depth: usize) -> Option<f64> {
        if depth == 0 || u.len() < 2 {
            return Some(0.0);
        }
        if let Some(&v) = self.memo.get(&(u, depth)) {
            return Some(v);
        }
        if self.memo.len() >= self.budget {
            return None;
        }
        let is_root = depth == self.root_depth && u == self.class.all();
        let mut best: f64 = 0.0;
        for x in 0..self.class.m() {
            let labels = self.class.labels_at(u, x);
            if labels.len() < 2 {
                continue;
            }
            let children: Vec<RowSet> = labels.iter().map(|&s| self.class.restrict(u, x, s)).collect();
            for i in 0..labels.len() {
                for j in i + 1..labels.len() {
                    let gamma = self.class.loss().evaluate(labels[i], labels[j]).ok()?;
                    if gamma <= 0.0 {
                        continue;
                    }
                    let a = self.value(children[i], depth - 1)?;
                    if gamma + a <= best {
                        continue;
                    }
                    let b = self.value(children[j], depth - 1)?;
                    best = best.max(gamma + a.min(b));
                    if is_root {
                        self.root_best = best;
                    }
                }
            }
        }
        self.memo.insert((u, depth), best);
        Some(best)
    }
}
