use super::class::{FiniteClass, RowSet};
use crate::error::{Error, Result};

/// Classes with at most this many rows get an exact covering number.
pub const EXACT_LIMIT: usize = 24;

/// Where cover centers may come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Centers {
    /// Any row of the class.
    #[default]
    All,
    /// Only rows of the set being covered.
    Subset,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cover {
    pub size: usize,
    /// Rows used as centers.
    pub centers: Vec<usize>,
    /// Whether `size` is certified minimal.
    pub exact: bool,
    /// Disjoint-packing lower bound on the minimum.
    pub lower_bound: usize,
}

/// Minimum number of centers within `eps` of every row of `u`.
///
/// Exact for classes of up to [`EXACT_LIMIT`] rows; larger classes get the
/// greedy size, which is still exact when it meets the packing lower bound.
pub fn covering_number(class: &FiniteClass, u: RowSet, eps: f64) -> Result<usize> {
    cover(class, u, eps, Centers::All).map(|c| c.size)
}

pub fn cover(class: &FiniteClass, u: RowSet, eps: f64, centers: Centers) -> Result<Cover> {
    if u.is_empty() {
        return Err(Error::Domain("cannot cover an empty set".into()));
    }
    if !u.is_subset(class.all()) {
        return Err(Error::Domain("set contains rows outside the class".into()));
    }
    let pool = match centers {
        Centers::All => class.all(),
        Centers::Subset => u,
    };
    let sets: Vec<(usize, RowSet)> =
        pool.iter().map(|s| (s, RowSet::from_rows(u.iter().filter(|&v| class.dist(s, v) <= eps)))).collect();
    let sets = prune(sets);
    let greedy = greedy_cover(&sets, u);
    let lb = packing_bound(&sets, u);
    if greedy.len() == lb {
        return Ok(Cover { size: lb, centers: greedy, exact: true, lower_bound: lb });
    }
    if class.n() > EXACT_LIMIT {
        return Ok(Cover { size: greedy.len(), centers: greedy, exact: false, lower_bound: lb });
    }
    let mut best = greedy;
    let mut chosen = Vec::new();
    branch(&sets, u, &mut chosen, &mut best);
    Ok(Cover { size: best.len(), centers: best, exact: true, lower_bound: lb })
}

/// Drops empty, duplicate and dominated coverage sets, keeping the lowest
/// center index among equals.
fn prune(mut sets: Vec<(usize, RowSet)>) -> Vec<(usize, RowSet)> {
    sets.retain(|(_, s)| !s.is_empty());
    sets.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then(a.0.cmp(&b.0)));
    let mut kept: Vec<(usize, RowSet)> = Vec::new();
    for (c, s) in sets {
        if !kept.iter().any(|(_, k)| s.is_subset(*k)) {
            kept.push((c, s));
        }
    }
    kept
}

fn greedy_cover(sets: &[(usize, RowSet)], u: RowSet) -> Vec<usize> {
    let mut left = u;
    let mut out = Vec::new();
    while !left.is_empty() {
        let (c, s) = sets
            .iter()
            .max_by(|a, b| (a.1 & left).len().cmp(&(b.1 & left).len()).then(b.0.cmp(&a.0)))
            .expect("every row covers itself");
        out.push(*c);
        left = left & !*s;
    }
    out
}

/// Size of a set of uncovered rows no two of which share a covering set.
fn packing_bound(sets: &[(usize, RowSet)], left: RowSet) -> usize {
    let mut pool = left;
    let mut count = 0;
    while !pool.is_empty() {
        // the row with the fewest covering sets removes the least from the pool
        let v = pool.iter().min_by_key(|&v| sets.iter().filter(|(_, s)| s.contains(v)).count()).unwrap();
        let reach = sets.iter().filter(|(_, s)| s.contains(v)).fold(RowSet::EMPTY, |m, (_, s)| m | *s);
        pool = pool & !reach & !RowSet::singleton(v);
        count += 1;
    }
    count
}

fn branch(sets: &[(usize, RowSet)], left: RowSet, chosen: &mut Vec<usize>, best: &mut Vec<usize>) {
    if left.is_empty() {
        if chosen.len() < best.len() {
            *best = chosen.clone();
        }
        return;
    }
    if chosen.len() + packing_bound(sets, left) >= best.len() {
        return;
    }
    // branch on the row with the fewest options
    let v = left.iter().min_by_key(|&v| sets.iter().filter(|(_, s)| s.contains(v)).count()).unwrap();
    let mut options: Vec<&(usize, RowSet)> = sets.iter().filter(|(_, s)| s.contains(v)).collect();
    options.sort_by(|a, b| (b.1 & left).len().cmp(&(a.1 & left).len()).then(a.0.cmp(&b.0)));
    for (c, s) in options {
        chosen.push(*c);
        branch(sets, left & !*s, chosen, best);
        chosen.pop();
    }
}

/// Brute-force minimum cover by enumerating center subsets; for tests on tiny classes.
pub fn brute_force_covering_number(class: &FiniteClass, u: RowSet, eps: f64) -> usize {
    let n = class.n();
    assert!(n <= 16, "brute force is limited to 16 rows");
    (1u32..1 << n)
        .filter(|mask| u.iter().all(|v| (0..n).any(|s| mask >> s & 1 == 1 && class.dist(s, v) <= eps)))
        .map(|mask| mask.count_ones() as usize)
        .min()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::class::cube_class;
    use crate::losses::Loss;

    fn pair(gap: f64) -> FiniteClass {
        FiniteClass::new(vec![vec![0.0], vec![gap]], Loss::absolute()).unwrap()
    }

    #[test]
    fn examples() {
        let c = pair(0.5);
        assert_eq!(covering_number(&c, c.all(), 0.6).unwrap(), 1);
        assert_eq!(covering_number(&c, c.all(), 0.4).unwrap(), 2);
        let c = cube_class();
        assert_eq!(covering_number(&c, c.all(), 0.3).unwrap(), 4);
        assert_eq!(covering_number(&c, c.all(), 1.0).unwrap(), 1);
        assert!(covering_number(&c, RowSet::EMPTY, 0.3).is_err());
    }

    #[test]
    fn centers_from_outside_the_subset() {
        // row 1 sits between rows 0 and 2
        let c = FiniteClass::new(vec![vec![0.0], vec![0.5], vec![1.0]], Loss::absolute()).unwrap();
        let u = RowSet::from_rows([0, 2]);
        assert_eq!(covering_number(&c, u, 0.5).unwrap(), 1);
        assert_eq!(cover(&c, u, 0.5, Centers::Subset).unwrap().size, 2);
    }

    #[test]
    fn greedy_is_not_always_optimal() {
        // points on a line where greedy picks the middle first
        let vals: Vec<Vec<f64>> = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0].iter().map(|v| vec![*v]).collect();
        let c = FiniteClass::new(vals, Loss::absolute()).unwrap();
        for eps in [0.0, 0.5, 1.0, 1.5, 2.0, 3.0] {
            assert_eq!(covering_number(&c, c.all(), eps).unwrap(), brute_force_covering_number(&c, c.all(), eps));
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn class_strategy() -> impl Strategy<Value = FiniteClass> {
            (2usize..=12, 1usize..=4).prop_flat_map(|(n, m)| {
                proptest::collection::vec(proptest::collection::vec(0u8..=4, m), n).prop_map(|rows| {
                    let values = rows.into_iter().map(|r| r.into_iter().map(|v| v as f64 / 4.0).collect()).collect();
                    FiniteClass::new(values, Loss::absolute()).unwrap()
                })
            })
        }

        proptest! {
            #[test]
            fn greedy_within_log_factor(c in class_strategy(), k in 0usize..5) {
                let eps = k as f64 / 4.0;
                let u = c.all();
                let exact = covering_number(&c, u, eps).unwrap();
                let sets: Vec<(usize, RowSet)> = u
                    .iter()
                    .map(|s| (s, RowSet::from_rows(u.iter().filter(|&v| c.dist(s, v) <= eps))))
                    .collect();
                let greedy = greedy_cover(&sets, u).len();
                prop_assert!(exact <= greedy);
                prop_assert!(greedy as f64 <= exact as f64 * (1.0 + (c.n() as f64).ln()) + 1e-12);
                prop_assert_eq!(exact, brute_force_covering_number(&c, u, eps));
                prop_assert!(packing_bound(&prune(sets), u) <= exact);
            }
        }
    }
}
