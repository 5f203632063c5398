//! Covering numbers, entropy potentials and scaled trees on finite classes.

pub mod bounds;
mod class;
mod cover;
mod dimension;
mod divergence;
mod potential;
mod tree;

pub use bounds::*;
pub use class::{cube_class, hypercube_class, FiniteClass, RowSet, MAX_ROWS, MERGE_TOL};
pub use cover::{brute_force_covering_number, cover, covering_number, Centers, Cover, EXACT_LIMIT};
pub use dimension::{online_dim_lower_bound, online_dim_lower_bound_with_budget, DEFAULT_BUDGET, MAX_SEARCH_DEPTH};
pub use divergence::{divergence_example, BlockClass, Divergence, MAX_MATERIALIZED, MAX_TRUNCATION};
pub use potential::{
    admissible_grid, check_cover_split, covering_profile, entropy_potential, entropy_potential_window,
    potential_report, SplitReport, SplitRow,
};
pub use tree::{greedy_branch_descent, Descent, ScaledTree, TreeNode, DROP_TOL};
