// NaN-rejecting guards are written as `!(x >= lo)` on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::large_enum_variant)]

//! Realizable online regression: learners, adversaries and entropy tools.

pub mod entropy;
pub mod error;
pub mod exec;
pub mod lipschitz;
pub mod losses;
pub mod protocol;
pub mod registry;
pub mod relu;

pub use error::{Error, Result};
