//! Seeded Monte-Carlo experiments for log-concave and stable laws.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod logconcave;
pub mod polynomial;
pub mod report;
pub mod sampling;
pub mod stable;

pub use report::{ConcentrationReport, Curve};
pub use sampling::{Estimate, Samples};
