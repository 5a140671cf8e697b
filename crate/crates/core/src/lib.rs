//! Forward-osmosis water flux prediction with a mechanistic transport model,
//! a Gaussian-process residual corrector and Delta-method input uncertainty.

// Negated comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod data;
pub mod gpr;
pub mod hybrid;
pub mod linalg;
pub mod metrics;
pub mod physics;
pub mod registry;
pub mod seeding;
pub mod uq;
