// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod geometry;
pub mod reaction;
pub mod scenarios;
pub mod solver;
pub mod stationary;
