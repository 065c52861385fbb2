//! File formats, parallel suite runs and the command line for `sepdet-core`.

// `!(x >= 0.0)` is deliberate: it rejects NaN along with negative values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod descriptor;
pub mod parallel;
pub mod pinned;

pub use cli::run_cli;
