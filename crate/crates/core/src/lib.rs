//! Witness-closure engine for separably determined quantities on metric spaces.
//!
//! Given a witness problem (a region map `G(x, p)` into tuples of points and a
//! score `Φ((x, p), u)`), [`scheme::closure_iterate`] grows a seed set by
//! inserting the components of optimal witnesses until it reaches a fixed
//! point `Y`. On such a `Y`, suprema (or infima) of the score restricted to
//! tuples from `Y` agree with the full-space values. The [`functionals`]
//! module provides the concrete variational quantities (difference-quotient
//! suprema, Lipschitz modulus, torus suprema, slopes) and the [`harness`]
//! module checks the agreement exhaustively on random finite spaces.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
// `!(x > 0.0)` is deliberate: it rejects NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod ext_real;
pub mod families;
pub mod function;
pub mod functionals;
pub mod harness;
pub mod metric;
pub mod region;
pub mod rich;
pub mod scheme;

pub use error::{AxiomViolation, Error};
pub use ext_real::ExtReal;
pub use function::{ClosedForm, FunctionOracle, ProductFunction, Shape, Tabulated};
pub use metric::{FiniteSpace, LazySpace, MetricSpace, Point, PointId, PointSet, ProductSpace};
pub use region::Region;
pub use scheme::{
    ClosureConfig, DeterminacyCheck, GeneratedSubspace, Mode, Param, ParamSpace, Truncation, Verdict, WitnessProblem,
};

/// Slack used when comparing floating point quantities that are not produced by
/// the same sequence of operations (metric axiom validation, Lipschitz checks).
pub const COMPARE_TOL: f64 = 1e-12;
