use alloc::string::String;

use crate::metric::PointId;

/// A failed metric axiom, naming the offending points.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AxiomViolation {
    #[error("d({a}, {a}) = {value}, expected 0")]
    NonZeroDiagonal { a: PointId, value: f64 },
    #[error("d({a}, {b}) = {value} is negative or not finite")]
    InvalidDistance { a: PointId, b: PointId, value: f64 },
    #[error("d({a}, {b}) = 0 for distinct points")]
    Coincident { a: PointId, b: PointId },
    #[error("asymmetric pair: d({a}, {b}) = {ab} but d({b}, {a}) = {ba}")]
    Asymmetric { a: PointId, b: PointId, ab: f64, ba: f64 },
    #[error("triangle inequality fails: d({a}, {c}) > d({a}, {b}) + d({b}, {c})")]
    Triangle { a: PointId, b: PointId, c: PointId },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unknown point {0}")]
    UnknownPoint(PointId),
    #[error("unknown point label {0:?}")]
    UnknownLabel(String),
    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("a shell needs 0 < r < s, got r = {inner}, s = {outer}")]
    BadShell { inner: f64, outer: f64 },
    #[error("empty region at point {x}")]
    EmptyRegion { x: PointId },
    #[error("point {0} is isolated at every scale of the grid")]
    IsolatedPoint(PointId),
    #[error("a countable space needs an enumeration budget")]
    MissingBudget,
    #[error("point {0} has no coordinates")]
    NoCoordinates(PointId),
    #[error("coordinate dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("seed set is empty")]
    EmptySeed,
    #[error("point {0} is not in the subspace")]
    NotInSubspace(PointId),
    #[error("sets {0} and {next} do not form an increasing chain", next = .0 + 1)]
    NotAChain(usize),
    #[error("problems or families range over different spaces")]
    SpaceMismatch,
    #[error("a family needs at least one witness operator")]
    EmptyFamily,
    #[error("no fixed point within depth {0}")]
    DepthExceeded(usize),
    #[error("expected a {expected}-mode problem")]
    ModeMismatch { expected: &'static str },
    #[error("function is not proper: {0}")]
    ImproperFunction(&'static str),
    #[error("function table has {found} values, space has {expected} points")]
    TableSize { expected: usize, found: usize },
    #[error("Lipschitz bound in the second variable fails at x = {x}, y' = {y1}, y'' = {y2}")]
    LipschitzViolation { x: PointId, y1: PointId, y2: PointId },
    #[error("parameter does not belong to the problem's parameter space")]
    ForeignParam,
    #[error("invalid suite configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("metric axiom violated: {0}")]
    Axiom(#[from] AxiomViolation),
}
