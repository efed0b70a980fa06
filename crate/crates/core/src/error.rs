//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by parsing, evaluation and the geometric constructions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("chart mismatch: {0}")]
    ChartMismatch(String),
    #[error("degree overflow: {0}")]
    DegreeOverflow(String),
    #[error("degree underflow: {0}")]
    DegreeUnderflow(String),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("not contact at {point:?}")]
    NotContact { point: Vec<f64> },
    #[error("conformal factor vanishes at {point:?}")]
    VanishingConformalFactor { point: Vec<f64> },
    #[error("not homogeneous: residual {residual:e}")]
    NotHomogeneous { residual: f64 },
    #[error("not projectable: residual {residual:e}")]
    NotProjectable { residual: f64 },
    #[error("not Poisson: residual {residual:e}")]
    NotPoisson { residual: f64 },
    #[error("not Jacobi: residual {residual:e}")]
    NotJacobi { residual: f64 },
    #[error("not a cocycle: residual {residual:e}")]
    NotCocycle { residual: f64 },
    #[error("invalid algebroid: {0}")]
    InvalidAlgebroid(String),
    #[error("path left the chart domain at t = {time}")]
    LeftDomain { time: f64 },
    #[error("grid too coarse: {got} intervals, need at least {min}")]
    GridTooCoarse { got: usize, min: usize },
    #[error("endpoint mismatch: distance {distance:e}")]
    EndpointMismatch { distance: f64 },
    #[error("invalid homotopy family: {0}")]
    InvalidFamily(String),
    #[error("sweep is not closed: {0}")]
    NotClosedSweep(String),
    #[error("invalid A-path: residual {residual:e}")]
    InvalidAPath { residual: f64 },
    #[error("a(r) not positive at r = {r}")]
    NotPositive { r: f64 },
    #[error("radius {r} outside (0, {r_max}]")]
    OutOfRange { r: f64, r_max: f64 },
    #[error("empty period data")]
    EmptyData,
    #[error("degenerate leaf: {0}")]
    DegenerateLeaf(String),
    #[error("not multiplicative: residual {residual:e} at {pair:?}")]
    NotMultiplicative { residual: f64, pair: Vec<f64> },
    #[error("cochain not normalized: residual {residual:e}")]
    NotNormalized { residual: f64 },
    #[error("not composable: base mismatch {distance:e}")]
    NotComposable { distance: f64 },
    #[error("not in group: 1 + λ(v) = {value}")]
    NotInGroup { value: f64 },
    #[error("singular matrix")]
    Singular,
}

pub type Result<T> = std::result::Result<T, Error>;
