use thiserror::Error;

use crate::space::MetricViolation;

/// Everything that can go wrong across the crate.  Numerically *expected*
/// outcomes (an infeasible program, an infinite penalty value) are not errors;
/// they are encoded in the result types of the operations that produce them.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("metric validation failed with {} violation(s); first: {}", .0.len(), .0[0])]
    InvalidMetric(Vec<MetricViolation>),

    #[error("distance matrix is {rows}x{cols}, expected square of side {expected}")]
    BadMatrixShape {
        rows: usize,
        cols: usize,
        expected: usize,
    },

    #[error("objects live on different spaces ({context})")]
    SpaceMismatch { context: String },

    #[error("length mismatch ({context}): expected {expected}, got {got}")]
    LengthMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid measure: {reason}")]
    InvalidMeasure { reason: String },

    #[error("scenario set is empty; the induced utility is undefined")]
    EmptyScenarioSet,

    #[error("vertex enumeration supports at most {max} points, space has {got}")]
    Capacity { max: usize, got: usize },

    #[error("simplex iteration limit ({0}) exceeded")]
    IterationLimit(usize),

    #[error("sequence not stationary at point `{point}` within horizon {horizon}")]
    StationarityNotReached { point: String, horizon: usize },

    #[error(
        "utility values along the sequence increase at step {step}: {prev} -> {next} (tolerance {tol})"
    )]
    MonotonicityViolation {
        step: usize,
        prev: f64,
        next: f64,
        tol: f64,
    },

    #[error("approach sequence does not converge to a boundary point: {reason}")]
    NonConvergentApproach { reason: String },

    #[error(
        "no continuous extension: tail values vary by {gap} near the boundary (tolerance {tol})"
    )]
    NoContinuousExtension { gap: f64, tol: f64 },

    #[error("ball around `{center}` swallows the whole space; bump undefined")]
    DegenerateBall { center: String },

    #[error("operation requires a coherent utility, got a {got} one")]
    NotCoherent { got: &'static str },

    #[error("unresolved reference `{reference}`: {reason}")]
    UnresolvedReference { reference: String, reason: String },

    #[error("malformed input{}: {reason}", .path.as_ref().map(|p| format!(" in {p}")).unwrap_or_default())]
    Format {
        path: Option<String>,
        reason: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Shorthand used all over the crate for precondition failures.
    pub fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }

    pub fn space_mismatch(context: impl Into<String>) -> Self {
        Error::SpaceMismatch {
            context: context.into(),
        }
    }
}
