use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Location-tagged failure from the expression parser.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub found: String,
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at {}:{}: found {}, expected one of [{}]",
            self.line,
            self.column,
            self.found,
            self.expected.join(", ")
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {point} lies outside the chart domain ({reason})")]
    Domain { point: String, reason: String },

    #[error("division by zero while evaluating {0}")]
    SingularEval(String),

    #[error("coordinate t{index} requested but the base point has dimension {dim}")]
    Dimension { index: usize, dim: usize },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("Hermitian metric is not positive definite")]
    SingularMetric,

    #[error("Gram matrix is degenerate (condition number {condition:.3e})")]
    DegenerateGram { condition: f64 },

    #[error("endomorphism is not nilpotent")]
    NotNilpotent,

    #[error("bundle is not flat (residual {residual:.3e})")]
    NotFlat { residual: f64 },

    #[error("no orthogonal strict grading exists for the Jordan levels (defect {defect:.3e})")]
    NotRepresentable { defect: f64 },

    #[error("bundle validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
