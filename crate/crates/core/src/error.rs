use thiserror::Error;

/// Errors raised by the generalized-inverse routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GinvError {
    /// Empty matrix or non-finite entries.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("shape mismatch in {op}: {detail}")]
    Shape { op: &'static str, detail: String },

    /// The inputs violate a mathematical hypothesis (e.g. `W = 0`).
    #[error("{0}")]
    Domain(String),

    #[error("group inverse requires index <= 1, found index {index}")]
    Index { index: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Two subspaces that should be complementary are not.
    #[error("geometry error: {0}")]
    Geometry(String),

    /// A constructed decomposition failed its reassembly or structure check.
    #[error("decomposition check failed ({what}): residual {residual:e}")]
    Decomposition { what: &'static str, residual: f64 },

    #[error("bordering failed: {0}")]
    Bordering(String),

    #[error("size {size} exceeds the determinant route limit {limit}")]
    Capacity { size: usize, limit: usize },
}

pub type Result<T> = std::result::Result<T, GinvError>;

pub(crate) fn shape_err(op: &'static str, detail: impl Into<String>) -> GinvError {
    GinvError::Shape {
        op,
        detail: detail.into(),
    }
}
