use thiserror::Error;

/// Errors raised by mesh construction, thermodynamics and time integration.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HtcError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("mesh inversion: cell {cell} has signed area {area:e}")]
    MeshInversion { cell: usize, area: f64 },

    #[error("degenerate node fan at node {node}: total corner-normal length is zero")]
    DegenerateFan { node: usize },

    #[error("inadmissible state in cell {cell}: {reason}")]
    Inadmissible { cell: usize, reason: String },

    #[error("non-finite compatibility correction at node {node} (nu = {nu:e}, delta = {delta:e})")]
    NonFiniteAlpha { node: usize, nu: f64, delta: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("boundary configuration: {0}")]
    Boundary(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The message already contains the inner error, so it is not exposed as a source.
    #[error("{context}: {inner}")]
    Context { context: String, inner: Box<HtcError> },

    #[error("i/o: {0}")]
    Io(String),
}

impl HtcError {
    /// Wraps the error with a short location string, e.g. `step 12 (t = 0.3), stage 4`.
    pub fn context(self, context: impl Into<String>) -> Self {
        HtcError::Context {
            context: context.into(),
            inner: Box::new(self),
        }
    }

    /// The innermost error, with all context layers removed.
    pub fn root(&self) -> &HtcError {
        match self {
            HtcError::Context { inner, .. } => inner.root(),
            e => e,
        }
    }
}

impl From<std::io::Error> for HtcError {
    fn from(e: std::io::Error) -> Self {
        HtcError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, HtcError>;
