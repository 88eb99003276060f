use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration value; `path` is the dotted field path.
    #[error("configuration error at `{path}`: {message}")]
    Config { path: String, message: String },

    /// An operation was called with arguments outside its contract.
    #[error("usage error: {0}")]
    Usage(String),

    /// Eigenvalues left the admissible set of the operator branch.
    #[error(
        "admissibility error{}: eigenvalue {value} violates {branch} bound (λ must exceed {bound}); eigenvalues {eigenvalues:?}",
        node.map(|n| format!(" at node {n}")).unwrap_or_default()
    )]
    Admissibility {
        node: Option<usize>,
        branch: &'static str,
        value: f64,
        bound: f64,
        eigenvalues: Vec<f64>,
    },

    /// Boundary Newton solve or the enclosing fixed-point sweep did not converge.
    #[error("boundary enforcement failed at node {node}: residual {residual:e}")]
    BoundaryEnforcement { node: usize, residual: f64 },

    /// The boundary condition lost obliqueness.
    #[error("degenerate boundary condition at node {node}: obliqueness {obliqueness:e}")]
    Degenerate { node: usize, obliqueness: f64 },

    /// No finite-difference stencil fits inside the domain at this node.
    #[error("no admissible stencil at node {node}: {reason}")]
    Stencil { node: usize, reason: String },

    /// A stepped value became NaN or infinite.
    #[error("non-finite value at node {node} (t = {t})")]
    NonFinite { node: usize, t: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}
