use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("resolution too small: {0}")]
    ResolutionTooSmall(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("boundary node off ∂M: node {node}, |Φ(u)| = {residual:.3e}")]
    BoundaryOffAmbient { node: usize, residual: f64 },
    #[error("degenerate metric at node {node}: e^(2λ) = {value:.3e}")]
    DegenerateMetric { node: usize, value: f64 },
    #[error("frame orientation check failed at node {node}: {what}")]
    FrameOrientation { node: usize, what: String },
    #[error("frame inconsistency at boundary node {node}: |⟨ν̂,n⟩| = {value}")]
    FrameInconsistency { node: usize, value: f64 },
    #[error("boundary tangency violated: max |⟨v,N⟩| = {0:.3e}")]
    TangencyViolation(f64),
    #[error("family leaves M or radius exceeded: {0}")]
    FamilyOutOfRange(String),
    #[error("step underflow: {0:.3e}")]
    StepUnderflow(f64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("factorization failed: {0}")]
    Factorization(String),
    #[error("solver did not converge after {iterations} iterations: {what}")]
    NonConvergence { iterations: usize, what: String },
    #[error("degenerate triangle {0}")]
    DegenerateTriangle(usize),
    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
