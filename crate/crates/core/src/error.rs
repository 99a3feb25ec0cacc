use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("a nonzero root was required but the radicand is zero")]
    ZeroRadicand,

    #[error("operation is undefined for the zero function")]
    ZeroFunction,

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("integration circle |z| = {radius} passes too close to a zero (winding residual {residual:.3})")]
    CircleTooClose { radius: f64, residual: f64 },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("cannot lower expression: {0}")]
    Lowering(String),
}
