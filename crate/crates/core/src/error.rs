use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("density matrix trace {trace} differs from 1 by more than {tol:e}")]
    TraceViolation { trace: f64, tol: f64 },

    #[error("state ({x}, {y}, {z}) has norm {norm} outside the admissible ball")]
    AdmissibilityViolation { x: f64, y: f64, z: f64, norm: f64 },

    #[error("invalid model parameters: {}", .0.join("; "))]
    InvalidParams(Vec<String>),

    #[error("unknown parameter `{name}` for model kind {kind}")]
    UnknownParam { kind: &'static str, name: String },

    #[error("operation not supported for model kind {0}")]
    UnsupportedKind(&'static str),

    #[error("step limit of {max_steps} exceeded at t = {t}")]
    StepLimitExceeded { max_steps: usize, t: f64 },

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("no limit cycle detected: {0}")]
    NoCycleDetected(String),
}

pub type Result<T> = std::result::Result<T, Error>;
