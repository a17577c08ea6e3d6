use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid material parameter `{key}`: {reason}")]
    InvalidMaterial { key: &'static str, reason: String },

    #[error("non-physical parameter set: {0}")]
    NonPhysical(String),

    #[error("direction must be a unit vector, got |n| = {0}")]
    NonUnitDirection(f64),

    #[error("eigensolver failed: {0}")]
    Eigen(String),

    #[error("unsupported polynomial degree {degree} (supported: {min}..={max})")]
    UnsupportedDegree { degree: usize, min: usize, max: usize },

    #[error("unsupported quadrature exactness {0}")]
    UnsupportedQuadrature(usize),

    #[error("basis mode {index} out of range (basis has {count} modes)")]
    ModeOutOfRange { index: usize, count: usize },

    #[error("singular resolvent (Z - E*_pp I) for quantity {quantity} at dt = {dt:e}")]
    SingularResolvent { quantity: usize, dt: f64 },

    #[error("invalid time step {0:e}")]
    InvalidTimeStep(f64),

    #[error("singular element map (det = {0:e})")]
    SingularMap(f64),

    #[error("singular space-time system matrix")]
    SingularSystem,

    #[error("non-finite degrees of freedom in element {element} at step {step}")]
    NonFinite { element: usize, step: usize },

    #[error("non-finite values in predictor input")]
    NonFiniteInput,

    #[error("shape mismatch: expected {expected} values, got {actual}")]
    Shape { expected: usize, actual: usize },

    #[error("mesh: {0}")]
    Mesh(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("config key `{key}`: {message}")]
    ConfigValue { key: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Failures of the numerics (as opposed to invalid input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Eigen(_)
                | Error::SingularResolvent { .. }
                | Error::SingularSystem
                | Error::NonFinite { .. }
                | Error::NonFiniteInput
        )
    }
}
