use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("function is not symmetric: f({k}) = {plus}, f(-{k}) = {minus}")]
    SymmetryViolation { k: i64, plus: f64, minus: f64 },

    #[error("quadrature tolerance not met: estimate {estimate:e}, error {error:e} after {subdivisions} subdivisions")]
    ToleranceNotMet {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("size cap exceeded: {requested} > {cap}")]
    SizeCapExceeded { requested: usize, cap: usize },

    #[error("matrix is not positive semidefinite (pivot {pivot:e} at row {row}) even with jitter {jitter:e}")]
    NotPsd { row: usize, pivot: f64, jitter: f64 },

    #[error("assumption violated: {0}")]
    AssumptionViolated(String),

    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("series too short: need at least {need} points, got {got}")]
    TooShort { need: usize, got: usize },

    #[error("variation is not positive ({0:e})")]
    NonPositiveVariation(f64),

    #[error("singular linear system at row {0}")]
    SingularSystem(usize),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Failures of numerical machinery, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ToleranceNotMet { .. }
                | Error::Divergent(_)
                | Error::NotPsd { .. }
                | Error::SingularSystem(_)
                | Error::NonPositiveVariation(_)
        )
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}
