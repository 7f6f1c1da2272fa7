use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |H - H^dagger| = {residual:e})")]
    NonHermitian { residual: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("negative eigenvalue {0:e} below the numerical floor")]
    NegativeEigenvalue(f64),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("bad parameter: {0}")]
    BadParameter(String),

    #[error("bad partition: {0}")]
    BadPartition(String),

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("optimizer did not converge after {iterations} iterations (best value {best_value})")]
    NotConverged {
        iterations: usize,
        best_value: f64,
        best_point: Vec<f64>,
    },
}

impl Error {
    pub(crate) fn dims(expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
