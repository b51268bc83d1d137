use thiserror::Error;

/// Errors raised by the numeric kernels, the synthesizers and the file formats.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not real orthogonal (max row-dot deviation {deviation:.3e}, max imaginary part {imag:.3e})")]
    NotOrthogonal { deviation: f64, imag: f64 },

    #[error("determinant {found:.12} is not the required {expected:+}")]
    WrongDeterminant { expected: f64, found: f64 },

    #[error("eigensolver did not converge: {0}")]
    NoConvergence(String),

    #[error("Pauli terms {0} and {1} do not commute")]
    NonCommutingTerms(String, String),

    #[error("matrix is not in the abelian subgroup (off-diagonal residual {residual:.3e})")]
    NotInAbelianGroup { residual: f64 },

    #[error("Cartan factorization residual {residual:.3e} exceeds tolerance ({context})")]
    FactorizationResidual { residual: f64, context: String },

    #[error("local factor is not a tensor product (residual {residual:.3e})")]
    ProductRepairFailed { residual: f64 },

    #[error("qubit index {index} is out of range for a {width}-qubit circuit")]
    BadQubitIndex { index: usize, width: usize },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unsupported mode: {0}")]
    UnsupportedMode(String),

    #[error("invalid involution: {0}")]
    InvalidInvolution(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// Process exit status used by the command-line tools: 2 for rejected input,
    /// 3 for an internal factorization failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NoConvergence(_)
            | Error::NotInAbelianGroup { .. }
            | Error::FactorizationResidual { .. }
            | Error::ProductRepairFailed { .. }
            | Error::InvalidInvolution(_)
            | Error::NonCommutingTerms(..) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
