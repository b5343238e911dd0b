use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("eigensolver did not converge within its iteration budget")]
    NonConvergence,
    #[error("value is not an eigenvalue (final residual {residual:.3e})")]
    NotAnEigenvalue { residual: f64 },
    #[error("matrix is not antisymmetric (|X + X^T| = {0:.3e})")]
    NotAntisymmetric(f64),
    #[error("matrix is not positive semi-definite (eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("invalid label: {0}")]
    InvalidLabel(String),
    #[error("coupling is not decomposable: {0}")]
    NotDecomposable(String),
    #[error("unsupported coupling: {0}")]
    UnsupportedCoupling(String),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("unsupported label: {0}")]
    UnsupportedLabel(String),
    #[error("spinor norm vanishes")]
    ZeroNorm,
    #[error("point is not in the bounded domain: {0}")]
    OutsideDomain(String),
    #[error("expected rank 2, found rank {0}")]
    NotRank2(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
