use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{lambda} lies in the (numerical) spectrum, condition number {condition:.3e}")]
    Spectrum { lambda: Complex64, condition: f64 },

    #[error("constant {0} is not unimodular")]
    NotUnimodular(Complex64),

    #[error("matrix is not unitary (residual {0:.3e})")]
    NotUnitary(f64),

    #[error("matrix is not a selfadjoint contraction (norm {norm:.6}, asymmetry {asymmetry:.3e})")]
    NotContraction { norm: f64, asymmetry: f64 },

    #[error("state dimension is ambiguous at the rank tolerance: {0}")]
    AmbiguousRank(String),

    #[error("moment sequence cannot be realized: {0}")]
    NotRealizable(String),

    #[error("quadrature did not converge after {subdivisions} subdivisions (error estimate {estimate:.3e})")]
    Quadrature { subdivisions: usize, estimate: f64 },

    #[error("{0} lies on a branch cut")]
    BranchCut(Complex64),

    #[error("{0} is a pole of the Moebius map")]
    Pole(Complex64),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("family evaluation failed at {lambda}: {reason}")]
    Evaluation { lambda: Complex64, reason: String },

    #[error("invalid tolerance: {0}")]
    Tolerance(String),

    #[error("{0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
