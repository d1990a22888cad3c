use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension {0}: polynomials need at least one variable")]
    InvalidDimension(usize),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("polynomial is not homogeneous{}", expected.map(|k| format!(" of degree {k}")).unwrap_or_default())]
    NotHomogeneous { expected: Option<usize> },

    #[error("{0} must be a nonzero polynomial")]
    ZeroPolynomial(&'static str),

    #[error("degree {got} is below the required minimum {min}")]
    DegreeTooLow { got: usize, min: usize },

    #[error("linear system is singular")]
    Singular,

    #[error("linear system is ill-conditioned (estimated condition number {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("singular value decomposition did not converge ({rows}x{cols} matrix)")]
    SvdFailed { rows: usize, cols: usize },

    #[error("root finding failed: residual |p(root)| = {residual:.3e}")]
    RootFinding { residual: f64 },

    #[error("gap hypothesis violated: component of degree {degree} is nonzero (declared gap {beta} < j < {k})")]
    GapViolation { degree: usize, beta: usize, k: usize },

    #[error("matrix side {size} exceeds the configured cap {cap}")]
    SizeCap { size: usize, cap: usize },

    #[error("fit window must span at least {min} degrees (got {got})")]
    WindowTooSmall { got: usize, min: usize },

    #[error("value is not representable in the exact backend: {0}")]
    NotExact(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Numerical failures as opposed to violated preconditions.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Singular
                | Error::IllConditioned { .. }
                | Error::SvdFailed { .. }
                | Error::RootFinding { .. }
        )
    }
}
