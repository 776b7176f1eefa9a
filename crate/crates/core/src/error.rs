use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("polynomial vanishes at the hyperbolicity direction")]
    ZeroAtDirection,

    #[error("coefficient {index} has imaginary residue {residue:e} (real part {real:e})")]
    ImaginaryResidue { index: usize, residue: f64, real: f64 },

    #[error("leading coefficient is zero")]
    ZeroLeadingCoefficient,

    #[error("restriction is not numerically hyperbolic: root {re:e}{im:+e}i of {coeffs:?}")]
    NonRealRoot { re: f64, im: f64, coeffs: Vec<f64> },

    #[error("root finder failed on {0:?}")]
    RootFinder(Vec<f64>),

    #[error("point is not on the cone boundary (lambda_min = {lambda_min:e})")]
    NotOnBoundary { lambda_min: f64 },

    #[error("conjugate vector unavailable: {0}")]
    ConjugateFailure(String),

    #[error("eigenvalues are not distinct (gap {gap:e})")]
    RepeatedEigenvalues { gap: f64 },

    #[error("cone oracle returned an invalid result: {0}")]
    OracleViolation(String),

    #[error("iteration {iteration}: {source}")]
    AtIteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("no c_D certified within {doublings} doublings (last tried {last})")]
    CdExhausted { doublings: usize, last: f64 },

    #[error("instance generation failed: {0}")]
    InstanceGeneration(String),

    #[error("smoothing failed: {0}")]
    Smoothing(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by malformed or out-of-contract input, as opposed
    /// to numerical breakdown.
    pub fn is_invalid_input(&self) -> bool {
        match self {
            Error::DimensionMismatch { .. }
            | Error::InvalidPolynomial(_)
            | Error::InvalidArgument(_)
            | Error::ZeroAtDirection
            | Error::ZeroLeadingCoefficient
            | Error::NotOnBoundary { .. }
            | Error::RepeatedEigenvalues { .. }
            | Error::InstanceGeneration(_)
            | Error::Io(_)
            | Error::Json(_)
            | Error::Csv(_) => true,
            Error::AtIteration { source, .. } => source.is_invalid_input(),
            _ => false,
        }
    }

    pub(crate) fn at(self, iteration: usize) -> Error {
        Error::AtIteration { iteration, source: Box::new(self) }
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

pub(crate) fn check_finite(x: &[f64], what: &str) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{what} contains non-finite entries")))
    }
}
