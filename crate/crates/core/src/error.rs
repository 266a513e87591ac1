use num_complex::Complex64;
use thiserror::Error;

use crate::cxratio::ExtComplex;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero polynomial has no roots")]
    ZeroPolynomial,

    #[error("denominator is identically zero")]
    ZeroDenominator,

    #[error("root finder did not converge (degree {degree}, relative residual {residual:e})")]
    RootsNotConverged { degree: usize, residual: f64 },

    #[error(
        "ambiguous root cluster near {center}: {multiplicity} iterates with spread {spread:e} \
         are within the clustering tolerance but do not form a multiple root"
    )]
    ClusterAmbiguity {
        center: Complex64,
        multiplicity: usize,
        spread: f64,
    },

    #[error("degenerate Möbius transform: ad - bc = 0")]
    DegenerateMobius,

    #[error("{which} is constant; constant Gauss maps give a flat surface in a degenerate 3-space")]
    ConstantGaussMap { which: &'static str },

    #[error("puncture {0} is listed twice")]
    DuplicatePuncture(ExtComplex),

    #[error("{0} is not a puncture of the data")]
    NotAPuncture(ExtComplex),

    #[error("operation needs rational data; {0}")]
    NonRational(&'static str),

    #[error("bad singular end at {0}: total curvature diverges there")]
    BadSingularEnd(ExtComplex),

    #[error("end at {0} is not complete (reduced multiplicity < 1)")]
    IncompleteEnd(ExtComplex),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular point at {0}: the Gauss maps satisfy φ = conj(ψ) there")]
    SingularPoint(Complex64),

    #[error("path meets puncture {0}")]
    PathThroughPuncture(ExtComplex),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("involution structure: {0}")]
    Involution(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("empty mesh")]
    EmptyMesh,

    #[error("malformed data file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
