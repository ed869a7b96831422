use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {0} is not strictly inside the unit disk")]
    OutsideDisk(Complex64),

    #[error("point {0} is not in the open right half-plane")]
    OutsideHalfPlane(Complex64),

    #[error("expected a unimodular constant, got modulus {0}")]
    NotUnimodular(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("root finder did not converge (residual {residual:.3e}){context}")]
    RootFinding { residual: f64, context: String },

    #[error("expected {expected} roots inside the disk, found {found}")]
    RootCount { expected: u32, found: u32 },

    #[error("Denjoy-Wolff point not located after {iterations} iterations: {reason}")]
    DenjoyWolff { iterations: usize, reason: String },

    #[error("orbit numerically stationary: |z_(n+1) - z_n| = {0:.3e}")]
    StationaryOrbit(f64),

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("operation not applicable: {0}")]
    NotApplicable(String),

    #[error("too few admissible samples: {found} < {required}; try a different sample ring")]
    TooFewSamples { found: usize, required: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
