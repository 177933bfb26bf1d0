use thiserror::Error;

use crate::scf::SolverTrace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("eigenvalue {eigenvalue} lies within {tolerance:e} of the chemical potential {mu}")]
    EigenvalueAtMu {
        mu: f64,
        eigenvalue: f64,
        tolerance: f64,
    },

    #[error("no spectral gap wider than {threshold:e} (largest interior gap {largest:e})")]
    NoGap { largest: f64, threshold: f64 },

    #[error("resolvent is singular: spectral parameter within {distance:e} of the spectrum")]
    ResolventSingular { distance: f64 },

    #[error("gap {gap} too small for a contraction: need gap/2 > 2*||W|| = {twice_norm}")]
    GapTooSmall { gap: f64, twice_norm: f64 },

    #[error("particle number {particles} out of range for {sites} sites")]
    InvalidFilling { particles: usize, sites: usize },

    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    MaxIterExceeded {
        iterations: usize,
        residual: f64,
        trace: Box<SolverTrace>,
    },

    #[error("box is empty")]
    EmptyBox,

    #[error("box {0} is resonant; good-box check requires a non-resonant box")]
    ResonantBox(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors caused by the inputs rather than by the numerics.
    pub fn is_configuration(&self) -> bool {
        matches!(
            self,
            Error::InvalidLattice(_)
                | Error::InvalidParameter { .. }
                | Error::InvalidFilling { .. }
                | Error::DimensionMismatch { .. }
        )
    }
}
