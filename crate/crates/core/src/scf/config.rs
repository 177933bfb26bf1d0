use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{
    aufbau_projector, find_gap, projector_below, DensityMatrix, Eigen, DEFAULT_GAP_THRESHOLD,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// Plain iteration `gamma <- F(gamma)`.
    FixedPoint,
    /// Optimal damping: convex steps with the energy-minimising weight.
    Oda,
    /// Fixed point first, restarting with ODA if it fails to converge.
    FixedPointThenOda,
}

/// How the occupied subspace is chosen at every step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MuPolicy {
    /// Occupy every level below a fixed energy.
    Fixed(f64),
    /// Occupy every level below the linear model's mid-gap energy, frozen for
    /// the whole run.
    MidGapOfLinear,
    /// Occupy as many levels as the linear model has below its mid-gap energy
    /// (aufbau with the linear particle number).
    LinearFilling,
    /// Occupy the `n` lowest levels (aufbau).
    ParticleCount(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScfConfig {
    /// Residual threshold in operator norm.
    pub tol: f64,
    pub max_iter: usize,
    pub algorithm: Algorithm,
    pub mu_policy: MuPolicy,
    /// A fixed-point run whose best residual has not improved for this many
    /// iterations is abandoned.
    pub stall_window: usize,
}

impl Default for ScfConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 500,
            algorithm: Algorithm::FixedPoint,
            mu_policy: MuPolicy::LinearFilling,
            stall_window: 25,
        }
    }
}

impl ScfConfig {
    pub fn with_algorithm(mut self, algorithm: Algorithm) -> Self {
        self.algorithm = algorithm;
        self
    }

    pub fn with_mu_policy(mut self, mu_policy: MuPolicy) -> Self {
        self.mu_policy = mu_policy;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter {
                name: "tol",
                reason: format!("must be positive, got {}", self.tol),
            });
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter {
                name: "max_iter",
                reason: "must be at least 1".into(),
            });
        }
        Ok(())
    }
}

/// A `MuPolicy` resolved against the linear spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Occupation {
    Below(f64),
    Lowest(usize),
}

impl Occupation {
    pub fn resolve(policy: MuPolicy, linear: &Eigen) -> Result<Self> {
        Ok(match policy {
            MuPolicy::Fixed(mu) => Occupation::Below(mu),
            MuPolicy::MidGapOfLinear => {
                Occupation::Below(find_gap(&linear.values, None, DEFAULT_GAP_THRESHOLD)?.mu)
            }
            MuPolicy::LinearFilling => Occupation::Lowest(
                find_gap(&linear.values, None, DEFAULT_GAP_THRESHOLD)?.band_index,
            ),
            MuPolicy::ParticleCount(n) => {
                if n > linear.dim() {
                    return Err(Error::InvalidFilling {
                        particles: n,
                        sites: linear.dim(),
                    });
                }
                Occupation::Lowest(n)
            }
        })
    }

    /// Occupied projector of an operator with spectrum `eigen`, and the
    /// chemical potential used.
    pub fn occupy(&self, eigen: &Eigen) -> Result<(DensityMatrix, f64)> {
        match *self {
            Occupation::Below(mu) => Ok((projector_below(eigen, mu)?, mu)),
            Occupation::Lowest(n) => aufbau_projector(eigen, n),
        }
    }

    /// Chemical potential this rule would use for `eigen`, without building the projector.
    pub fn mu(&self, eigen: &Eigen) -> Result<f64> {
        match *self {
            Occupation::Below(mu) => Ok(mu),
            Occupation::Lowest(n) => crate::spectral::aufbau_mu(&eigen.values, n),
        }
    }
}
