//! Symmetric eigendecompositions, spectral projectors, gap detection and
//! resolvent decay probes.
//!
//! Projectors are assembled from a full eigendecomposition rather than a contour
//! integral of the resolvent; for finite matrices the two coincide.

mod decay;
mod density;
mod eigen;
mod gap;

pub use decay::{
    combes_thomas_probe, resolvent, resolvent_column, DecayFit, FIT_ABSOLUTE_FLOOR,
    FIT_MIN_DISTANCE, FIT_NOISE_FLOOR,
};
pub use density::DensityMatrix;
pub use eigen::{eig_symmetric, operator_norm, Eigen};
pub use gap::{all_gaps, find_gap, GapReport, DEFAULT_GAP_THRESHOLD};

use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Minimum distance between the chemical potential and any eigenvalue.
pub const GAP_TOLERANCE: f64 = 1e-8;

/// `1_{< mu}(M)`: projector onto the eigenvectors with eigenvalue below `mu`.
pub fn spectral_projector(m: &DMatrix<f64>, mu: f64) -> Result<DensityMatrix> {
    let eigen = eig_symmetric(m)?;
    projector_below(&eigen, mu)
}

pub fn projector_below(eigen: &Eigen, mu: f64) -> Result<DensityMatrix> {
    if let Some(&closest) = eigen
        .values
        .iter()
        .min_by(|a, b| (*a - mu).abs().total_cmp(&(*b - mu).abs()))
    {
        if (closest - mu).abs() <= GAP_TOLERANCE {
            return Err(Error::EigenvalueAtMu {
                mu,
                eigenvalue: closest,
                tolerance: GAP_TOLERANCE,
            });
        }
    }
    let count = eigen.values.iter().filter(|&&v| v < mu).count();
    Ok(projector_onto_lowest(eigen, count))
}

/// Aufbau filling: projector onto the `particles` lowest eigenvectors and the
/// chemical potential halfway between the last occupied and first empty level.
pub fn aufbau_projector(eigen: &Eigen, particles: usize) -> Result<(DensityMatrix, f64)> {
    let n = eigen.values.len();
    if particles > n {
        return Err(Error::InvalidFilling {
            particles,
            sites: n,
        });
    }
    let mu = aufbau_mu(&eigen.values, particles)?;
    Ok((projector_onto_lowest(eigen, particles), mu))
}

pub fn aufbau_mu(values: &[f64], particles: usize) -> Result<f64> {
    let n = values.len();
    if particles > n || n == 0 {
        return Err(Error::InvalidFilling {
            particles,
            sites: n,
        });
    }
    let mu = match particles {
        0 => values[0] - 1.0,
        p if p == n => values[n - 1] + 1.0,
        p => 0.5 * (values[p - 1] + values[p]),
    };
    if particles > 0
        && particles < n
        && values[particles] - values[particles - 1] <= 2.0 * GAP_TOLERANCE
    {
        return Err(Error::EigenvalueAtMu {
            mu,
            eigenvalue: values[particles],
            tolerance: GAP_TOLERANCE,
        });
    }
    Ok(mu)
}

fn projector_onto_lowest(eigen: &Eigen, count: usize) -> DensityMatrix {
    let n = eigen.values.len();
    let occupied = eigen.vectors.columns(0, count);
    let matrix = if count == 0 {
        DMatrix::zeros(n, n)
    } else {
        occupied * occupied.transpose()
    };
    DensityMatrix::from_parts(matrix, count as f64)
}
