use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::solver::ScfResult;
use crate::error::Result;
use crate::model::{hf_energy, mean_field_operator, HamiltonianMatrix, PairInteraction};
use crate::spectral::{eig_symmetric, find_gap, operator_norm, GapReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub rotations: usize,
    pub angle: f64,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            rotations: 20,
            angle: 1e-3,
            seed: 0,
        }
    }
}

/// Diagnostics of a self-consistent solution. All norms are Frobenius norms
/// (upper bounds on the operator norm) except `fixed_point_residual`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// `||gamma^2 - gamma||`.
    pub projector_defect: f64,
    /// `||[gamma, H_min]|| / ||H_min||`.
    pub relative_commutator: f64,
    /// `||F(gamma) - gamma||` in operator norm.
    pub fixed_point_residual: f64,
    /// Distance of `Tr gamma` to the nearest integer.
    pub trace_defect: f64,
    /// `||H_min - (h + A_eff(gamma))||`.
    pub consistency_defect: f64,
    pub gap: Option<GapReport>,
    /// Energy change under each occupied/empty Givens rotation.
    pub rotation_energy_changes: Vec<f64>,
}

impl VerificationReport {
    pub fn min_rotation_change(&self) -> f64 {
        self.rotation_energy_changes
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// All checks within `tol` (`1e-8` in the acceptance runs).
    pub fn passes(&self, tol: f64) -> bool {
        self.projector_defect <= tol
            && self.relative_commutator <= tol
            && self.fixed_point_residual <= tol
            && self.trace_defect <= 1e-6
            && self.consistency_defect <= tol
            && self.min_rotation_change() >= -tol
    }
}

/// Evaluates the self-consistency conditions and a local-optimality probe:
/// rotating one occupied eigenvector of `H_min` towards an empty one by a
/// small angle must not lower the Hartree-Fock energy beyond second order.
pub fn verify_solution(
    result: &ScfResult,
    h_linear: &HamiltonianMatrix,
    interaction: &PairInteraction,
    options: &VerifyOptions,
) -> Result<VerificationReport> {
    let gamma = result.gamma_min.matrix();
    let h_min = result.h_min.matrix();
    let projector_defect = (gamma * gamma - gamma).norm();
    let h_norm = operator_norm(h_min).max(f64::MIN_POSITIVE);
    let relative_commutator = (gamma * h_min - h_min * gamma).norm() / h_norm;

    let rebuilt = mean_field_operator(h_linear, interaction, gamma)?;
    let consistency_defect = (rebuilt.matrix() - h_min).norm();
    let spectrum = eig_symmetric(rebuilt.matrix())?;
    let (image, mu) = result.occupation.occupy(&spectrum)?;
    let fixed_point_residual = operator_norm(&(image.matrix() - gamma));

    let numeric_trace = gamma.trace();
    let trace_defect = (numeric_trace - numeric_trace.round()).abs();
    let gap = find_gap(&spectrum.values, Some(mu), 0.0).ok();

    let occupied = numeric_trace.round() as usize;
    let n = spectrum.dim();
    let mut rotation_energy_changes = Vec::with_capacity(options.rotations);
    if occupied > 0 && occupied < n {
        let base = hf_energy(gamma, h_linear, interaction)?;
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        let (sin, cos) = options.angle.sin_cos();
        for _ in 0..options.rotations {
            let i = rng.random_range(0..occupied);
            let a = rng.random_range(occupied..n);
            let psi_i = spectrum.vectors.column(i);
            let psi_a = spectrum.vectors.column(a);
            let rotated = psi_i * cos + psi_a * sin;
            let change: DMatrix<f64> = &rotated * rotated.transpose() - psi_i * psi_i.transpose();
            let trial = gamma + change;
            rotation_energy_changes.push(hf_energy(&trial, h_linear, interaction)? - base);
        }
    }

    Ok(VerificationReport {
        projector_defect,
        relative_commutator,
        fixed_point_residual,
        trace_defect,
        consistency_defect,
        gap,
        rotation_energy_changes,
    })
}
