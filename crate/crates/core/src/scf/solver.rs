use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::config::{Algorithm, Occupation, ScfConfig};
use crate::error::{Error, Result};
use crate::model::{hf_energy, mean_field_operator, HamiltonianMatrix, PairInteraction};
use crate::spectral::{eig_symmetric, find_gap, operator_norm, DensityMatrix, Eigen};

/// One solver step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// `||gamma_{n+1} - gamma_n||` in operator norm (fixed point) or
    /// `||gamma' - gamma~||` (ODA).
    pub residual: f64,
    /// Hartree-Fock energy of the iterate after this step.
    pub energy: f64,
    pub mu: f64,
    /// Width of the spectral gap of `H_eff` around `mu`, if any.
    pub gap: Option<f64>,
    /// Mixing weight (1 for plain fixed-point steps).
    pub step: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverTrace {
    pub records: Vec<IterationRecord>,
}

impl SolverTrace {
    pub fn residuals(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.residual).collect()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.energy).collect()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// A self-consistent solution `gamma = 1(H_min)`, `H_min = h + A_eff(gamma)`.
#[derive(Debug, Clone)]
pub struct ScfResult {
    pub gamma_min: DensityMatrix,
    /// Mean-field operator `H_eff(gamma_min)`.
    pub h_min: HamiltonianMatrix,
    /// Eigenpairs of `h_min`.
    pub spectrum: Eigen,
    pub occupation: Occupation,
    /// Chemical potential separating occupied and empty levels of `h_min`.
    pub mu: f64,
    pub trace: SolverTrace,
    pub converged: bool,
    pub iterations: usize,
    /// `||F(gamma_min) - gamma_min||` in operator norm.
    pub fixed_point_residual: f64,
    pub energy: f64,
    pub algorithm: Algorithm,
}

impl ScfResult {
    pub fn particle_number(&self) -> f64 {
        self.gamma_min.trace()
    }
}

/// Solves with the algorithm selected in `config`, starting from the occupied
/// projector of `h_linear`.
pub fn solve(
    h_linear: &HamiltonianMatrix,
    interaction: &PairInteraction,
    config: &ScfConfig,
) -> Result<ScfResult> {
    match config.algorithm {
        Algorithm::FixedPoint => solve_fixed_point(h_linear, interaction, config),
        Algorithm::Oda => solve_oda(h_linear, interaction, config),
        Algorithm::FixedPointThenOda => match solve_fixed_point(h_linear, interaction, config) {
            Err(Error::MaxIterExceeded { .. }) => solve_oda(h_linear, interaction, config),
            other => other,
        },
    }
}

struct Setup {
    occupation: Occupation,
    gamma0: DensityMatrix,
}

fn setup(
    h_linear: &HamiltonianMatrix,
    interaction: &PairInteraction,
    config: &ScfConfig,
) -> Result<Setup> {
    config.validate()?;
    if h_linear.dim() != interaction.dim() {
        return Err(Error::DimensionMismatch {
            expected: h_linear.dim(),
            actual: interaction.dim(),
        });
    }
    let linear = eig_symmetric(h_linear.matrix())?;
    let occupation = Occupation::resolve(config.mu_policy, &linear)?;
    let (gamma0, _) = occupation.occupy(&linear)?;
    Ok(Setup { occupation, gamma0 })
}

fn gap_at(eigen: &Eigen, mu: f64) -> Option<f64> {
    find_gap(&eigen.values, Some(mu), 0.0).ok().map(|g| g.width)
}

/// Iterates `gamma_{n+1} = F(gamma_n)` from `gamma_0 = 1(h_linear)`.
pub fn solve_fixed_point(
    h_linear: &HamiltonianMatrix,
    interaction: &PairInteraction,
    config: &ScfConfig,
) -> Result<ScfResult> {
    let Setup { occupation, gamma0 } = setup(h_linear, interaction, config)?;
    fixed_point_loop(h_linear, interaction, config, occupation, gamma0)
}

/// Fixed-point iteration from a caller-supplied starting density matrix.
pub fn solve_fixed_point_from(
    h_linear: &HamiltonianMatrix,
    interaction: &PairInteraction,
    config: &ScfConfig,
    initial: DensityMatrix,
) -> Result<ScfResult> {
    let Setup { occupation, .. } = setup(h_linear, interaction, config)?;
    if initial.dim() != h_linear.dim() {
        return Err(Error::DimensionMismatch {
            expected: h_linear.dim(),
            actual: initial.dim(),
        });
    }
    fixed_point_loop(h_linear, interaction, config, occupation, initial)
}

fn fixed_point_loop(
    h_linear: &HamiltonianMatrix,
    interaction: &PairInteraction,
    config: &ScfConfig,
    occupation: Occupation,
    mut gamma: DensityMatrix,
) -> Result<ScfResult> {
    let mut trace = SolverTrace::default();
    let mut best = f64::INFINITY;
    let mut since_best = 0;
    for iteration in 1..=config.max_iter {
        let h_eff = mean_field_operator(h_linear, interaction, gamma.matrix())?;
        let spectrum = eig_symmetric(h_eff.matrix())?;
        let (next, mu) = occupation.occupy(&spectrum)?;
        let residual = operator_norm(&(next.matrix() - gamma.matrix()));
        let energy = hf_energy(next.matrix(), h_linear, interaction)?;
        trace.records.push(IterationRecord {
            iteration,
            residual,
            energy,
            mu,
            gap: gap_at(&spectrum, mu),
            step: 1.0,
        });
        if residual <= config.tol {
            let energy = hf_energy(gamma.matrix(), h_linear, interaction)?;
            return Ok(ScfResult {
                gamma_min: gamma,
                h_min: h_eff,
                spectrum,
                occupation,
                mu,
                trace,
                converged: true,
                iterations: iteration,
                fixed_point_residual: residual,
                energy,
                algorithm: Algorithm::FixedPoint,
            });
        }
        if residual < best {
            best = residual;
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= config.stall_window {
                break;
            }
        }
        gamma = next;
    }
    let residual = trace.records.last().map_or(f64::NAN, |r| r.residual);
    Err(Error::MaxIterExceeded {
        iterations: trace.len(),
        residual,
        trace: Box::new(trace),
    })
}

/// Optimal damping: keeps a relaxed density matrix `g` and moves towards the
/// occupied projector `p` of `H_eff(g)` by the weight minimising the exact
/// quadratic `E(g + t (p - g))` on `(0, 1]`.
pub fn solve_oda(
    h_linear: &HamiltonianMatrix,
    interaction: &PairInteraction,
    config: &ScfConfig,
) -> Result<ScfResult> {
    let Setup { occupation, gamma0 } = setup(h_linear, interaction, config)?;
    let mut relaxed = gamma0;
    let mut trace = SolverTrace::default();
    for iteration in 1..=config.max_iter {
        let h_eff = mean_field_operator(h_linear, interaction, relaxed.matrix())?;
        let spectrum = eig_symmetric(h_eff.matrix())?;
        let (projected, mu) = occupation.occupy(&spectrum)?;
        let delta = projected.matrix() - relaxed.matrix();
        let residual = operator_norm(&delta);
        if residual <= config.tol {
            let energy = hf_energy(projected.matrix(), h_linear, interaction)?;
            trace.records.push(IterationRecord {
                iteration,
                residual,
                energy,
                mu,
                gap: gap_at(&spectrum, mu),
                step: 1.0,
            });
            return finish_oda(
                h_linear,
                interaction,
                occupation,
                projected,
                trace,
                iteration,
            );
        }
        let slope = directional_slope(&h_eff, &delta, occupation);
        let curvature = interaction.curvature(&delta)?;
        let step = optimal_step(slope, curvature);
        relaxed = relaxed.mix(&projected, step);
        let energy = hf_energy(relaxed.matrix(), h_linear, interaction)?;
        trace.records.push(IterationRecord {
            iteration,
            residual,
            energy,
            mu,
            gap: gap_at(&spectrum, mu),
            step,
        });
    }
    let residual = trace.records.last().map_or(f64::NAN, |r| r.residual);
    Err(Error::MaxIterExceeded {
        iterations: trace.len(),
        residual,
        trace: Box::new(trace),
    })
}

/// Derivative of the energy along `delta`. At fixed particle number this is
/// `Tr(H_eff delta)`; with a fixed chemical potential the grand-canonical
/// `Tr((H_eff - mu) delta)`.
fn directional_slope(
    h_eff: &HamiltonianMatrix,
    delta: &DMatrix<f64>,
    occupation: Occupation,
) -> f64 {
    let s = h_eff.matrix().dot(delta);
    match occupation {
        Occupation::Lowest(_) => s,
        Occupation::Below(mu) => s - mu * delta.trace(),
    }
}

/// Minimiser over `(0, 1]` of `t s + t^2 c / 2`.
pub(crate) fn optimal_step(slope: f64, curvature: f64) -> f64 {
    if curvature <= 0.0 {
        return 1.0;
    }
    let t = -slope / curvature;
    if t >= 1.0 {
        1.0
    } else {
        // s <= 0 along an aufbau direction; rounding can push t just below zero
        t.max(f64::EPSILON)
    }
}

fn finish_oda(
    h_linear: &HamiltonianMatrix,
    interaction: &PairInteraction,
    occupation: Occupation,
    gamma_min: DensityMatrix,
    trace: SolverTrace,
    iterations: usize,
) -> Result<ScfResult> {
    let h_min = mean_field_operator(h_linear, interaction, gamma_min.matrix())?;
    let spectrum = eig_symmetric(h_min.matrix())?;
    let (image, mu) = occupation.occupy(&spectrum)?;
    let fixed_point_residual = operator_norm(&(image.matrix() - gamma_min.matrix()));
    let energy = hf_energy(gamma_min.matrix(), h_linear, interaction)?;
    Ok(ScfResult {
        gamma_min,
        h_min,
        spectrum,
        occupation,
        mu,
        trace,
        converged: true,
        iterations,
        fixed_point_residual,
        energy,
        algorithm: Algorithm::Oda,
    })
}

/// One application of the fixed-point map `F(gamma) = 1_{< mu}(h + A_eff(gamma))`.
pub fn fixed_point_map(
    gamma: &DensityMatrix,
    h_linear: &HamiltonianMatrix,
    interaction: &PairInteraction,
    mu: f64,
) -> Result<DensityMatrix> {
    let h_eff = mean_field_operator(h_linear, interaction, gamma.matrix())?;
    let spectrum = eig_symmetric(h_eff.matrix())?;
    Occupation::Below(mu).occupy(&spectrum).map(|(g, _)| g)
}

/// Upper bound `||W|| / (G/2 - 2||W||)` on the Lipschitz constant of the
/// fixed-point map for a linear gap `gap`; below one exactly when `||W|| < G/6`.
pub fn contraction_bound(kernel_l1_norm: f64, gap: f64) -> Result<f64> {
    let denominator = gap / 2.0 - 2.0 * kernel_l1_norm;
    if !(denominator > 0.0) {
        return Err(Error::GapTooSmall {
            gap,
            twice_norm: 2.0 * kernel_l1_norm,
        });
    }
    Ok(kernel_l1_norm / denominator)
}
