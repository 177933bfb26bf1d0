use crate::error::Result;
use crate::model::{
    build_hamiltonian, HamiltonianMatrix, InteractionKernel, LatticeBox, PairInteraction,
    PotentialField,
};

use super::config::ScfConfig;
use super::solver::{solve, ScfResult};

/// Everything needed to set up and solve one Hartree-Fock problem.
#[derive(Debug, Clone)]
pub struct MeanFieldModel {
    pub lattice: LatticeBox,
    pub potential: PotentialField,
    pub kernel: InteractionKernel,
    pub config: ScfConfig,
}

impl MeanFieldModel {
    /// Checkerboard amplitude `xi`, disorder width `w`, next-nearest kernel `q`.
    pub fn sample(
        lattice: LatticeBox,
        xi: f64,
        w: f64,
        q: f64,
        seed: u64,
        config: ScfConfig,
    ) -> Result<Self> {
        let potential = PotentialField::sample(&lattice, xi, w, seed)?;
        let kernel = InteractionKernel::next_nearest_in(q, lattice.dimension())?;
        Ok(Self {
            lattice,
            potential,
            kernel,
            config,
        })
    }

    pub fn with_potential(&self, potential: PotentialField) -> Self {
        Self {
            potential,
            ..self.clone()
        }
    }

    pub fn with_config(&self, config: ScfConfig) -> Self {
        Self {
            config,
            ..self.clone()
        }
    }

    pub fn linear_hamiltonian(&self) -> Result<HamiltonianMatrix> {
        build_hamiltonian(&self.lattice, &self.potential)
    }

    pub fn interaction(&self) -> Result<PairInteraction> {
        PairInteraction::new(&self.kernel, &self.lattice)
    }

    pub fn solve(&self) -> Result<ScfResult> {
        solve(
            &self.linear_hamiltonian()?,
            &self.interaction()?,
            &self.config,
        )
    }
}
