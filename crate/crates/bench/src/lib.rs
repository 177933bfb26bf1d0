//! Fixtures shared by the criterion benchmarks in `benches/`.

use hfa_core::scf::ScfConfig;
use hfa_core::{LatticeBox, MeanFieldModel, MuPolicy, Result};

/// Half-filled chain with the default demonstration parameters.
pub fn chain_model(len: usize, seed: u64) -> Result<MeanFieldModel> {
    let config = ScfConfig {
        mu_policy: MuPolicy::ParticleCount(len / 2),
        ..ScfConfig::default()
    };
    MeanFieldModel::sample(LatticeBox::chain(len)?, 1.0, 1.0, 2.0, seed, config)
}
