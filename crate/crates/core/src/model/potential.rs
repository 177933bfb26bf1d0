use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::lattice::LatticeBox;
use crate::error::{Error, Result};

const DISORDER_STREAM: u64 = 0x5eed_0001;
const MEMBER_STREAM: u64 = 0x5eed_0002;

/// Uniform `[0, 1)` draw keyed by `(seed, index)`.
///
/// Each key maps to a fixed position of a ChaCha8 stream, so values do not depend
/// on the order in which sites (or ensemble members) are visited.
pub fn keyed_uniform(seed: u64, index: u64) -> f64 {
    keyed_rng(seed, DISORDER_STREAM, index).random::<f64>()
}

/// Seed of ensemble member `member` derived from `base`.
pub fn member_seed(base: u64, member: u64) -> u64 {
    keyed_rng(base, MEMBER_STREAM, member).next_u64()
}

fn keyed_rng(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    // one 64-bit draw consumes two 32-bit words
    rng.set_word_pos(u128::from(index) * 2);
    rng
}

/// External potential `V = V0 + V_omega` sampled on a lattice box.
///
/// `V0` is the 2-periodic checkerboard `+xi` on even sites and `-xi` on odd sites;
/// `V_omega` is i.i.d. uniform on `[0, disorder_width]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialField {
    periodic: Vec<f64>,
    random: Vec<f64>,
    periodic_amplitude: f64,
    disorder_width: f64,
    seed: u64,
}

impl PotentialField {
    pub fn sample(lattice: &LatticeBox, xi: f64, disorder_width: f64, seed: u64) -> Result<Self> {
        check_non_negative("xi", xi)?;
        check_non_negative("w", disorder_width)?;
        let periodic = checkerboard(lattice, xi);
        let random = (0..lattice.len())
            .map(|i| disorder_width * keyed_uniform(seed, i as u64))
            .collect();
        Ok(Self {
            periodic,
            random,
            periodic_amplitude: xi,
            disorder_width,
            seed,
        })
    }

    /// Constant potential `value` on every site, stored as its periodic part.
    pub fn constant(lattice: &LatticeBox, value: f64) -> Self {
        Self {
            periodic: vec![value; lattice.len()],
            random: vec![0.0; lattice.len()],
            periodic_amplitude: 0.0,
            disorder_width: 0.0,
            seed: 0,
        }
    }

    /// Builds a field from explicit parts. The random part is not range-checked.
    pub fn from_parts(periodic: Vec<f64>, random: Vec<f64>) -> Result<Self> {
        if periodic.len() != random.len() {
            return Err(Error::DimensionMismatch {
                expected: periodic.len(),
                actual: random.len(),
            });
        }
        let width = random.iter().copied().fold(0.0, f64::max);
        Ok(Self {
            periodic,
            random,
            periodic_amplitude: 0.0,
            disorder_width: width,
            seed: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.periodic.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periodic.is_empty()
    }

    pub fn value(&self, index: usize) -> f64 {
        self.periodic[index] + self.random[index]
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.value(i)).collect()
    }

    pub fn periodic_part(&self) -> &[f64] {
        &self.periodic
    }

    pub fn random_part(&self) -> &[f64] {
        &self.random
    }

    pub fn periodic_amplitude(&self) -> f64 {
        self.periodic_amplitude
    }

    pub fn disorder_width(&self) -> f64 {
        self.disorder_width
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Same field with `delta` added to the random part at `site`.
    pub fn perturbed_at(&self, site: usize, delta: f64) -> Self {
        let mut out = self.clone();
        out.random[site] += delta;
        out
    }

    /// Same field with the random part replaced by `f(index, old)`.
    pub fn map_random(&self, f: impl Fn(usize, f64) -> f64) -> Self {
        let mut out = self.clone();
        for (i, v) in out.random.iter_mut().enumerate() {
            *v = f(i, *v);
        }
        out
    }

    /// Same field with every value (both parts) multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.periodic.iter_mut().for_each(|v| *v *= factor);
        out.random.iter_mut().for_each(|v| *v *= factor);
        out
    }

    /// Same field shifted by the constant `c`, added to the periodic part.
    pub fn shifted(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.periodic.iter_mut().for_each(|v| *v += c);
        out
    }
}

fn checkerboard(lattice: &LatticeBox, xi: f64) -> Vec<f64> {
    (0..lattice.len())
        .map(|i| if lattice.is_even(i) { xi } else { -xi })
        .collect()
}

fn check_non_negative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite and non-negative, got {value}"),
        })
    }
}
