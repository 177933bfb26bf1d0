use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponential envelope `|W(r)| <= amplitude * exp(-rate * r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decay {
    pub amplitude: f64,
    pub rate: f64,
}

/// Translation-invariant pair interaction `W(x - y)`, tabulated by the l1 distance
/// `r = |x - y|_1` for `r = 0..=range`. `W(r) = 0` beyond the range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionKernel {
    table: Vec<f64>,
    dimension: usize,
    decay: Option<Decay>,
}

impl InteractionKernel {
    pub fn from_table(table: Vec<f64>, dimension: usize) -> Result<Self> {
        if table.is_empty() {
            return Err(Error::InvalidParameter {
                name: "kernel",
                reason: "table must contain W(0)".into(),
            });
        }
        if dimension == 0 {
            return Err(Error::InvalidParameter {
                name: "d",
                reason: "dimension must be positive".into(),
            });
        }
        if let Some(bad) = table.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "kernel",
                reason: format!("non-finite entry {bad}"),
            });
        }
        Ok(Self {
            table,
            dimension,
            decay: None,
        })
    }

    /// Next-to-nearest-neighbour kernel on the chain: `W = (q, q/2, q/4, q/4)`.
    pub fn next_nearest(q: f64) -> Result<Self> {
        Self::next_nearest_in(q, 1)
    }

    pub fn next_nearest_in(q: f64, dimension: usize) -> Result<Self> {
        if !(q.is_finite() && q >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "q",
                reason: format!("interaction strength must be non-negative, got {q}"),
            });
        }
        Self::from_table(vec![q, q / 2.0, q / 4.0, q / 4.0], dimension)
    }

    /// `W(r) = amplitude * exp(-rate * r)` truncated after `range`.
    pub fn exponential(amplitude: f64, rate: f64, range: usize, dimension: usize) -> Result<Self> {
        if !(rate > 0.0) {
            return Err(Error::InvalidParameter {
                name: "rate",
                reason: format!("decay rate must be positive, got {rate}"),
            });
        }
        let table = (0..=range)
            .map(|r| amplitude * (-rate * r as f64).exp())
            .collect();
        let mut kernel = Self::from_table(table, dimension)?;
        kernel.decay = Some(Decay {
            amplitude: amplitude.abs(),
            rate,
        });
        Ok(kernel)
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    /// Largest distance with a tabulated value.
    pub fn range(&self) -> usize {
        self.table.len() - 1
    }

    /// Distance of the last non-zero entry, or `None` for the zero kernel.
    pub fn support_radius(&self) -> Option<usize> {
        self.table.iter().rposition(|&w| w != 0.0)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn decay(&self) -> Option<Decay> {
        self.decay
    }

    pub fn value(&self, r: usize) -> f64 {
        self.table.get(r).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().all(|&w| w == 0.0)
    }

    /// `sum_z |W(z)|` over `Z^d`, each distance weighted by its shell size.
    pub fn l1_norm(&self) -> f64 {
        self.table
            .iter()
            .enumerate()
            .map(|(r, w)| shell_size(self.dimension, r) as f64 * w.abs())
            .sum()
    }

    /// Whether every entry respects the exponential envelope (true when none is recorded).
    pub fn satisfies_decay(&self) -> bool {
        match self.decay {
            None => true,
            Some(Decay { amplitude, rate }) => self
                .table
                .iter()
                .enumerate()
                .all(|(r, w)| w.abs() <= amplitude * (-rate * r as f64).exp() * (1.0 + 1e-12)),
        }
    }
}

/// Number of lattice vectors of `Z^d` with l1 norm exactly `r`.
pub fn shell_size(dimension: usize, r: usize) -> u64 {
    if r == 0 {
        return 1;
    }
    (1..=dimension.min(r))
        .map(|k| (1u64 << k) * binomial(dimension, k) * binomial(r - 1, k - 1))
        .sum()
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}
