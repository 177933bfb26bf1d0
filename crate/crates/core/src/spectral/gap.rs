use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Interior gaps narrower than this are treated as level spacing, not gaps.
pub const DEFAULT_GAP_THRESHOLD: f64 = 1e-6;

/// A spectral gap `(lower, upper)` with no eigenvalue inside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    /// Top of the band below the gap.
    pub lower: f64,
    /// Bottom of the band above the gap.
    pub upper: f64,
    pub width: f64,
    /// Mid-gap chemical potential.
    pub mu: f64,
    /// Number of eigenvalues below the gap.
    pub band_index: usize,
}

impl GapReport {
    fn between(values: &[f64], band_index: usize) -> Self {
        let lower = values[band_index - 1];
        let upper = values[band_index];
        Self {
            lower,
            upper,
            width: upper - lower,
            mu: 0.5 * (lower + upper),
            band_index,
        }
    }

    pub fn contains(&self, energy: f64) -> bool {
        self.lower < energy && energy < self.upper
    }
}

/// Gap containing `hint_mu` if given, otherwise the widest interior gap.
/// `values` must be sorted ascending.
pub fn find_gap(values: &[f64], hint_mu: Option<f64>, threshold: f64) -> Result<GapReport> {
    if values.len() < 2 {
        return Err(Error::InvalidParameter {
            name: "eigenvalues",
            reason: "need at least two eigenvalues to locate a gap".into(),
        });
    }
    debug_assert!(values.windows(2).all(|w| w[0] <= w[1]));
    let gap = match hint_mu {
        Some(mu) => {
            let above = values.partition_point(|&v| v < mu);
            if above == 0 || above == values.len() || values[above] == mu {
                return Err(Error::NoGap {
                    largest: 0.0,
                    threshold,
                });
            }
            GapReport::between(values, above)
        }
        None => {
            let k = (1..values.len())
                .max_by(|&a, &b| {
                    (values[a] - values[a - 1]).total_cmp(&(values[b] - values[b - 1]))
                })
                .expect("at least two eigenvalues");
            GapReport::between(values, k)
        }
    };
    if gap.width < threshold {
        return Err(Error::NoGap {
            largest: gap.width,
            threshold,
        });
    }
    Ok(gap)
}

/// Every interior gap at least `threshold` wide, in ascending energy order.
pub fn all_gaps(values: &[f64], threshold: f64) -> Vec<GapReport> {
    (1..values.len())
        .filter(|&k| values[k] - values[k - 1] >= threshold)
        .map(|k| GapReport::between(values, k))
        .collect()
}
