use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hatted::{hatted_hamiltonian, HattedHamiltonian};
use crate::error::{Error, Result};
use crate::model::{member_seed, InteractionKernel, LatticeBox};
use crate::scf::{MeanFieldModel, ScfConfig};
use crate::stats::binomial_estimate;

/// Constants of the truncation bound `D exp(-nu L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceParams {
    pub d: f64,
    pub nu: f64,
}

impl Default for ResonanceParams {
    fn default() -> Self {
        Self { d: 0.0, nu: 1.0 }
    }
}

/// `exp(-sqrt L) + 2 D exp(-nu L)`.
pub fn resonance_threshold(radius: usize, params: ResonanceParams) -> f64 {
    let l = radius as f64;
    (-l.sqrt()).exp() + 2.0 * params.d * (-params.nu * l).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceVerdict {
    pub resonant: bool,
    /// `d(lambda, sigma(Ĥ))`.
    pub distance: f64,
    pub threshold: f64,
    /// `distance - threshold`; negative or zero means resonant.
    pub margin: f64,
}

pub fn resonance_of(
    lambda: f64,
    spectrum: &[f64],
    radius: usize,
    params: ResonanceParams,
) -> ResonanceVerdict {
    let distance = spectrum
        .iter()
        .map(|e| (e - lambda).abs())
        .fold(f64::INFINITY, f64::min);
    let threshold = resonance_threshold(radius, params);
    ResonanceVerdict {
        resonant: distance <= threshold,
        distance,
        threshold,
        margin: distance - threshold,
    }
}

pub fn is_resonant(
    lambda: f64,
    hatted: &HattedHamiltonian,
    params: ResonanceParams,
) -> ResonanceVerdict {
    resonance_of(lambda, &hatted.local_spectrum, hatted.radius(), params)
}

/// One `(x, y)` pair of the good-box decay check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayProbe {
    pub x: usize,
    pub y: usize,
    /// `sum_v |(Ĥ - lambda)^{-1}(x,v)| |Gamma(v,y)|`.
    pub sum: f64,
    /// `exp(-zeta |y - x|_1)`.
    pub bound: f64,
}

impl DecayProbe {
    pub fn passes(&self) -> bool {
        self.sum <= self.bound
    }

    /// `ln bound - ln sum`; positive when the probe passes.
    pub fn log_margin(&self) -> f64 {
        self.bound.ln() - self.sum.ln()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodBoxVerdict {
    pub good: bool,
    pub probes: Vec<DecayProbe>,
    /// Smallest `log_margin` over the probes (infinite with no coupling).
    pub worst_log_margin: f64,
}

/// Probe sites: `x` within l-infinity distance `floor(sqrt L)` of the center,
/// `y` on the exterior shell at l-infinity distance `L+1 ..= L+range`.
pub fn probe_sites(hatted: &HattedHamiltonian) -> (Vec<usize>, Vec<usize>) {
    let lattice = &hatted.lattice;
    let center = hatted.center();
    let radius = hatted.radius();
    let inner = (radius as f64).sqrt().floor() as usize;
    let xs = lattice.cube(center, inner);
    let ys = lattice
        .cube(center, radius + hatted.interaction_range)
        .into_iter()
        .filter(|&y| lattice.linf_distance(y, center) > radius)
        .collect();
    (xs, ys)
}

/// Decay check of the boundary-coupled local resolvent at real energy `lambda`.
/// Resonant boxes are rejected.
pub fn good_box_check(
    lambda: f64,
    hatted: &HattedHamiltonian,
    zeta_box: f64,
    params: ResonanceParams,
) -> Result<GoodBoxVerdict> {
    let resonance = is_resonant(lambda, hatted, params);
    if resonance.resonant {
        return Err(Error::ResonantBox(format!(
            "d(lambda, spectrum) = {:.3e} <= threshold {:.3e} for the box of radius {} at site {}",
            resonance.distance,
            resonance.threshold,
            hatted.radius(),
            hatted.center()
        )));
    }
    let n = hatted.local.nrows();
    let shifted = &hatted.local - DMatrix::<f64>::identity(n, n) * lambda;
    let inverse = shifted.lu().try_inverse().ok_or(Error::ResolventSingular {
        distance: resonance.distance,
    })?;
    let (xs, ys) = probe_sites(hatted);
    let region = &hatted.region;
    let lattice = &hatted.lattice;
    // border entries grouped by their exterior end: (local index of v, y, |Gamma(v,y)|)
    let couplings: Vec<(usize, usize, f64)> = hatted
        .border
        .entries()
        .iter()
        .filter_map(|&(v, y, g)| region.local_index(v).map(|lv| (lv, y, g.abs())))
        .collect();
    let mut probes = Vec::with_capacity(xs.len() * ys.len());
    for &x in &xs {
        let lx = region.local_index(x).expect("probe x lies in the box");
        for &y in &ys {
            let sum: f64 = couplings
                .iter()
                .filter(|c| c.1 == y)
                .map(|&(lv, _, g)| inverse[(lx, lv)].abs() * g)
                .sum();
            let bound = (-zeta_box * lattice.l1_distance(x, y) as f64).exp();
            probes.push(DecayProbe { x, y, sum, bound });
        }
    }
    let worst_log_margin = probes
        .iter()
        .map(DecayProbe::log_margin)
        .fold(f64::INFINITY, f64::min);
    Ok(GoodBoxVerdict {
        good: probes.iter().all(DecayProbe::passes),
        probes,
        worst_log_margin,
    })
}

/// Resonance and good-box diagnostics of one box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDiagnostics {
    pub center: usize,
    pub radius: usize,
    pub lambda: f64,
    pub zeta_box: f64,
    pub params: ResonanceParams,
    pub resonance: ResonanceVerdict,
    /// `None` when the box is resonant.
    pub decay: Option<GoodBoxVerdict>,
}

impl BoxDiagnostics {
    pub fn is_good(&self) -> bool {
        !self.resonance.resonant && self.decay.as_ref().is_some_and(|d| d.good)
    }
}

pub fn diagnose_box(
    lambda: f64,
    hatted: &HattedHamiltonian,
    zeta_box: f64,
    params: ResonanceParams,
) -> Result<BoxDiagnostics> {
    let resonance = is_resonant(lambda, hatted, params);
    let decay = if resonance.resonant {
        None
    } else {
        Some(good_box_check(lambda, hatted, zeta_box, params)?)
    };
    Ok(BoxDiagnostics {
        center: hatted.center(),
        radius: hatted.radius(),
        lambda,
        zeta_box,
        params,
        resonance,
        decay,
    })
}

/// Disorder ensemble used for Monte Carlo box statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct DisorderEnsemble {
    pub xi: f64,
    pub w: f64,
    pub kernel: InteractionKernel,
    pub config: ScfConfig,
}

impl DisorderEnsemble {
    pub fn member(&self, lattice: LatticeBox, seed: u64) -> Result<MeanFieldModel> {
        let potential = crate::model::PotentialField::sample(&lattice, self.xi, self.w, seed)?;
        Ok(MeanFieldModel {
            lattice,
            potential,
            kernel: self.kernel.clone(),
            config: self.config,
        })
    }
}

/// Lattice of side `8L+1` holding two boxes `Lambda_L` whose centers sit at
/// `2L` and `6L` along the first axis (the other coordinates at `4L`), so the
/// boxes are `2L` apart and both doubled boxes fit.
pub fn box_pair_geometry(radius: usize, dimension: usize) -> Result<(LatticeBox, usize, usize)> {
    let side = 8 * radius + 1;
    let lattice = LatticeBox::new(vec![side; dimension])?;
    let mut first = vec![4 * radius as i64; dimension];
    first[0] = 2 * radius as i64;
    let mut second = first.clone();
    second[0] = 6 * radius as i64;
    let a = lattice.index_of(&first).expect("inside");
    let b = lattice.index_of(&second).expect("inside");
    Ok((lattice, a, b))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityEstimate {
    pub estimate: f64,
    pub stderr: f64,
    /// Samples that produced a verdict.
    pub samples: usize,
    pub good_pairs: usize,
    pub resonant_boxes: usize,
    /// Samples whose solver failed; excluded from the estimate.
    pub failed: usize,
}

/// Outcome of one Monte Carlo sample: `Some((pair good, resonant box count))`,
/// `None` if a solve failed.
pub fn box_pair_sample(
    lambda: f64,
    radius: usize,
    zeta_box: f64,
    params: ResonanceParams,
    ensemble: &DisorderEnsemble,
    seed: u64,
) -> Result<(bool, usize)> {
    let (lattice, a, b) = box_pair_geometry(radius, ensemble.kernel.dimension())?;
    let model = ensemble.member(lattice, seed)?;
    let mut good = true;
    let mut resonant = 0;
    for center in [a, b] {
        let hatted = hatted_hamiltonian(&model, center, radius)?;
        let diag = diagnose_box(lambda, &hatted, zeta_box, params)?;
        resonant += diag.resonance.resonant as usize;
        good &= diag.is_good();
    }
    Ok((good, resonant))
}

/// Monte Carlo frequency that two boxes `2L` apart are both good.
pub fn good_box_probability(
    lambda: f64,
    radius: usize,
    zeta_box: f64,
    params: ResonanceParams,
    ensemble: &DisorderEnsemble,
    n_samples: usize,
    seed: u64,
) -> Result<ProbabilityEstimate> {
    if n_samples < 2 {
        return Err(Error::InvalidParameter {
            name: "samples",
            reason: format!("need at least 2 samples, got {n_samples}"),
        });
    }
    if radius == 0 {
        return Err(Error::InvalidParameter {
            name: "radius",
            reason: "must be positive".into(),
        });
    }
    let outcomes: Vec<Option<(bool, usize)>> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            box_pair_sample(
                lambda,
                radius,
                zeta_box,
                params,
                ensemble,
                member_seed(seed, i),
            )
            .ok()
        })
        .collect();
    let done: Vec<(bool, usize)> = outcomes.iter().flatten().copied().collect();
    let good_pairs = done.iter().filter(|o| o.0).count();
    let (estimate, stderr) = binomial_estimate(good_pairs, done.len());
    Ok(ProbabilityEstimate {
        estimate,
        stderr,
        samples: done.len(),
        good_pairs,
        resonant_boxes: done.iter().map(|o| o.1).sum(),
        failed: n_samples - done.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ensemble(xi: f64, w: f64, q: f64) -> DisorderEnsemble {
        DisorderEnsemble {
            xi,
            w,
            kernel: InteractionKernel::next_nearest(q).unwrap(),
            config: ScfConfig::default(),
        }
    }

    fn hatted(xi: f64, w: f64, q: f64, radius: usize, seed: u64) -> HattedHamiltonian {
        let (lattice, a, _) = box_pair_geometry(radius, 1).unwrap();
        let model = ensemble(xi, w, q).member(lattice, seed).unwrap();
        hatted_hamiltonian(&model, a, radius).unwrap()
    }

    #[test]
    fn far_energy_is_not_resonant() {
        let h = hatted(1.0, 1.0, 2.0, 6, 3);
        let top = *h.local_spectrum.last().unwrap();
        let v = is_resonant(top + 10.0, &h, ResonanceParams::default());
        assert!(!v.resonant);
        assert!((v.margin - 10.0).abs() < 0.1);
    }

    #[test]
    fn eigenvalue_is_resonant() {
        let h = hatted(1.0, 1.0, 2.0, 6, 3);
        let v = is_resonant(h.local_spectrum[4], &h, ResonanceParams::default());
        assert!(v.resonant);
        assert!(good_box_check(h.local_spectrum[4], &h, 0.1, ResonanceParams::default()).is_err());
    }

    #[test]
    fn threshold_monotone() {
        let spectrum = [0.0, 0.3, 1.0];
        for lambda in [0.05, 0.12, 0.2, 0.5, 0.7] {
            let small = ResonanceParams { d: 0.0, nu: 0.5 };
            let large = ResonanceParams { d: 0.5, nu: 0.5 };
            for radius in 1..20 {
                let a = resonance_of(lambda, &spectrum, radius, small);
                let b = resonance_of(lambda, &spectrum, radius, large);
                assert!(!a.resonant || b.resonant);
                let shorter = resonance_of(lambda, &spectrum, radius - 1, small);
                assert!(!a.resonant || shorter.resonant);
            }
        }
    }

    #[test]
    fn zero_zeta_bound_is_one() {
        let h = hatted(1.0, 1.0, 2.0, 9, 5);
        let lambda = 2.1;
        let v = good_box_check(lambda, &h, 0.0, ResonanceParams::default()).unwrap();
        for p in &v.probes {
            assert_eq!(p.bound, 1.0);
            assert_eq!(p.passes(), p.sum <= 1.0);
        }
        let (xs, ys) = probe_sites(&h);
        assert_eq!(xs.len(), 7);
        assert_eq!(ys.len(), 6);
        assert_eq!(v.probes.len(), 42);
    }

    #[test]
    fn gap_energy_is_good_with_margin() {
        // the demo gap sits roughly between 1 and 3
        let h = hatted(1.0, 1.0, 2.0, 12, 7);
        let v = good_box_check(2.1, &h, 0.3, ResonanceParams::default()).unwrap();
        assert!(v.good);
        assert!(v.worst_log_margin > 1.0, "{}", v.worst_log_margin);
    }

    #[test]
    fn clean_ensemble_is_deterministic() {
        let e = ensemble(1.0, 0.0, 2.0);
        let p = good_box_probability(2.1, 4, 0.3, ResonanceParams::default(), &e, 4, 1).unwrap();
        assert!(p.estimate == 0.0 || p.estimate == 1.0);
        assert_eq!(p.stderr, 0.0);
        assert!(good_box_probability(2.1, 4, 0.3, ResonanceParams::default(), &e, 1, 1).is_err());
    }

    #[test]
    fn deep_gap_pairs_are_good() {
        let e = ensemble(1.0, 1.0, 2.0);
        let p = good_box_probability(2.1, 6, 0.3, ResonanceParams::default(), &e, 8, 11).unwrap();
        assert_eq!(p.failed, 0);
        assert_eq!(p.estimate, 1.0);
    }
}
