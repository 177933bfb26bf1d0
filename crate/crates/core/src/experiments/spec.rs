use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::LatticeBox;
use crate::scf::{Algorithm, MeanFieldModel, MuPolicy, ScfConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Converge,
    Locality,
    Wegner,
    Localisation,
    GapClosing,
    SweepPeriodic,
    MultiscaleProbe,
    Verify,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::Converge,
        ExperimentKind::Locality,
        ExperimentKind::Wegner,
        ExperimentKind::Localisation,
        ExperimentKind::GapClosing,
        ExperimentKind::SweepPeriodic,
        ExperimentKind::MultiscaleProbe,
        ExperimentKind::Verify,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Converge => "converge",
            ExperimentKind::Locality => "locality",
            ExperimentKind::Wegner => "wegner",
            ExperimentKind::Localisation => "localisation",
            ExperimentKind::GapClosing => "gap-closing",
            ExperimentKind::SweepPeriodic => "sweep-periodic",
            ExperimentKind::MultiscaleProbe => "multiscale-probe",
            ExperimentKind::Verify => "verify",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Self::ALL.iter().map(|k| k.name()).collect();
                format!(
                    "unknown experiment `{s}` (expected one of {})",
                    names.join(", ")
                )
            })
    }
}

/// Particle number rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Filling {
    /// `N = |Lambda| / 2`
    Half,
    /// `N = |Lambda| / 4`
    Quarter,
    Count(usize),
}

impl Filling {
    pub fn particles(&self, sites: usize) -> Result<usize> {
        let n = match *self {
            Filling::Half => sites / 2,
            Filling::Quarter => sites / 4,
            Filling::Count(n) => n,
        };
        if n > sites {
            return Err(Error::InvalidFilling {
                particles: n,
                sites,
            });
        }
        Ok(n)
    }
}

impl fmt::Display for Filling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Filling::Half => f.write_str("half"),
            Filling::Quarter => f.write_str("quarter"),
            Filling::Count(n) => write!(f, "{n}"),
        }
    }
}

impl FromStr for Filling {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "half" => Ok(Filling::Half),
            "quarter" => Ok(Filling::Quarter),
            other => other.parse().map(Filling::Count).map_err(|_| {
                format!("filling must be `half`, `quarter` or a particle count, got `{other}`")
            }),
        }
    }
}

/// How the chemical potential is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MuRule {
    /// Aufbau with the particle number from the filling rule, re-evaluated every step.
    Aufbau,
    /// Mid-gap of the linear model, frozen.
    MidGap,
    Fixed(f64),
}

impl fmt::Display for MuRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MuRule::Aufbau => f.write_str("aufbau"),
            MuRule::MidGap => f.write_str("mid-gap"),
            MuRule::Fixed(mu) => write!(f, "{mu:?}"),
        }
    }
}

impl FromStr for MuRule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "aufbau" => Ok(MuRule::Aufbau),
            "mid-gap" => Ok(MuRule::MidGap),
            other => other
                .parse::<f64>()
                .ok()
                .filter(|m| m.is_finite())
                .map(MuRule::Fixed)
                .ok_or_else(|| {
                    format!("mu must be `aufbau`, `mid-gap` or a number, got `{other}`")
                }),
        }
    }
}

/// Experiment-specific settings; each experiment reads the ones it needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Knobs {
    /// Perturbation site for `locality` (default: middle of the chain).
    pub site: Option<usize>,
    pub amplitude: f64,
    /// Lower end of the Wegner window.
    pub lambda0: f64,
    pub epsilons: Vec<f64>,
    pub xi_values: Vec<f64>,
    /// Box radius for `multiscale-probe`.
    pub radius: usize,
    pub zeta_box: f64,
    /// Probe energy for `multiscale-probe`.
    pub lambda: f64,
    /// Truncation constant `D`.
    pub trunc_d: f64,
    /// Truncation rate `nu`.
    pub trunc_nu: f64,
    /// Fit `D` and `nu` before probing boxes.
    pub calibrate: bool,
    pub rotations: usize,
}

impl Default for Knobs {
    fn default() -> Self {
        Self {
            site: None,
            amplitude: 1.0,
            lambda0: 2.0,
            epsilons: vec![0.0, 0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1],
            xi_values: vec![0.0, 1.0, 2.0, 3.0, 4.0],
            radius: 10,
            zeta_box: 0.25,
            lambda: 2.0,
            trunc_d: 0.0,
            trunc_nu: 1.0,
            calibrate: false,
            rotations: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub experiment: ExperimentKind,
    /// Checkerboard amplitude.
    pub xi: f64,
    /// Disorder width.
    pub w: f64,
    /// Interaction strength.
    pub q: f64,
    /// Side length of the lattice.
    pub length: usize,
    pub dimension: usize,
    pub filling: Filling,
    pub mu: MuRule,
    pub seed: u64,
    /// Ensemble size.
    pub samples: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub algorithm: Algorithm,
    pub knobs: Knobs,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            experiment: ExperimentKind::Converge,
            xi: 1.0,
            w: 1.0,
            q: 2.0,
            length: 500,
            dimension: 1,
            filling: Filling::Half,
            mu: MuRule::Aufbau,
            seed: 0,
            samples: 100,
            tol: 1e-10,
            max_iter: 500,
            algorithm: Algorithm::FixedPointThenOda,
            knobs: Knobs::default(),
        }
    }
}

fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("xi", self.xi), ("w", self.w), ("q", self.q)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(
                    name,
                    format!("must be a non-negative number, got {v}"),
                ));
            }
        }
        if self.length == 0 {
            return Err(invalid("L", "must be at least 1"));
        }
        if self.dimension == 0 {
            return Err(invalid("d", "must be at least 1"));
        }
        if self.samples == 0 {
            return Err(invalid("samples", "ensemble size must be at least 1"));
        }
        self.scf_config()?.validate()?;
        self.filling.particles(self.lattice()?.len())?;
        let k = &self.knobs;
        if !k.amplitude.is_finite() {
            return Err(invalid("amplitude", "must be finite"));
        }
        if let Some(site) = k.site {
            if site >= self.lattice()?.len() {
                return Err(invalid("site", format!("site {site} outside the lattice")));
            }
        }
        if k.epsilons.is_empty() || k.epsilons.iter().any(|e| !(*e >= 0.0 && e.is_finite())) {
            return Err(invalid(
                "epsilons",
                "need at least one non-negative window width",
            ));
        }
        if k.xi_values.is_empty() || k.xi_values.iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
            return Err(invalid(
                "xi_values",
                "need at least one non-negative amplitude",
            ));
        }
        if k.radius == 0 {
            return Err(invalid("radius", "must be at least 1"));
        }
        if !(k.zeta_box >= 0.0) || !(k.trunc_d >= 0.0) || !(k.trunc_nu > 0.0) {
            return Err(invalid(
                "zeta_box",
                "zeta_box and trunc_d must be non-negative, trunc_nu positive",
            ));
        }
        Ok(())
    }

    pub fn lattice(&self) -> Result<LatticeBox> {
        LatticeBox::new(vec![self.length; self.dimension])
    }

    pub fn particles(&self, sites: usize) -> Result<usize> {
        self.filling.particles(sites)
    }

    /// Solver settings for a lattice with `sites` sites.
    pub fn scf_config_for(&self, sites: usize) -> Result<ScfConfig> {
        let mu_policy = match self.mu {
            MuRule::Aufbau => MuPolicy::ParticleCount(self.particles(sites)?),
            MuRule::MidGap => MuPolicy::MidGapOfLinear,
            MuRule::Fixed(mu) => MuPolicy::Fixed(mu),
        };
        Ok(ScfConfig {
            tol: self.tol,
            max_iter: self.max_iter,
            algorithm: self.algorithm,
            mu_policy,
            ..ScfConfig::default()
        })
    }

    pub fn scf_config(&self) -> Result<ScfConfig> {
        self.scf_config_for(self.lattice()?.len())
    }

    /// Ensemble member with the given disorder seed.
    pub fn model(&self, seed: u64) -> Result<MeanFieldModel> {
        let lattice = self.lattice()?;
        let config = self.scf_config_for(lattice.len())?;
        MeanFieldModel::sample(lattice, self.xi, self.w, self.q, seed, config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for k in ExperimentKind::ALL {
            assert_eq!(k.name().parse::<ExperimentKind>().unwrap(), k);
        }
        assert!("plot".parse::<ExperimentKind>().is_err());
        for f in [Filling::Half, Filling::Quarter, Filling::Count(7)] {
            assert_eq!(f.to_string().parse::<Filling>().unwrap(), f);
        }
        for m in [
            MuRule::Aufbau,
            MuRule::MidGap,
            MuRule::Fixed(0.1),
            MuRule::Fixed(-3.0),
        ] {
            assert_eq!(m.to_string().parse::<MuRule>().unwrap(), m);
        }
    }

    #[test]
    fn filling_counts() {
        assert_eq!(Filling::Half.particles(500).unwrap(), 250);
        assert_eq!(Filling::Quarter.particles(500).unwrap(), 125);
        assert!(Filling::Count(501).particles(500).is_err());
    }

    #[test]
    fn validation() {
        assert!(ExperimentSpec::default().validate().is_ok());
        let bad = ExperimentSpec {
            samples: 0,
            ..ExperimentSpec::default()
        };
        assert!(bad.validate().unwrap_err().is_configuration());
        let bad = ExperimentSpec {
            w: -1.0,
            ..ExperimentSpec::default()
        };
        assert!(bad.validate().is_err());
    }
}
