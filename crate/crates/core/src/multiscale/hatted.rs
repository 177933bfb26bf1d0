use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::boxes::{border_operator, restrict, BorderOperator, CubeBox};
use crate::error::{Error, Result};
use crate::model::{LatticeBox, PotentialField};
use crate::scf::{MeanFieldModel, ScfResult};
use crate::spectral::{eig_symmetric, operator_norm};
use crate::stats::linear_fit;

/// `H_min(V^)` restricted to `Lambda_L(n)`, where `V^` keeps the disorder on
/// `Lambda_{2L}(n)` and sets it to zero elsewhere.
#[derive(Debug, Clone)]
pub struct HattedHamiltonian {
    pub lattice: LatticeBox,
    pub region: CubeBox,
    /// `Ĥ(n, L)`, indexed over `region.sites()`.
    pub local: DMatrix<f64>,
    /// Ascending eigenvalues of `local`.
    pub local_spectrum: Vec<f64>,
    /// Border operator of the ambient `H_min(V^)` with respect to the box.
    pub border: BorderOperator,
    /// Range of the ambient mean-field operator in l1 distance.
    pub interaction_range: usize,
    pub solution: ScfResult,
}

impl HattedHamiltonian {
    pub fn radius(&self) -> usize {
        self.region.radius()
    }

    pub fn center(&self) -> usize {
        self.region.center()
    }
}

fn check_fits(lattice: &LatticeBox, center: usize, reach: usize) -> Result<()> {
    if center >= lattice.len() {
        return Err(Error::InvalidParameter {
            name: "center",
            reason: format!("site {center} outside a lattice of {} sites", lattice.len()),
        });
    }
    let c = lattice.site(center);
    for (axis, (&x, &side)) in c.iter().zip(lattice.sides()).enumerate() {
        let r = reach as i64;
        if x - r < 0 || x + r >= side as i64 {
            return Err(Error::InvalidParameter {
                name: "radius",
                reason: format!("box of radius {reach} around site {center} leaves the lattice along axis {axis}"),
            });
        }
    }
    Ok(())
}

/// Potential with the random part kept on `Lambda_{2L}(n)` and zero outside.
pub fn hatted_potential(
    model: &MeanFieldModel,
    center: usize,
    radius: usize,
) -> Result<PotentialField> {
    check_fits(&model.lattice, center, 2 * radius)?;
    let lattice = &model.lattice;
    Ok(model.potential.map_random(|i, v| {
        if lattice.linf_distance(i, center) <= 2 * radius {
            v
        } else {
            0.0
        }
    }))
}

/// Solves Hartree-Fock with the hatted potential on the ambient lattice and
/// restricts the mean-field operator to `Lambda_L(n)`.
pub fn hatted_hamiltonian(
    model: &MeanFieldModel,
    center: usize,
    radius: usize,
) -> Result<HattedHamiltonian> {
    let potential = hatted_potential(model, center, radius)?;
    let solution = model.with_potential(potential).solve()?;
    let region = CubeBox::new(&model.lattice, center, radius)?;
    let local = restrict(solution.h_min.matrix(), &region)?;
    let local_spectrum = eig_symmetric(&local)?.values;
    let border = border_operator(solution.h_min.matrix(), &region)?;
    Ok(HattedHamiltonian {
        lattice: model.lattice.clone(),
        region,
        local,
        local_spectrum,
        border,
        interaction_range: model.kernel.support_radius().unwrap_or(0).max(1),
        solution,
    })
}

/// `||(H_min)|_Lambda - Ĥ||` in operator norm.
pub fn truncation_error(full: &ScfResult, hatted: &HattedHamiltonian) -> Result<f64> {
    let restricted = restrict(full.h_min.matrix(), &hatted.region)?;
    Ok(operator_norm(&(restricted - &hatted.local)))
}

/// Fit of `||(H_min)|_{Lambda_L} - Ĥ(n,L)|| <= D exp(-nu L)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationFit {
    pub radii: Vec<usize>,
    pub errors: Vec<f64>,
    pub d: f64,
    pub nu: f64,
    pub r_squared: f64,
}

/// Solves the full model once and the hatted model for every radius, then fits
/// `ln error = ln D - nu L`. Radii with an error of exactly zero are kept in
/// the output but left out of the fit.
pub fn calibrate_truncation(
    model: &MeanFieldModel,
    center: usize,
    radii: &[usize],
) -> Result<TruncationFit> {
    let full = model.solve()?;
    let mut errors = Vec::with_capacity(radii.len());
    for &radius in radii {
        let hatted = hatted_hamiltonian(model, center, radius)?;
        errors.push(truncation_error(&full, &hatted)?);
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = radii
        .iter()
        .zip(&errors)
        .filter(|(_, &e)| e > 0.0)
        .map(|(&r, &e)| (r as f64, e.ln()))
        .unzip();
    let (d, nu, r_squared) = match linear_fit(&xs, &ys) {
        Some(fit) => (fit.intercept.exp(), -fit.slope, fit.r_squared),
        None => (0.0, f64::INFINITY, 1.0),
    };
    Ok(TruncationFit {
        radii: radii.to_vec(),
        errors,
        d,
        nu,
        r_squared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scf::ScfConfig;

    fn demo(len: usize, w: f64, seed: u64) -> MeanFieldModel {
        MeanFieldModel::sample(
            LatticeBox::chain(len).unwrap(),
            1.0,
            w,
            2.0,
            seed,
            ScfConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn clean_model_matches_plain_restriction() {
        let model = demo(60, 0.0, 1);
        let full = model.solve().unwrap();
        let hatted = hatted_hamiltonian(&model, 30, 5).unwrap();
        let restricted = restrict(full.h_min.matrix(), &hatted.region).unwrap();
        assert_eq!(hatted.local, restricted);
        assert_eq!(truncation_error(&full, &hatted).unwrap(), 0.0);
    }

    #[test]
    fn exterior_disorder_is_invisible() {
        let model = demo(80, 1.0, 4);
        let (center, radius) = (40, 6);
        let a = hatted_hamiltonian(&model, center, radius).unwrap();
        let lattice = model.lattice.clone();
        let resampled = model.potential.map_random(|i, v| {
            if lattice.linf_distance(i, center) <= 2 * radius {
                v
            } else {
                0.9 - v
            }
        });
        let b = hatted_hamiltonian(&model.with_potential(resampled), center, radius).unwrap();
        assert!((a.local - b.local).amax() < 1e-12);
    }

    #[test]
    fn box_must_fit() {
        let model = demo(30, 1.0, 1);
        assert!(hatted_hamiltonian(&model, 15, 8).is_err());
        assert!(hatted_hamiltonian(&model, 15, 7).is_ok());
    }

    #[test]
    fn border_reaches_interaction_range() {
        let model = demo(60, 1.0, 2);
        let hatted = hatted_hamiltonian(&model, 30, 5).unwrap();
        assert_eq!(hatted.interaction_range, 3);
        assert_eq!(hatted.border.reach(&hatted.lattice, &hatted.region), 3);
    }
}
