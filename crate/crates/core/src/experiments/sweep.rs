use rayon::prelude::*;

use super::observables::eigenvector_spreads;
use super::table::{Cell, Column, ResultTable};
use super::ExperimentSpec;
use crate::error::{Error, Result};
use crate::model::{build_hamiltonian, member_seed, PotentialField};
use crate::spectral::eig_symmetric;
use crate::stats::{mean, spearman, spearman_decreasing_test, standard_error};

/// Mean eigenvector spread of the linear model `-Delta + V` for one realisation.
fn mean_spread(spec: &ExperimentSpec, xi: f64, seed: u64) -> Result<f64> {
    let lattice = spec.lattice()?;
    let potential = PotentialField::sample(&lattice, xi, spec.w, seed)?;
    let h = build_hamiltonian(&lattice, &potential)?;
    let eigen = eig_symmetric(h.matrix())?;
    let spreads: Vec<f64> = eigenvector_spreads(&lattice, &eigen)
        .iter()
        .map(|s| s.1)
        .collect();
    Ok(mean(&spreads))
}

/// Ensemble mean of the eigenvector spread against the checkerboard amplitude,
/// for the non-interacting model. Realisation `i` uses the same disorder seed
/// for every amplitude.
pub fn periodic_sweep(spec: &ExperimentSpec) -> Result<ResultTable> {
    spec.validate()?;
    if spec.q != 0.0 {
        return Err(Error::InvalidParameter {
            name: "q",
            reason: format!(
                "the periodic sweep is defined for the linear model (q = 0), got {}",
                spec.q
            ),
        });
    }
    let mut table = ResultTable::new(
        "sweep-periodic",
        vec![
            Column::real("xi", "energy", "checkerboard amplitude"),
            Column::real(
                "mean_stddev",
                "sites",
                "ensemble mean of the mean eigenvector spread",
            ),
            Column::real("stderr", "sites", "standard error over the ensemble"),
        ],
    );
    let xis = &spec.knobs.xi_values;
    let jobs: Vec<(usize, u64)> = (0..xis.len())
        .flat_map(|k| (0..spec.samples as u64).map(move |i| (k, i)))
        .collect();
    let values: Vec<Result<f64>> = jobs
        .par_iter()
        .map(|&(k, i)| mean_spread(spec, xis[k], member_seed(spec.seed, i)))
        .collect();
    let mut means = Vec::with_capacity(xis.len());
    for (k, &xi) in xis.iter().enumerate() {
        let per_seed: Vec<f64> = values[k * spec.samples..(k + 1) * spec.samples]
            .iter()
            .map(|r| r.as_ref().copied().map_err(|e| e.to_string()))
            .collect::<std::result::Result<_, _>>()
            .map_err(|reason| Error::InvalidParameter {
                name: "xi_values",
                reason,
            })?;
        let m = mean(&per_seed);
        means.push(m);
        table.push_row(vec![
            Cell::from(xi),
            m.into(),
            standard_error(&per_seed).into(),
        ]);
    }
    if xis.len() >= 2 {
        if xis.len() <= 9 {
            let (rho, p) = spearman_decreasing_test(xis, &means);
            table.meta_real("spearman_rho", rho);
            table.meta_real("spearman_p_decreasing", p);
        } else {
            table.meta_real("spearman_rho", spearman(xis, &means));
        }
    }
    Ok(table)
}
