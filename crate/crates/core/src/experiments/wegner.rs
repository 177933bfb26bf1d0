use rayon::prelude::*;

use super::observables::count_in_window;
use super::table::{Cell, Column, ResultTable};
use super::ExperimentSpec;
use crate::error::Result;
use crate::model::member_seed;
use crate::stats::{aic, fit_through_origin, mean, standard_error};

/// Which one-parameter law `count = c f(eps)` fits the window counts better.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WegnerComparison {
    pub linear_coefficient: f64,
    pub sqrt_coefficient: f64,
    pub aic_linear: f64,
    pub aic_sqrt: f64,
}

impl WegnerComparison {
    pub fn fit(epsilons: &[f64], means: &[f64]) -> Self {
        let n = epsilons.len();
        let sqrt: Vec<f64> = epsilons.iter().map(|e| e.sqrt()).collect();
        let (linear_coefficient, rss_linear) = fit_through_origin(epsilons, means);
        let (sqrt_coefficient, rss_sqrt) = fit_through_origin(&sqrt, means);
        Self {
            linear_coefficient,
            sqrt_coefficient,
            aic_linear: aic(rss_linear, n, 1),
            aic_sqrt: aic(rss_sqrt, n, 1),
        }
    }

    /// `"linear"`, `"sqrt"` or `"tie"` (equal criteria, e.g. all counts zero).
    pub fn preferred(&self) -> &'static str {
        if self.aic_linear < self.aic_sqrt {
            "linear"
        } else if self.aic_sqrt < self.aic_linear {
            "sqrt"
        } else {
            "tie"
        }
    }
}

/// Ensemble mean of the number of eigenvalues of `H_min` in `[lambda0, lambda0 + eps]`.
/// Members whose solve fails are skipped and counted.
pub fn wegner_experiment(spec: &ExperimentSpec) -> Result<ResultTable> {
    spec.validate()?;
    let mut table = ResultTable::new(
        "wegner",
        vec![
            Column::real("epsilon", "energy", "window width"),
            Column::real(
                "mean_count",
                "1",
                "ensemble mean of #eigenvalues of H_min in [lambda0, lambda0 + epsilon]",
            ),
            Column::real("stderr", "1", "standard error of the mean"),
        ],
    );
    let lambda0 = spec.knobs.lambda0;
    let epsilons = &spec.knobs.epsilons;
    table.meta_real("lambda0", lambda0);
    let spectra: Vec<Option<Vec<f64>>> = (0..spec.samples as u64)
        .into_par_iter()
        .map(|i| {
            spec.model(member_seed(spec.seed, i))
                .and_then(|m| m.solve())
                .ok()
                .map(|r| r.spectrum.values)
        })
        .collect();
    let ok: Vec<&Vec<f64>> = spectra.iter().flatten().collect();
    table.meta("samples_requested", spec.samples);
    table.meta("samples_used", ok.len());
    table.meta("samples_failed", spec.samples - ok.len());
    if ok.is_empty() {
        table.fail("every ensemble member failed to converge");
        return Ok(table);
    }
    let mut means = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let counts: Vec<f64> = ok
            .iter()
            .map(|v| count_in_window(v, lambda0, lambda0 + eps) as f64)
            .collect();
        let m = mean(&counts);
        means.push(m);
        table.push_row(vec![
            Cell::from(eps),
            m.into(),
            standard_error(&counts).into(),
        ]);
    }
    let cmp = WegnerComparison::fit(epsilons, &means);
    table.meta_real("linear_coefficient", cmp.linear_coefficient);
    table.meta_real("sqrt_coefficient", cmp.sqrt_coefficient);
    table.meta_real("aic_linear", cmp.aic_linear);
    table.meta_real("aic_sqrt", cmp.aic_sqrt);
    table.meta("preferred_law", cmp.preferred());
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn law_selection() {
        let eps: [f64; 4] = [0.001, 0.01, 0.05, 0.1];
        let linear: Vec<f64> = eps.iter().map(|e| 3.0 * e + 1e-4 * e.sin()).collect();
        assert_eq!(WegnerComparison::fit(&eps, &linear).preferred(), "linear");
        let sqrt: Vec<f64> = eps
            .iter()
            .map(|e| 0.7 * e.sqrt() + 1e-4 * e.cos())
            .collect();
        assert_eq!(WegnerComparison::fit(&eps, &sqrt).preferred(), "sqrt");
        assert_eq!(WegnerComparison::fit(&eps, &[0.0; 4]).preferred(), "tie");
    }
}
