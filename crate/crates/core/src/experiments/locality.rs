use super::table::{Cell, Column, ResultTable};
use super::{record_solution, ExperimentSpec};
use crate::error::Result;
use crate::spectral::{DecayFit, FIT_ABSOLUTE_FLOOR, FIT_MIN_DISTANCE};

/// Distance from the perturbation beyond which the tail height is measured.
pub const TAIL_DISTANCE: usize = 100;

/// Density response to a local bump `amplitude * delta_s` of the random potential.
///
/// The amplitude is clipped so that the perturbed random value stays inside
/// `[0, w]`.
pub fn locality_experiment(spec: &ExperimentSpec) -> Result<ResultTable> {
    spec.validate()?;
    let mut table = ResultTable::new(
        "locality",
        vec![
            Column::integer("x", "site index"),
            Column::real(
                "delta_density",
                "1",
                "gamma_min(V + a delta_s)(x,x) - gamma_min(V)(x,x)",
            ),
            Column::integer("distance", "l1 distance |x - s|"),
        ],
    );
    let model = spec.model(spec.seed)?;
    let n = model.lattice.len();
    let site = spec.knobs.site.unwrap_or(n / 2);
    let current = model.potential.random_part()[site];
    let amplitude = spec.knobs.amplitude.clamp(-current, spec.w - current);
    table.meta("site", site);
    table.meta_real("requested_amplitude", spec.knobs.amplitude);
    table.meta_real("amplitude", amplitude);

    let base = match model.solve() {
        Ok(r) => r,
        Err(e) if e.is_configuration() => return Err(e),
        Err(e) => {
            table.fail(format!("unperturbed solve: {e}"));
            return Ok(table);
        }
    };
    let perturbed = match model
        .with_potential(model.potential.perturbed_at(site, amplitude))
        .solve()
    {
        Ok(r) => r,
        Err(e) => {
            table.fail(format!("perturbed solve: {e}"));
            return Ok(table);
        }
    };
    record_solution(&mut table, &base);
    table.meta("perturbed_iterations", perturbed.iterations);

    let a = base.gamma_min.density();
    let b = perturbed.gamma_min.density();
    let lattice = &model.lattice;
    let mut distances = Vec::with_capacity(n);
    let mut magnitudes = Vec::with_capacity(n);
    for x in 0..n {
        let delta = b[x] - a[x];
        let dist = lattice.l1_distance(x, site);
        table.push_row(vec![Cell::from(x), delta.into(), Cell::from(dist)]);
        distances.push(dist);
        magnitudes.push(delta.abs());
    }
    table.meta_real("delta_sum", b.iter().sum::<f64>() - a.iter().sum::<f64>());
    let peak = magnitudes.iter().copied().fold(0.0, f64::max);
    let tail = distances
        .iter()
        .zip(&magnitudes)
        .filter(|(d, _)| **d >= TAIL_DISTANCE)
        .map(|(_, m)| *m)
        .fold(f64::NAN, f64::max);
    table.meta_real("peak", peak);
    table.meta_real("tail_max_beyond_100", tail);
    table.meta_real("decades_to_100", (peak / tail).log10());
    let fit = DecayFit::fit(&distances, &magnitudes, FIT_MIN_DISTANCE);
    table.meta_real("fit_rate", fit.rate);
    table.meta_real("fit_amplitude", fit.amplitude);
    table.meta_real("fit_r_squared", fit.r_squared);
    table.meta("fit_points", fit.points);
    table.meta("fit_min_distance", FIT_MIN_DISTANCE);
    table.meta_real("fit_absolute_floor", FIT_ABSOLUTE_FLOOR);
    Ok(table)
}
