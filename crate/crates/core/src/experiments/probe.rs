use rayon::prelude::*;

use super::table::{Cell, Column, ResultTable};
use super::ExperimentSpec;
use crate::error::Result;
use crate::model::member_seed;
use crate::multiscale::{
    box_pair_geometry, calibrate_truncation, diagnose_box, hatted_hamiltonian, BoxDiagnostics,
    ResonanceParams,
};
use crate::scf::MeanFieldModel;
use crate::stats::binomial_estimate;

/// Radii used to fit the truncation constants.
pub const CALIBRATION_RADII: [usize; 4] = [5, 10, 15, 20];

fn probe_member(
    spec: &ExperimentSpec,
    params: ResonanceParams,
    seed: u64,
) -> Result<[BoxDiagnostics; 2]> {
    let radius = spec.knobs.radius;
    let (lattice, a, b) = box_pair_geometry(radius, spec.dimension)?;
    let config = spec.scf_config_for(lattice.len())?;
    let model = MeanFieldModel::sample(lattice, spec.xi, spec.w, spec.q, seed, config)?;
    let diagnose = |center| -> Result<BoxDiagnostics> {
        let hatted = hatted_hamiltonian(&model, center, radius)?;
        diagnose_box(spec.knobs.lambda, &hatted, spec.knobs.zeta_box, params)
    };
    Ok([diagnose(a)?, diagnose(b)?])
}

/// Resonance and good-box verdicts for pairs of boxes `2L` apart, over the
/// disorder ensemble.
pub fn multiscale_probe(spec: &ExperimentSpec) -> Result<ResultTable> {
    spec.validate()?;
    let mut table = ResultTable::new(
        "multiscale-probe",
        vec![
            Column::integer("sample", "ensemble member"),
            Column::integer("box", "0 = left box, 1 = right box"),
            Column::real(
                "distance",
                "energy",
                "distance from lambda to the spectrum of the local operator",
            ),
            Column::real("threshold", "energy", "exp(-sqrt L) + 2 D exp(-nu L)"),
            Column::real("margin", "energy", "distance - threshold"),
            Column::integer("resonant", "1 if distance <= threshold"),
            Column::integer("good", "1 if non-resonant and every decay probe passes"),
            Column::real(
                "worst_log_margin",
                "1",
                "min over probes of ln(bound) - ln(sum); nan if resonant",
            ),
        ],
    );
    let k = &spec.knobs;
    table.meta("radius", k.radius);
    table.meta_real("lambda", k.lambda);
    table.meta_real("zeta_box", k.zeta_box);
    let mut params = ResonanceParams {
        d: k.trunc_d,
        nu: k.trunc_nu,
    };
    if k.calibrate {
        let model = spec.model(spec.seed)?;
        let center = model
            .lattice
            .index_of(&vec![spec.length as i64 / 2; spec.dimension])
            .unwrap_or(0);
        let half = spec.length / 2;
        let radii: Vec<usize> = CALIBRATION_RADII
            .iter()
            .copied()
            .filter(|&r| 2 * r <= half && half + 2 * r < spec.length)
            .collect();
        match calibrate_truncation(&model, center, &radii) {
            Ok(fit) if fit.nu.is_finite() && fit.nu > 0.0 => {
                table.meta("calibration_radii", format!("{:?}", fit.radii));
                table.meta_real("calibration_r_squared", fit.r_squared);
                params = ResonanceParams {
                    d: fit.d,
                    nu: fit.nu,
                };
            }
            Ok(fit) => table.meta(
                "calibration",
                format!(
                    "no usable fit (nu = {}), keeping configured D and nu",
                    fit.nu
                ),
            ),
            Err(e) if e.is_configuration() => return Err(e),
            Err(e) => table.meta("calibration", format!("failed: {e}")),
        }
    }
    table.meta_real("trunc_d", params.d);
    table.meta_real("trunc_nu", params.nu);
    let members: Vec<std::result::Result<[BoxDiagnostics; 2], String>> = (0..spec.samples as u64)
        .into_par_iter()
        .map(|i| probe_member(spec, params, member_seed(spec.seed, i)).map_err(|e| e.to_string()))
        .collect();
    let (mut good_pairs, mut resonant, mut used) = (0, 0, 0);
    let mut failures = Vec::new();
    for (i, m) in members.iter().enumerate() {
        let boxes = match m {
            Ok(b) => b,
            Err(e) => {
                failures.push(format!("sample {i}: {e}"));
                continue;
            }
        };
        used += 1;
        good_pairs += boxes.iter().all(BoxDiagnostics::is_good) as usize;
        for (b, d) in boxes.iter().enumerate() {
            resonant += d.resonance.resonant as usize;
            let worst = d.decay.as_ref().map_or(f64::NAN, |v| v.worst_log_margin);
            table.push_row(vec![
                Cell::from(i),
                Cell::from(b),
                d.resonance.distance.into(),
                d.resonance.threshold.into(),
                d.resonance.margin.into(),
                Cell::from(d.resonance.resonant),
                Cell::from(d.is_good()),
                worst.into(),
            ]);
        }
    }
    let (p, se) = binomial_estimate(good_pairs, used);
    table.meta("samples_used", used);
    table.meta("samples_failed", failures.len());
    table.meta("good_pairs", good_pairs);
    table.meta("resonant_boxes", resonant);
    table.meta_real("good_pair_probability", p);
    table.meta_real("good_pair_stderr", se);
    if used == 0 {
        table.fail(failures.join("; "));
    } else if !failures.is_empty() {
        table.meta("failures", failures.join("; "));
    }
    Ok(table)
}
