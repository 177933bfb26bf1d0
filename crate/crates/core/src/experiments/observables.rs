use nalgebra::DVectorView;

use crate::model::LatticeBox;
use crate::spectral::Eigen;
use crate::stats::{linear_fit, mean, median, LinearFit};

/// Position spread `sqrt(sum_x |x - m|^2 p(x))` of `p = |psi|^2 / ||psi||^2`,
/// with `m` the mean position and `|.|` the Euclidean norm of lattice coordinates.
pub fn position_stddev(lattice: &LatticeBox, psi: DVectorView<'_, f64>) -> f64 {
    spread(&coordinates(lattice), psi)
}

fn coordinates(lattice: &LatticeBox) -> Vec<Vec<f64>> {
    (0..lattice.len())
        .map(|i| lattice.site(i).into_iter().map(|c| c as f64).collect())
        .collect()
}

fn spread(coords: &[Vec<f64>], psi: DVectorView<'_, f64>) -> f64 {
    let norm: f64 = psi.iter().map(|v| v * v).sum();
    let d = coords.first().map_or(0, Vec::len);
    let mut m = vec![0.0; d];
    for (c, v) in coords.iter().zip(psi.iter()) {
        let p = v * v / norm;
        for (mk, ck) in m.iter_mut().zip(c) {
            *mk += p * ck;
        }
    }
    let mut var = 0.0;
    for (c, v) in coords.iter().zip(psi.iter()) {
        let p = v * v / norm;
        let r2: f64 = c.iter().zip(&m).map(|(ck, mk)| (ck - mk).powi(2)).sum();
        var += p * r2;
    }
    var.max(0.0).sqrt()
}

/// Inverse participation ratio `sum_x p(x)^2`.
pub fn inverse_participation(psi: DVectorView<'_, f64>) -> f64 {
    let norm: f64 = psi.iter().map(|v| v * v).sum();
    psi.iter().map(|v| (v * v / norm).powi(2)).sum()
}

/// Spread of a uniformly spread state on a cube of side `side` in `dimension`
/// dimensions: `sqrt(d (side^2 - 1) / 12)`.
pub fn uniform_stddev(side: usize, dimension: usize) -> f64 {
    let s = side as f64;
    (dimension as f64 * (s * s - 1.0) / 12.0).sqrt()
}

/// `(eigenvalue, stddev, ipr)` for every eigenvector.
pub fn eigenvector_spreads(lattice: &LatticeBox, eigen: &Eigen) -> Vec<(f64, f64, f64)> {
    let coords = coordinates(lattice);
    eigen
        .values
        .iter()
        .enumerate()
        .map(|(k, &e)| {
            let psi = eigen.vectors.column(k);
            (e, spread(&coords, psi), inverse_participation(psi))
        })
        .collect()
}

/// Number of eigenvalues in the closed window `[lo, hi]`.
pub fn count_in_window(values: &[f64], lo: f64, hi: f64) -> usize {
    values.iter().filter(|&&v| v >= lo && v <= hi).count()
}

/// Least-squares line through `(n, ln r_n)`, `n = 1, 2, ...`, skipping zero residuals.
pub fn residual_decay_fit(residuals: &[f64]) -> Option<LinearFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = residuals
        .iter()
        .enumerate()
        .filter(|(_, r)| **r > 0.0)
        .map(|(i, r)| ((i + 1) as f64, r.ln()))
        .unzip();
    linear_fit(&xs, &ys)
}

/// Largest ratio `r_{n+1} / r_n` for `n >= 2`.
pub fn worst_contraction_ratio(residuals: &[f64]) -> f64 {
    residuals
        .windows(2)
        .skip(1)
        .filter(|w| w[0] > 0.0)
        .map(|w| w[1] / w[0])
        .fold(f64::NAN, f64::max)
}

/// Mean spread of the `k` eigenvectors closest in energy to `mu`, divided by
/// the median spread of the whole spectrum.
pub fn delocalisation_bump(spreads: &[(f64, f64, f64)], mu: f64, k: usize) -> f64 {
    let mut by_distance: Vec<&(f64, f64, f64)> = spreads.iter().collect();
    by_distance.sort_by(|a, b| (a.0 - mu).abs().total_cmp(&(b.0 - mu).abs()));
    let near: Vec<f64> = by_distance.iter().take(k).map(|s| s.1).collect();
    let all: Vec<f64> = spreads.iter().map(|s| s.1).collect();
    mean(&near) / median(&all)
}

/// Mean spread over the middle half of the spectrum (by index).
pub fn mid_spectrum_mean(spreads: &[(f64, f64, f64)]) -> f64 {
    let n = spreads.len();
    let lo = n / 4;
    let hi = (3 * n / 4).max(lo + 1).min(n);
    let mid: Vec<f64> = spreads[lo.min(n)..hi].iter().map(|s| s.1).collect();
    mean(&mid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    #[test]
    fn dirac_has_zero_spread() {
        let lattice = LatticeBox::chain(10).unwrap();
        let mut psi = DVector::zeros(10);
        psi[3] = 1.0;
        assert_eq!(position_stddev(&lattice, psi.as_view()), 0.0);
        assert_eq!(inverse_participation(psi.as_view()), 1.0);
    }

    #[test]
    fn uniform_vector_matches_closed_form() {
        for len in [1usize, 2, 7, 1000] {
            let lattice = LatticeBox::chain(len).unwrap();
            let psi = DVector::from_element(len, 1.0 / (len as f64).sqrt());
            let s = position_stddev(&lattice, psi.as_view());
            assert!((s - uniform_stddev(len, 1)).abs() < 1e-9, "{len}: {s}");
        }
        let lattice = LatticeBox::new(vec![6, 6]).unwrap();
        let psi = DVector::from_element(36, 1.0);
        assert!((position_stddev(&lattice, psi.as_view()) - uniform_stddev(6, 2)).abs() < 1e-12);
    }

    #[test]
    fn window_counts_are_nested() {
        let v = [0.5, 1.0, 2.0, 2.0005, 2.3];
        assert_eq!(count_in_window(&v, 2.0, 2.0), 1);
        assert_eq!(count_in_window(&v, 2.0, 2.001), 2);
        assert_eq!(count_in_window(&v, 2.0, 2.5), 3);
    }

    #[test]
    fn geometric_residuals_fit_exactly() {
        let r: Vec<f64> = (0..10).map(|n| 0.3 * 0.5f64.powi(n)).collect();
        let fit = residual_decay_fit(&r).unwrap();
        assert!((fit.slope - 0.5f64.ln()).abs() < 1e-12);
        assert!((worst_contraction_ratio(&r) - 0.5).abs() < 1e-12);
    }
}
