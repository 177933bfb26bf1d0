use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::eigen::eig_symmetric;
use crate::error::{Error, Result};
use crate::model::LatticeBox;
use crate::stats::linear_fit;

/// Pairs closer than this are left out of decay fits.
pub const FIT_MIN_DISTANCE: usize = 5;
/// Magnitudes below this fraction of the largest probed entry are roundoff and
/// left out of decay fits.
pub const FIT_NOISE_FLOOR: f64 = 1e-13;
/// Absolute roundoff level for entries of order-one matrices (densities,
/// resolvents away from the spectrum); smaller magnitudes are not fitted either.
pub const FIT_ABSOLUTE_FLOOR: f64 = 1e-12;

const SINGULAR_DISTANCE: f64 = 1e-8;

/// Exponential fit `|value(r)| ~ amplitude * exp(-rate * r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub amplitude: f64,
    /// Fitted decay rate; `+inf` when every probed entry vanishes.
    pub rate: f64,
    pub r_squared: f64,
    pub points: usize,
}

impl DecayFit {
    /// Least-squares fit of `ln|value|` against distance over the entries with
    /// `distance >= min_distance` that sit above both noise floors.
    pub fn fit(distances: &[usize], magnitudes: &[f64], min_distance: usize) -> Self {
        let peak = magnitudes.iter().copied().fold(0.0, f64::max);
        let floor = (FIT_NOISE_FLOOR * peak).max(FIT_ABSOLUTE_FLOOR);
        let (xs, ys): (Vec<f64>, Vec<f64>) = distances
            .iter()
            .zip(magnitudes)
            .filter(|&(&d, &m)| d >= min_distance && m > floor && m > 0.0)
            .map(|(&d, &m)| (d as f64, m.ln()))
            .unzip();
        match linear_fit(&xs, &ys) {
            Some(line) => Self {
                amplitude: line.intercept.exp(),
                rate: -line.slope,
                r_squared: line.r_squared,
                points: line.points,
            },
            None => Self {
                amplitude: 0.0,
                rate: f64::INFINITY,
                r_squared: f64::NAN,
                points: xs.len(),
            },
        }
    }
}

fn shifted_complex(m: &DMatrix<f64>, lambda: Complex64) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        let v = Complex64::new(m[(i, j)], 0.0);
        if i == j {
            v - lambda
        } else {
            v
        }
    })
}

fn check_resolvable(m: &DMatrix<f64>, lambda: Complex64) -> Result<()> {
    let e = eig_symmetric(m)?;
    let distance = e
        .values
        .iter()
        .map(|&v| (Complex64::new(v, 0.0) - lambda).norm())
        .fold(f64::INFINITY, f64::min);
    if distance <= SINGULAR_DISTANCE {
        return Err(Error::ResolventSingular { distance });
    }
    Ok(())
}

/// `(M - lambda)^{-1}`.
pub fn resolvent(m: &DMatrix<f64>, lambda: Complex64) -> Result<DMatrix<Complex64>> {
    check_resolvable(m, lambda)?;
    shifted_complex(m, lambda)
        .lu()
        .try_inverse()
        .ok_or(Error::ResolventSingular { distance: 0.0 })
}

/// Column `x` of `(M - lambda)^{-1}`; by symmetry also its row.
pub fn resolvent_column(
    m: &DMatrix<f64>,
    lambda: Complex64,
    x: usize,
) -> Result<DVector<Complex64>> {
    check_resolvable(m, lambda)?;
    let mut rhs = DVector::zeros(m.nrows());
    rhs[x] = Complex64::new(1.0, 0.0);
    shifted_complex(m, lambda)
        .lu()
        .solve(&rhs)
        .ok_or(Error::ResolventSingular { distance: 0.0 })
}

/// Probes the off-diagonal decay `|(delta_x, (M - lambda)^{-1} delta_y)|` over `ys`
/// and fits an exponential in the lattice distance `|x - y|_1`.
pub fn combes_thomas_probe(
    m: &DMatrix<f64>,
    lambda: Complex64,
    lattice: &LatticeBox,
    x: usize,
    ys: &[usize],
) -> Result<DecayFit> {
    if m.nrows() != lattice.len() {
        return Err(Error::DimensionMismatch {
            expected: lattice.len(),
            actual: m.nrows(),
        });
    }
    let column = resolvent_column(m, lambda, x)?;
    let distances: Vec<usize> = ys.iter().map(|&y| lattice.l1_distance(x, y)).collect();
    let magnitudes: Vec<f64> = ys.iter().map(|&y| column[y].norm()).collect();
    Ok(DecayFit::fit(&distances, &magnitudes, FIT_MIN_DISTANCE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_hamiltonian, PotentialField};
    use crate::spectral::{find_gap, DEFAULT_GAP_THRESHOLD};
    use crate::stats::spearman;

    fn demo(len: usize) -> (LatticeBox, DMatrix<f64>) {
        let lattice = LatticeBox::chain(len).unwrap();
        let v = PotentialField::sample(&lattice, 1.0, 1.0, 21).unwrap();
        let h = build_hamiltonian(&lattice, &v).unwrap().into_matrix();
        (lattice, h)
    }

    #[test]
    fn diagonal_operator_has_infinite_decay() {
        let lattice = LatticeBox::chain(30).unwrap();
        let m = DMatrix::from_diagonal(&DVector::from_fn(30, |i, _| i as f64 * 0.1));
        let ys: Vec<usize> = (0..30).collect();
        let fit = combes_thomas_probe(&m, Complex64::new(0.05, 0.0), &lattice, 0, &ys).unwrap();
        assert_eq!(fit.rate, f64::INFINITY);
        let r = resolvent(&m, Complex64::new(0.05, 0.0)).unwrap();
        for i in 0..30 {
            for j in 0..30 {
                if i != j {
                    assert_eq!(r[(i, j)].norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn singular_resolvent_is_reported() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![0.0, 1.0]));
        assert!(matches!(
            resolvent(&m, Complex64::new(1.0, 0.0)),
            Err(Error::ResolventSingular { .. })
        ));
    }

    #[test]
    fn column_solve_matches_dense_inverse() {
        let (_, h) = demo(40);
        let z = Complex64::new(0.4, 0.3);
        let inv = resolvent(&h, z).unwrap();
        let col = resolvent_column(&h, z, 7).unwrap();
        for y in 0..40 {
            assert!((inv[(y, 7)] - col[y]).norm() < 1e-12);
            assert!((inv[(7, y)] - col[y]).norm() < 1e-12);
        }
    }

    #[test]
    fn mid_gap_resolvent_decays() {
        let (lattice, h) = demo(200);
        let e = eig_symmetric(&h).unwrap();
        let gap = find_gap(&e.values, None, DEFAULT_GAP_THRESHOLD).unwrap();
        let ys: Vec<usize> = (100..200).collect();
        let fit = combes_thomas_probe(&h, Complex64::new(gap.mu, 0.0), &lattice, 100, &ys).unwrap();
        assert!(fit.rate > 0.0);
        assert!(fit.r_squared > 0.9, "r2 = {}", fit.r_squared);

        let far = e.values[199] + 10.0;
        let fit = combes_thomas_probe(&h, Complex64::new(far, 0.0), &lattice, 100, &ys).unwrap();
        assert!(fit.rate > 0.0);
    }

    #[test]
    fn decay_grows_deeper_in_the_gap() {
        let (lattice, h) = demo(200);
        let e = eig_symmetric(&h).unwrap();
        let gap = find_gap(&e.values, None, DEFAULT_GAP_THRESHOLD).unwrap();
        let ys: Vec<usize> = (100..200).collect();
        // from near the lower band edge towards mid-gap
        let depths = [0.1, 0.2, 0.3, 0.4, 0.5];
        let rates: Vec<f64> = depths
            .iter()
            .map(|&t| {
                let lambda = gap.lower + t * gap.width;
                combes_thomas_probe(&h, Complex64::new(lambda, 0.0), &lattice, 100, &ys)
                    .unwrap()
                    .rate
            })
            .collect();
        assert!(spearman(&depths, &rates) > 0.0, "rates {rates:?}");
    }
}
