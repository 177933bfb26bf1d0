use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::model::{hamiltonian::SYMMETRY_TOLERANCE, max_asymmetry};

/// Eigenpairs of a real symmetric matrix, eigenvalues ascending and
/// eigenvectors as orthonormal columns in the same order.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl Eigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `V diag(values) V^T`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let scaled = DMatrix::from_fn(self.dim(), self.dim(), |i, k| {
            self.vectors[(i, k)] * self.values[k]
        });
        scaled * self.vectors.transpose()
    }
}

pub fn eig_symmetric(m: &DMatrix<f64>) -> Result<Eigen> {
    check_symmetric(m)?;
    let n = m.nrows();
    if n == 0 {
        return Ok(Eigen {
            values: Vec::new(),
            vectors: DMatrix::zeros(0, 0),
        });
    }
    let decomposition = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| decomposition.eigenvalues[a].total_cmp(&decomposition.eigenvalues[b]));
    let values = order
        .iter()
        .map(|&k| decomposition.eigenvalues[k])
        .collect();
    let vectors = DMatrix::from_fn(n, n, |i, k| decomposition.eigenvectors[(i, order[k])]);
    Ok(Eigen { values, vectors })
}

/// Spectral norm of a symmetric matrix: its largest eigenvalue magnitude.
pub fn operator_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().symmetric_eigenvalues().amax()
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            actual: m.ncols(),
        });
    }
    let asymmetry = max_asymmetry(m);
    if asymmetry > SYMMETRY_TOLERANCE * (1.0 + m.amax()) {
        return Err(Error::NotSymmetric { asymmetry });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_examples() {
        let e = eig_symmetric(&DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15 && (e.values[1] - 1.0).abs() < 1e-15);
        let e = eig_symmetric(&DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            3.0, 1.0, 2.0,
        ])))
        .unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn rejects_non_symmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.5, 0.0]);
        assert!(matches!(eig_symmetric(&m), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn random_reconstruction_and_orthonormality() {
        let raw = DMatrix::from_fn(5, 5, |i, j| ((3 * i + 5 * j) as f64 * 0.37).sin());
        let m = &raw + raw.transpose();
        let e = eig_symmetric(&m).unwrap();
        assert!((e.reconstruct() - &m).amax() < 1e-9);
        let gram = e.vectors.transpose() * &e.vectors;
        assert!((gram - DMatrix::identity(5, 5)).amax() < 1e-10);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        let norm = operator_norm(&m);
        for k in 0..5 {
            let v = e.vectors.column(k);
            assert!((&m * v - v * e.values[k]).amax() < 1e-9 * norm);
        }
    }

    #[test]
    fn operator_norm_of_indefinite_matrix() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-3.0, 1.0, 2.0]));
        assert_eq!(operator_norm(&m), 3.0);
    }
}
