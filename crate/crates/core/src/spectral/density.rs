use nalgebra::DMatrix;

use super::eigen::eig_symmetric;
use crate::error::{Error, Result};
use crate::model::{hamiltonian::SYMMETRY_TOLERANCE, max_asymmetry};

/// One-particle density matrix on `l^2(Lambda)`: real symmetric with
/// `0 <= gamma <= 1`, an orthogonal projector for Hartree-Fock states.
///
/// The cached trace is the exact occupied-level count when the matrix was
/// assembled from eigenvectors, and the numerical trace otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: DMatrix<f64>,
    trace: f64,
}

impl DensityMatrix {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                actual: matrix.ncols(),
            });
        }
        let asymmetry = max_asymmetry(&matrix);
        if asymmetry > SYMMETRY_TOLERANCE {
            return Err(Error::NotSymmetric { asymmetry });
        }
        let trace = matrix.trace();
        Ok(Self { matrix, trace })
    }

    pub(crate) fn from_parts(matrix: DMatrix<f64>, trace: f64) -> Self {
        Self { matrix, trace }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(n, n),
            trace: 0.0,
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Particle number `Tr gamma`.
    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn density(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().copied().collect()
    }

    /// `max |(gamma^2 - gamma)_{ij}|`.
    pub fn projector_defect(&self) -> f64 {
        (&self.matrix * &self.matrix - &self.matrix).amax()
    }

    pub fn is_projector(&self) -> bool {
        self.projector_defect() <= 1e-8
    }

    /// Whether all eigenvalues lie in `[-1e-9, 1 + 1e-9]`.
    pub fn is_bounded(&self) -> Result<bool> {
        let e = eig_symmetric(&self.matrix)?;
        Ok(e.values.iter().all(|&v| (-1e-9..=1.0 + 1e-9).contains(&v)))
    }

    /// Convex combination `(1 - t) self + t other`.
    pub fn mix(&self, other: &DensityMatrix, t: f64) -> DensityMatrix {
        let matrix = &self.matrix * (1.0 - t) + &other.matrix * t;
        let trace = (1.0 - t) * self.trace + t * other.trace;
        Self { matrix, trace }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_matrix_is_a_projector() {
        let z = DensityMatrix::zeros(4);
        assert!(z.is_projector());
        assert_eq!(z.trace(), 0.0);
        assert!(z.is_bounded().unwrap());
    }

    #[test]
    fn mixing_projectors_leaves_the_projector_set() {
        let mut a = DMatrix::zeros(2, 2);
        a[(0, 0)] = 1.0;
        let mut b = DMatrix::zeros(2, 2);
        b[(1, 1)] = 1.0;
        let a = DensityMatrix::new(a).unwrap();
        let b = DensityMatrix::new(b).unwrap();
        let m = a.mix(&b, 0.5);
        assert!(!m.is_projector());
        assert!(m.is_bounded().unwrap());
        assert_eq!(m.trace(), 1.0);
    }

    #[test]
    fn rejects_asymmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 0.1, 0.0, 0.0]);
        assert!(DensityMatrix::new(m).is_err());
    }
}
