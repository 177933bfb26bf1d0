use nalgebra::DMatrix;
use num_complex::Complex64;

use super::boxes::{border_operator, restrict, BorderOperator, CubeBox};
use crate::error::{Error, Result};
use crate::spectral::resolvent;

/// Both resolvents needed to test the geometric resolvent identity
/// `R(x,y) = -sum_{u in Lambda, v not in Lambda} R^Lambda(x,u) Gamma(u,v) R(v,y)`
/// for `x` inside and `y` outside the box.
#[derive(Debug, Clone)]
pub struct GeometricResolvent {
    region: CubeBox,
    full: DMatrix<Complex64>,
    local: DMatrix<Complex64>,
    border: BorderOperator,
}

impl GeometricResolvent {
    pub fn new(k: &DMatrix<f64>, region: &CubeBox, lambda: Complex64) -> Result<Self> {
        let local_k = restrict(k, region)?;
        let border = border_operator(k, region)?;
        Ok(Self {
            region: region.clone(),
            full: resolvent(k, lambda)?,
            local: resolvent(&local_k, lambda)?,
            border,
        })
    }

    pub fn border(&self) -> &BorderOperator {
        &self.border
    }

    /// `|R(x,y) + sum R^Lambda(x,u) Gamma(u,v) R(v,y)|`, zero up to rounding.
    pub fn residual(&self, x: usize, y: usize) -> Result<f64> {
        let lx = self
            .region
            .local_index(x)
            .ok_or_else(|| Error::InvalidParameter {
                name: "x",
                reason: format!("site {x} is not in the box"),
            })?;
        if y >= self.region.ambient_len() || self.region.contains(y) {
            return Err(Error::InvalidParameter {
                name: "y",
                reason: format!("site {y} is not outside the box"),
            });
        }
        let mut sum = self.full[(x, y)];
        for &(u, v, g) in self.border.entries() {
            if let Some(lu) = self.region.local_index(u) {
                sum += self.local[(lx, lu)] * g * self.full[(v, y)];
            }
        }
        Ok(sum.norm())
    }

    /// Largest residual over every pair `x` in the box, `y` outside it.
    pub fn max_residual(&self) -> f64 {
        let sites = self.region.sites();
        let exterior = self.region.exterior();
        if sites.is_empty() || exterior.is_empty() {
            return 0.0;
        }
        let n = self.region.ambient_len();
        // Gamma restricted to rows in the box, as a |Lambda| x n matrix
        let mut g = DMatrix::<Complex64>::zeros(sites.len(), n);
        for &(u, v, val) in self.border.entries() {
            if let Some(lu) = self.region.local_index(u) {
                g[(lu, v)] = Complex64::new(val, 0.0);
            }
        }
        let correction = &self.local * g * &self.full;
        let mut worst = 0.0f64;
        for (lx, &x) in sites.iter().enumerate() {
            for &y in &exterior {
                worst = worst.max((self.full[(x, y)] + correction[(lx, y)]).norm());
            }
        }
        worst
    }
}

/// One-shot form of [`GeometricResolvent::residual`].
pub fn geometric_resolvent_residual(
    k: &DMatrix<f64>,
    region: &CubeBox,
    lambda: Complex64,
    x: usize,
    y: usize,
) -> Result<f64> {
    GeometricResolvent::new(k, region, lambda)?.residual(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{keyed_uniform, LatticeBox};

    fn random_symmetric(n: usize, seed: u64) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = 2.0 * keyed_uniform(seed, (i * n + j) as u64) - 1.0;
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }

    #[test]
    fn dense_random_instance_all_pairs() {
        let lattice = LatticeBox::chain(8).unwrap();
        let k = random_symmetric(8, 3);
        let region = CubeBox::new(&lattice, 2, 1).unwrap();
        let lambda = Complex64::new(0.3, 0.2);
        let g = GeometricResolvent::new(&k, &region, lambda).unwrap();
        for &x in region.sites() {
            for y in region.exterior() {
                let r = g.residual(x, y).unwrap();
                assert!(r < 1e-9, "residual {r} at ({x},{y})");
            }
        }
        assert!(g.max_residual() < 1e-9);
    }

    #[test]
    fn diagonal_operator_has_zero_sides() {
        let lattice = LatticeBox::chain(6).unwrap();
        let k = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            1.0, 2.0, 3.0, 4.0, 5.0, 6.0,
        ]));
        let region = CubeBox::new(&lattice, 1, 1).unwrap();
        let g = GeometricResolvent::new(&k, &region, Complex64::new(0.0, 1.0)).unwrap();
        assert_eq!(g.border().nnz(), 0);
        assert_eq!(g.residual(0, 4).unwrap(), 0.0);
    }

    #[test]
    fn arguments_on_the_wrong_side_are_rejected() {
        let lattice = LatticeBox::chain(6).unwrap();
        let k = random_symmetric(6, 1);
        let region = CubeBox::new(&lattice, 1, 1).unwrap();
        let g = GeometricResolvent::new(&k, &region, Complex64::new(0.0, 1.0)).unwrap();
        assert!(g.residual(4, 5).is_err());
        assert!(g.residual(0, 1).is_err());
    }

    #[test]
    fn real_eigenvalue_is_singular() {
        let lattice = LatticeBox::chain(3).unwrap();
        let k = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0, 3.0]));
        let region = CubeBox::new(&lattice, 0, 0).unwrap();
        assert!(matches!(
            GeometricResolvent::new(&k, &region, Complex64::new(2.0, 0.0)),
            Err(Error::ResolventSingular { .. })
        ));
    }
}
