use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::kernel::InteractionKernel;
use super::lattice::LatticeBox;
use super::potential::PotentialField;
use crate::error::{Error, Result};
use crate::spectral::DensityMatrix;

/// Absolute asymmetry above which a matrix is rejected as non-symmetric.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatorKind {
    /// `-Delta + V`.
    Linear,
    /// `-Delta + V + A_eff(gamma)`.
    MeanField,
    /// Anything else (restrictions, test matrices).
    Generic,
}

/// Dense real symmetric one-particle operator on `l^2(Lambda)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    matrix: DMatrix<f64>,
    kind: OperatorKind,
}

impl HamiltonianMatrix {
    pub fn new(matrix: DMatrix<f64>, kind: OperatorKind) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                actual: matrix.ncols(),
            });
        }
        let asymmetry = max_asymmetry(&matrix);
        if asymmetry > SYMMETRY_TOLERANCE * (1.0 + matrix.amax()) {
            return Err(Error::NotSymmetric { asymmetry });
        }
        Ok(Self { matrix, kind })
    }

    pub fn generic(matrix: DMatrix<f64>) -> Result<Self> {
        Self::new(matrix, OperatorKind::Generic)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `self + shift * I`.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut matrix = self.matrix.clone();
        for i in 0..matrix.nrows() {
            matrix[(i, i)] += shift;
        }
        Self {
            matrix,
            kind: self.kind,
        }
    }
}

pub fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in j + 1..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// `H^Lambda = -Delta + V` with open boundaries: `V(x)` on the diagonal and `1`
/// between nearest neighbours.
pub fn build_hamiltonian(
    lattice: &LatticeBox,
    potential: &PotentialField,
) -> Result<HamiltonianMatrix> {
    if potential.len() != lattice.len() {
        return Err(Error::DimensionMismatch {
            expected: lattice.len(),
            actual: potential.len(),
        });
    }
    let n = lattice.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = potential.value(i);
        for j in lattice.neighbours(i) {
            m[(i, j)] = 1.0;
        }
    }
    Ok(HamiltonianMatrix {
        matrix: m,
        kind: OperatorKind::Linear,
    })
}

/// The kernel laid out over a box: `pairs[(x, y)] = W(|x - y|_1)`.
///
/// Building this once per box keeps the mean-field update a couple of dense
/// elementwise passes.
#[derive(Debug, Clone, PartialEq)]
pub struct PairInteraction {
    pairs: DMatrix<f64>,
    kernel: InteractionKernel,
}

impl PairInteraction {
    pub fn new(kernel: &InteractionKernel, lattice: &LatticeBox) -> Result<Self> {
        if kernel.dimension() != lattice.dimension() {
            return Err(Error::DimensionMismatch {
                expected: lattice.dimension(),
                actual: kernel.dimension(),
            });
        }
        let n = lattice.len();
        let pairs = DMatrix::from_fn(n, n, |x, y| kernel.value(lattice.l1_distance(x, y)));
        Ok(Self {
            pairs,
            kernel: kernel.clone(),
        })
    }

    pub fn pairs(&self) -> &DMatrix<f64> {
        &self.pairs
    }

    pub fn kernel(&self) -> &InteractionKernel {
        &self.kernel
    }

    pub fn dim(&self) -> usize {
        self.pairs.nrows()
    }

    pub fn is_zero(&self) -> bool {
        self.kernel.is_zero()
    }

    /// `A_eff(g)(x, y) = delta_{xy} sum_n W(n - y) g(n, n) - W(x - y) g(x, y)`.
    pub fn effective_matrix(&self, gamma: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.check(gamma)?;
        let density = gamma.diagonal();
        let hartree = &self.pairs * &density;
        let mut a = -self.pairs.component_mul(gamma);
        for y in 0..a.nrows() {
            a[(y, y)] += hartree[y];
        }
        Ok(a)
    }

    /// Interaction part of the Hartree-Fock energy:
    /// `1/2 sum W(x-y) g(x,x) g(y,y) - 1/2 sum W(x-y) |g(x,y)|^2`.
    pub fn interaction_energy(&self, gamma: &DMatrix<f64>) -> Result<f64> {
        self.check(gamma)?;
        let density = gamma.diagonal();
        let direct = density.dot(&(&self.pairs * &density));
        let exchange = self.pairs.component_mul(gamma).dot(gamma);
        Ok(0.5 * (direct - exchange))
    }

    /// Second-order coefficient of `t -> E(g + t * delta)`:
    /// `sum W(x-y) [delta(x,x) delta(y,y) - delta(x,y)^2]`.
    pub fn curvature(&self, delta: &DMatrix<f64>) -> Result<f64> {
        Ok(2.0 * self.interaction_energy(delta)?)
    }

    fn check(&self, gamma: &DMatrix<f64>) -> Result<()> {
        if gamma.nrows() != self.dim() || gamma.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: gamma.nrows(),
            });
        }
        Ok(())
    }
}

/// Effective interaction `A_eff(gamma)` as a mean-field correction.
pub fn effective_interaction(
    gamma: &DensityMatrix,
    kernel: &InteractionKernel,
    lattice: &LatticeBox,
) -> Result<HamiltonianMatrix> {
    let pairs = PairInteraction::new(kernel, lattice)?;
    let a = pairs.effective_matrix(gamma.matrix())?;
    Ok(HamiltonianMatrix {
        matrix: a,
        kind: OperatorKind::Generic,
    })
}

/// `H_eff(gamma) = h_linear + A_eff(gamma)`.
pub fn mean_field_operator(
    h_linear: &HamiltonianMatrix,
    interaction: &PairInteraction,
    gamma: &DMatrix<f64>,
) -> Result<HamiltonianMatrix> {
    if h_linear.dim() != interaction.dim() {
        return Err(Error::DimensionMismatch {
            expected: h_linear.dim(),
            actual: interaction.dim(),
        });
    }
    let a = interaction.effective_matrix(gamma)?;
    Ok(HamiltonianMatrix {
        matrix: &h_linear.matrix + a,
        kind: OperatorKind::MeanField,
    })
}

/// Hartree-Fock energy `Tr(H gamma) + interaction_energy(gamma)`.
pub fn hf_energy(
    gamma: &DMatrix<f64>,
    h_linear: &HamiltonianMatrix,
    interaction: &PairInteraction,
) -> Result<f64> {
    if gamma.nrows() != h_linear.dim() {
        return Err(Error::DimensionMismatch {
            expected: h_linear.dim(),
            actual: gamma.nrows(),
        });
    }
    // gamma and H symmetric: Tr(H gamma) = sum_ij H_ij gamma_ij
    let one_body = h_linear.matrix.dot(gamma);
    Ok(one_body + interaction.interaction_energy(gamma)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::eig_symmetric;
    use proptest::prelude::*;

    fn chain_h(len: usize, xi: f64, w: f64, seed: u64) -> (LatticeBox, HamiltonianMatrix) {
        let lattice = LatticeBox::chain(len).unwrap();
        let v = PotentialField::sample(&lattice, xi, w, seed).unwrap();
        let h = build_hamiltonian(&lattice, &v).unwrap();
        (lattice, h)
    }

    #[test]
    fn two_site_chain() {
        let (_, h) = chain_h(2, 0.0, 0.0, 0);
        assert_eq!(
            h.matrix(),
            &DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])
        );
        assert_eq!(h.kind(), OperatorKind::Linear);
    }

    #[test]
    fn three_site_spectrum() {
        let (_, h) = chain_h(3, 0.0, 0.0, 0);
        let e = eig_symmetric(h.matrix()).unwrap();
        let s = 2f64.sqrt();
        for (got, want) in e.values.iter().zip([-s, 0.0, s]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn checkerboard_chain() {
        let (_, h) = chain_h(4, 1.0, 0.0, 0);
        let m = h.matrix();
        assert_eq!(
            m.diagonal().iter().copied().collect::<Vec<_>>(),
            vec![1.0, -1.0, 1.0, -1.0]
        );
        for i in 0..3 {
            assert_eq!(m[(i, i + 1)], 1.0);
            assert_eq!(m[(i + 1, i)], 1.0);
        }
        assert_eq!(m[(0, 2)], 0.0);
        assert_eq!(m[(0, 3)], 0.0);
    }

    #[test]
    fn size_mismatch_is_an_error() {
        let lattice = LatticeBox::chain(4).unwrap();
        let other = LatticeBox::chain(5).unwrap();
        let v = PotentialField::sample(&other, 1.0, 0.0, 0).unwrap();
        assert!(matches!(
            build_hamiltonian(&lattice, &v),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn free_chain_matches_path_graph_spectrum() {
        for len in [5usize, 17, 40] {
            let (_, h) = chain_h(len, 0.0, 0.0, 0);
            let e = eig_symmetric(h.matrix()).unwrap();
            let mut exact: Vec<f64> = (1..=len)
                .map(|k| 2.0 * (k as f64 * std::f64::consts::PI / (len as f64 + 1.0)).cos())
                .collect();
            exact.sort_by(f64::total_cmp);
            for (a, b) in e.values.iter().zip(&exact) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn effective_interaction_zero_and_rank_one() {
        let lattice = LatticeBox::chain(6).unwrap();
        let kernel = InteractionKernel::next_nearest(2.0).unwrap();
        let zero = DensityMatrix::zeros(6);
        let a = effective_interaction(&zero, &kernel, &lattice).unwrap();
        assert_eq!(a.matrix().amax(), 0.0);

        let mut g = DMatrix::zeros(6, 6);
        g[(0, 0)] = 1.0;
        let gamma = DensityMatrix::new(g).unwrap();
        let a = effective_interaction(&gamma, &kernel, &lattice).unwrap();
        let m = a.matrix();
        assert_eq!(m[(0, 0)], 0.0);
        assert_eq!(m[(1, 1)], kernel.value(1));
        assert_eq!(m[(2, 2)], kernel.value(2));
        for x in 0..6 {
            for y in 0..6 {
                if x != y {
                    assert_eq!(m[(x, y)], 0.0);
                }
            }
        }
    }

    #[test]
    fn dimension_mismatch_in_effective_interaction() {
        let lattice = LatticeBox::chain(6).unwrap();
        let kernel = InteractionKernel::next_nearest(2.0).unwrap();
        let gamma = DensityMatrix::zeros(5);
        assert!(effective_interaction(&gamma, &kernel, &lattice).is_err());
    }

    /// Entrywise evaluation of the defining formula with scalar loops.
    fn a_eff_oracle(g: &DMatrix<f64>, kernel: &InteractionKernel) -> DMatrix<f64> {
        let n = g.nrows();
        let w = |x: usize, y: usize| kernel.value(x.abs_diff(y));
        let mut a = DMatrix::zeros(n, n);
        for x in 0..n {
            for y in 0..n {
                let mut v = 0.0;
                if x == y {
                    for site in 0..n {
                        v += w(site, y) * g[(site, site)];
                    }
                }
                v -= w(x, y) * g[(x, y)];
                a[(x, y)] = v;
            }
        }
        a
    }

    fn energy_oracle(g: &DMatrix<f64>, h: &DMatrix<f64>, kernel: &InteractionKernel) -> f64 {
        let n = g.nrows();
        let w = |x: usize, y: usize| kernel.value(x.abs_diff(y));
        let mut e = 0.0;
        for x in 0..n {
            for y in 0..n {
                e += h[(x, y)] * g[(y, x)];
                e += 0.5 * w(x, y) * g[(x, x)] * g[(y, y)];
                e -= 0.5 * w(x, y) * g[(x, y)] * g[(x, y)];
            }
        }
        e
    }

    #[test]
    fn effective_interaction_matches_double_loop_on_random_projector() {
        let (lattice, h) = chain_h(6, 1.0, 1.0, 5);
        let kernel = InteractionKernel::next_nearest(2.0).unwrap();
        // projector onto the three lowest eigenvectors of a random symmetric matrix
        let r = DMatrix::from_fn(6, 6, |i, j| {
            ((i * 7 + j * 3) as f64).sin() + ((i + j) as f64).cos()
        });
        let sym = &r + r.transpose() + h.matrix();
        let gamma = crate::spectral::aufbau_projector(&eig_symmetric(&sym).unwrap(), 3)
            .unwrap()
            .0;
        let a = effective_interaction(&gamma, &kernel, &lattice).unwrap();
        let oracle = a_eff_oracle(gamma.matrix(), &kernel);
        assert!((a.matrix() - oracle).amax() < 1e-14);
    }

    #[test]
    fn hf_energy_examples() {
        let (lattice, h) = chain_h(4, 0.0, 0.0, 0);
        let e = eig_symmetric(h.matrix()).unwrap();
        let (gamma, _) = crate::spectral::aufbau_projector(&e, 2).unwrap();
        let g = gamma.matrix();

        let zero_kernel = InteractionKernel::next_nearest(0.0).unwrap();
        let pairs0 = PairInteraction::new(&zero_kernel, &lattice).unwrap();
        let tr = (h.matrix() * g).trace();
        assert!((hf_energy(g, &h, &pairs0).unwrap() - tr).abs() < 1e-14);

        let kernel = InteractionKernel::next_nearest(2.0).unwrap();
        let pairs = PairInteraction::new(&kernel, &lattice).unwrap();
        assert_eq!(hf_energy(&DMatrix::zeros(4, 4), &h, &pairs).unwrap(), 0.0);
        let want = energy_oracle(g, h.matrix(), &kernel);
        assert!((hf_energy(g, &h, &pairs).unwrap() - want).abs() < 1e-13);
    }

    fn random_projector(n: usize, rank: usize, seed: u64) -> DMatrix<f64> {
        let lattice = LatticeBox::chain(n).unwrap();
        let v = PotentialField::sample(&lattice, 0.0, 5.0, seed).unwrap();
        let mut m = build_hamiltonian(&lattice, &v).unwrap().into_matrix();
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] += 0.3
                    * crate::model::potential::keyed_uniform(
                        seed ^ 0xabc,
                        (i * n + j).min(j * n + i) as u64,
                    );
            }
        }
        let e = eig_symmetric(&m).unwrap();
        crate::spectral::aufbau_projector(&e, rank)
            .unwrap()
            .0
            .into_matrix()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn effective_interaction_is_linear(seed in any::<u64>(), alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
            let lattice = LatticeBox::chain(10).unwrap();
            let kernel = InteractionKernel::next_nearest(1.7).unwrap();
            let pairs = PairInteraction::new(&kernel, &lattice).unwrap();
            let g1 = random_projector(10, 4, seed);
            let g2 = random_projector(10, 6, seed.wrapping_add(1));
            let combo = &g1 * alpha + &g2 * beta;
            let lhs = pairs.effective_matrix(&combo).unwrap();
            let rhs = pairs.effective_matrix(&g1).unwrap() * alpha + pairs.effective_matrix(&g2).unwrap() * beta;
            prop_assert!((lhs - rhs).amax() < 1e-12);
        }

        #[test]
        fn effective_interaction_norm_bound(seed in any::<u64>(), rank in 0usize..=12, q in 0.0f64..5.0) {
            let lattice = LatticeBox::chain(12).unwrap();
            let kernel = InteractionKernel::next_nearest(q).unwrap();
            let pairs = PairInteraction::new(&kernel, &lattice).unwrap();
            let g = random_projector(12, rank, seed);
            let a = pairs.effective_matrix(&g).unwrap();
            let norm = crate::spectral::operator_norm(&a);
            prop_assert!(norm <= 2.0 * kernel.l1_norm() + 1e-9);
        }

        #[test]
        fn energy_is_half_the_derivative_pairing(seed in any::<u64>(), rank in 1usize..10, q in 0.0f64..5.0) {
            let (lattice, h) = chain_h(10, 1.0, 1.0, seed);
            let kernel = InteractionKernel::next_nearest(q).unwrap();
            let pairs = PairInteraction::new(&kernel, &lattice).unwrap();
            let g = random_projector(10, rank, seed.wrapping_mul(3));
            let a = pairs.effective_matrix(&g).unwrap();
            let e = hf_energy(&g, &h, &pairs).unwrap();
            let via_derivative = (h.matrix() * &g).trace() + 0.5 * (a * &g).trace();
            prop_assert!((e - via_derivative).abs() <= 1e-9 * e.abs().max(1.0));
        }
    }
}
