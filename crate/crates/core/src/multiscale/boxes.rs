use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::LatticeBox;

/// `Lambda_L(n) = {x : |x - n|_inf <= L}` intersected with the ambient lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubeBox {
    center: usize,
    radius: usize,
    sites: Vec<usize>,
    mask: Vec<bool>,
}

impl CubeBox {
    pub fn new(lattice: &LatticeBox, center: usize, radius: usize) -> Result<Self> {
        if center >= lattice.len() {
            return Err(Error::InvalidParameter {
                name: "center",
                reason: format!("site {center} outside a lattice of {} sites", lattice.len()),
            });
        }
        let sites = lattice.cube(center, radius);
        Ok(Self::from_sites(lattice.len(), center, radius, sites))
    }

    /// Arbitrary site set, for boxes that are not cubes (tests, chain intervals).
    pub fn from_sites(ambient: usize, center: usize, radius: usize, mut sites: Vec<usize>) -> Self {
        sites.sort_unstable();
        sites.dedup();
        let mut mask = vec![false; ambient];
        for &s in &sites {
            mask[s] = true;
        }
        Self {
            center,
            radius,
            sites,
            mask,
        }
    }

    pub fn center(&self) -> usize {
        self.center
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn ambient_len(&self) -> usize {
        self.mask.len()
    }

    pub fn contains(&self, site: usize) -> bool {
        self.mask.get(site).copied().unwrap_or(false)
    }

    /// Sites of the ambient lattice outside the box.
    pub fn exterior(&self) -> Vec<usize> {
        (0..self.ambient_len()).filter(|&s| !self.mask[s]).collect()
    }

    /// Position of `site` inside `sites()`.
    pub fn local_index(&self, site: usize) -> Option<usize> {
        self.sites.binary_search(&site).ok()
    }
}

fn check_dims(k: &DMatrix<f64>, region: &CubeBox) -> Result<()> {
    if k.nrows() != region.ambient_len() || !k.is_square() {
        return Err(Error::DimensionMismatch {
            expected: region.ambient_len(),
            actual: k.nrows(),
        });
    }
    Ok(())
}

/// `K^Lambda` indexed over the box sites only.
pub fn restrict(k: &DMatrix<f64>, region: &CubeBox) -> Result<DMatrix<f64>> {
    check_dims(k, region)?;
    if region.is_empty() {
        return Err(Error::EmptyBox);
    }
    let s = region.sites();
    Ok(DMatrix::from_fn(s.len(), s.len(), |i, j| k[(s[i], s[j])]))
}

/// `K^Lambda` as an operator on the ambient space (zero outside the box block).
pub fn restrict_embedded(k: &DMatrix<f64>, region: &CubeBox) -> Result<DMatrix<f64>> {
    check_dims(k, region)?;
    Ok(DMatrix::from_fn(k.nrows(), k.ncols(), |x, y| {
        if region.contains(x) && region.contains(y) {
            k[(x, y)]
        } else {
            0.0
        }
    }))
}

/// `K^{Lambda^c}` on the ambient space.
pub fn complement_embedded(k: &DMatrix<f64>, region: &CubeBox) -> Result<DMatrix<f64>> {
    check_dims(k, region)?;
    Ok(DMatrix::from_fn(k.nrows(), k.ncols(), |x, y| {
        if !region.contains(x) && !region.contains(y) {
            k[(x, y)]
        } else {
            0.0
        }
    }))
}

/// Sparse border operator `Gamma_{K, Lambda}`: the entries of `K` coupling the
/// box to its exterior, in either order.
#[derive(Debug, Clone, PartialEq)]
pub struct BorderOperator {
    dim: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl BorderOperator {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Non-zero entries `(row, column, value)`.
    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(x, y, v) in &self.entries {
            m[(x, y)] = v;
        }
        m
    }

    /// Largest l-infinity distance from the box boundary reached by an entry.
    pub fn reach(&self, lattice: &LatticeBox, region: &CubeBox) -> usize {
        self.entries
            .iter()
            .map(|&(x, y, _)| {
                let outer = if region.contains(x) { y } else { x };
                region
                    .sites()
                    .iter()
                    .map(|&s| lattice.linf_distance(s, outer))
                    .min()
                    .unwrap_or(0)
            })
            .max()
            .unwrap_or(0)
    }
}

pub fn border_operator(k: &DMatrix<f64>, region: &CubeBox) -> Result<BorderOperator> {
    check_dims(k, region)?;
    let n = k.nrows();
    let mut entries = Vec::new();
    for y in 0..n {
        for x in 0..n {
            if region.contains(x) != region.contains(y) && k[(x, y)] != 0.0 {
                entries.push((x, y, k[(x, y)]));
            }
        }
    }
    Ok(BorderOperator { dim: n, entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain_operator(n: usize, range: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |x, y| {
            let d = x.abs_diff(y);
            if d == 0 {
                x as f64 * 0.1
            } else if d <= range {
                1.0 / d as f64
            } else {
                0.0
            }
        })
    }

    #[test]
    fn restriction_examples() {
        let lattice = LatticeBox::chain(4).unwrap();
        let k = DMatrix::from_fn(4, 4, |i, j| (i * 4 + j) as f64);
        let k = &k + k.transpose();
        let whole = CubeBox::new(&lattice, 1, 10).unwrap();
        assert_eq!(restrict(&k, &whole).unwrap(), k);
        let single = CubeBox::new(&lattice, 2, 0).unwrap();
        assert_eq!(
            restrict(&k, &single).unwrap(),
            DMatrix::from_element(1, 1, k[(2, 2)])
        );
        let middle = CubeBox::from_sites(4, 1, 0, vec![1, 2]);
        assert_eq!(
            restrict(&k, &middle).unwrap(),
            k.view((1, 1), (2, 2)).into_owned()
        );
        let empty = CubeBox::from_sites(4, 0, 0, vec![]);
        assert!(matches!(restrict(&k, &empty), Err(Error::EmptyBox)));
    }

    #[test]
    fn border_of_whole_domain_is_empty() {
        let lattice = LatticeBox::chain(10).unwrap();
        let k = chain_operator(10, 3);
        let whole = CubeBox::new(&lattice, 5, 10).unwrap();
        assert_eq!(border_operator(&k, &whole).unwrap().nnz(), 0);
    }

    #[test]
    fn nearest_neighbour_border_has_two_entries() {
        let lattice = LatticeBox::chain(12).unwrap();
        let k = chain_operator(12, 1);
        // interval [0..=4]
        let region = CubeBox::new(&lattice, 2, 2).unwrap();
        let border = border_operator(&k, &region).unwrap();
        let mut e: Vec<(usize, usize)> = border.entries().iter().map(|&(x, y, _)| (x, y)).collect();
        e.sort();
        assert_eq!(e, vec![(4, 5), (5, 4)]);
    }

    #[test]
    fn border_width_matches_interaction_range() {
        let lattice = LatticeBox::chain(30).unwrap();
        let k = chain_operator(30, 3);
        let region = CubeBox::new(&lattice, 15, 5).unwrap();
        let border = border_operator(&k, &region).unwrap();
        assert_eq!(border.reach(&lattice, &region), 3);
        // entrywise oracle straight from the definition
        let dense = border.to_dense();
        for x in 0..30 {
            for y in 0..30 {
                let straddles = region.contains(x) != region.contains(y);
                let want = if straddles { k[(x, y)] } else { 0.0 };
                assert_eq!(dense[(x, y)], want);
            }
        }
    }

    #[test]
    fn decomposition_is_exact() {
        let lattice = LatticeBox::new(vec![5, 4]).unwrap();
        let n = lattice.len();
        let k = DMatrix::from_fn(n, n, |x, y| {
            ((x * 31 + y * 17) as f64).sin() + ((x + y) as f64).cos()
        });
        let region = CubeBox::new(&lattice, 7, 1).unwrap();
        let sum = restrict_embedded(&k, &region).unwrap()
            + border_operator(&k, &region).unwrap().to_dense()
            + complement_embedded(&k, &region).unwrap();
        assert_eq!(sum, k);
    }
}
