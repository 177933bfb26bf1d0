use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite box of `Z^d` with open boundaries.
///
/// Sites are stored in row-major order: the last axis varies fastest. Site
/// coordinates run from `0` to `side - 1` along each axis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeBox {
    sides: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

impl LatticeBox {
    pub fn new(sides: Vec<usize>) -> Result<Self> {
        if sides.is_empty() {
            return Err(Error::InvalidLattice("dimension must be at least 1".into()));
        }
        if let Some(axis) = sides.iter().position(|&s| s == 0) {
            return Err(Error::InvalidLattice(format!(
                "side {axis} has zero length"
            )));
        }
        let mut strides = vec![1; sides.len()];
        for axis in (0..sides.len() - 1).rev() {
            strides[axis] = strides[axis + 1] * sides[axis + 1];
        }
        let len = sides.iter().product();
        Ok(Self {
            sides,
            strides,
            len,
        })
    }

    /// One-dimensional chain `{0, .., len-1}`.
    pub fn chain(len: usize) -> Result<Self> {
        Self::new(vec![len])
    }

    pub fn dimension(&self) -> usize {
        self.sides.len()
    }

    pub fn sides(&self) -> &[usize] {
        &self.sides
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn site(&self, index: usize) -> Vec<i64> {
        debug_assert!(index < self.len);
        self.strides
            .iter()
            .zip(&self.sides)
            .map(|(&stride, &side)| ((index / stride) % side) as i64)
            .collect()
    }

    pub fn index_of(&self, site: &[i64]) -> Option<usize> {
        if site.len() != self.dimension() {
            return None;
        }
        let mut index = 0;
        for ((&coord, &side), &stride) in site.iter().zip(&self.sides).zip(&self.strides) {
            if coord < 0 || coord as usize >= side {
                return None;
            }
            index += coord as usize * stride;
        }
        Some(index)
    }

    pub fn l1_distance(&self, a: usize, b: usize) -> usize {
        self.site(a)
            .iter()
            .zip(self.site(b))
            .map(|(x, y)| x.abs_diff(y) as usize)
            .sum()
    }

    pub fn linf_distance(&self, a: usize, b: usize) -> usize {
        self.site(a)
            .iter()
            .zip(self.site(b))
            .map(|(x, y)| x.abs_diff(y) as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn are_adjacent(&self, a: usize, b: usize) -> bool {
        self.l1_distance(a, b) == 1
    }

    /// Parity of the coordinate sum, `true` when even.
    pub fn is_even(&self, index: usize) -> bool {
        self.site(index).iter().sum::<i64>() % 2 == 0
    }

    /// Indices of the nearest neighbours of `index` inside the box.
    pub fn neighbours(&self, index: usize) -> Vec<usize> {
        let site = self.site(index);
        let mut out = Vec::with_capacity(2 * self.dimension());
        for axis in 0..self.dimension() {
            for step in [-1i64, 1] {
                let mut other = site.clone();
                other[axis] += step;
                if let Some(j) = self.index_of(&other) {
                    out.push(j);
                }
            }
        }
        out
    }

    /// All sites whose l-infinity distance to `center` is at most `radius`, in index order.
    pub fn cube(&self, center: usize, radius: usize) -> Vec<usize> {
        let c = self.site(center);
        let r = radius as i64;
        let mut out = Vec::new();
        let mut cursor: Vec<i64> = c.iter().map(|&x| (x - r).max(0)).collect();
        let upper: Vec<i64> = c
            .iter()
            .zip(&self.sides)
            .map(|(&x, &side)| (x + r).min(side as i64 - 1))
            .collect();
        loop {
            out.push(self.index_of(&cursor).expect("cursor inside box"));
            // odometer increment, last axis fastest
            let mut axis = self.dimension();
            loop {
                if axis == 0 {
                    return out;
                }
                axis -= 1;
                if cursor[axis] < upper[axis] {
                    cursor[axis] += 1;
                    for later in axis + 1..self.dimension() {
                        cursor[later] = (c[later] - r).max(0);
                    }
                    break;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_map_is_a_bijection() {
        let b = LatticeBox::new(vec![3, 4, 2]).unwrap();
        assert_eq!(b.len(), 24);
        for i in 0..b.len() {
            assert_eq!(b.index_of(&b.site(i)), Some(i));
        }
        assert_eq!(b.site(1), vec![0, 0, 1]);
        assert_eq!(b.site(2), vec![0, 1, 0]);
    }

    #[test]
    fn open_boundary_adjacency() {
        let chain = LatticeBox::chain(5).unwrap();
        assert!(chain.are_adjacent(0, 1));
        assert!(!chain.are_adjacent(0, 4));
        assert_eq!(chain.neighbours(0), vec![1]);
        assert_eq!(chain.neighbours(2), vec![1, 3]);

        let square = LatticeBox::new(vec![3, 3]).unwrap();
        assert_eq!(square.neighbours(4).len(), 4);
        assert_eq!(square.neighbours(0).len(), 2);
        assert!(!square.are_adjacent(0, 4));
    }

    #[test]
    fn rejects_degenerate_boxes() {
        assert!(LatticeBox::new(vec![]).is_err());
        assert!(LatticeBox::new(vec![3, 0]).is_err());
    }

    #[test]
    fn cube_is_clipped_to_the_box() {
        let chain = LatticeBox::chain(10).unwrap();
        assert_eq!(chain.cube(1, 2), vec![0, 1, 2, 3]);
        assert_eq!(chain.cube(5, 0), vec![5]);
        let square = LatticeBox::new(vec![4, 4]).unwrap();
        let c = square.cube(square.index_of(&[1, 1]).unwrap(), 1);
        assert_eq!(c.len(), 9);
        for &i in &c {
            assert!(square.linf_distance(i, 5) <= 1);
        }
    }

    #[test]
    fn parity_follows_coordinate_sum() {
        let square = LatticeBox::new(vec![2, 2]).unwrap();
        assert!(square.is_even(0));
        assert!(!square.is_even(1));
        assert!(!square.is_even(2));
        assert!(square.is_even(3));
    }
}
