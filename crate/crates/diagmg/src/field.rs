//! Scalar fields stored on the finest grid's index space.
//!
//! A field holds one value per fine-grid point, boundaries included, no
//! matter which hierarchy level it logically belongs to; coarse-level fields
//! simply leave non-member entries at zero. Boundary entries stay zero
//! throughout (homogeneous Dirichlet data), which lets every stencil read
//! neighbors without bounds or membership checks: a read off the lattice
//! lands on a zero.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A scalar field on the fine index space, tagged with the hierarchy level
/// it lives on.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    pub dim: usize,
    /// Points per side of the fine grid, boundaries included.
    pub n: usize,
    /// Index of the hierarchy level this field is attached to (0 = coarsest).
    pub level_index: usize,
    data: Vec<f64>,
}

impl Field {
    /// An all-zero field.
    pub fn zeros(dim: usize, n: usize, level_index: usize) -> Self {
        debug_assert!(dim == 2 || dim == 3);
        Field {
            dim,
            n,
            level_index,
            data: vec![0.0; n.pow(dim as u32)],
        }
    }

    /// Fills interior points (all of them, regardless of level membership)
    /// from a function of the index, in lexicographic order.
    pub fn from_fn_interior(
        dim: usize,
        n: usize,
        level_index: usize,
        mut f: impl FnMut([usize; 3]) -> f64,
    ) -> Self {
        let mut field = Field::zeros(dim, n, level_index);
        if dim == 2 {
            for i in 1..n - 1 {
                for j in 1..n - 1 {
                    field.set2(i, j, f([i, j, 0]));
                }
            }
        } else {
            for i in 1..n - 1 {
                for j in 1..n - 1 {
                    for k in 1..n - 1 {
                        field.set3(i, j, k, f([i, j, k]));
                    }
                }
            }
        }
        field
    }

    /// Interior points drawn uniformly from [−1, 1], seeded and filled in
    /// lexicographic order, so a seed pins the field exactly.
    pub fn random_interior(dim: usize, n: usize, level_index: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Field::from_fn_interior(dim, n, level_index, |_| rng.random_range(-1.0..=1.0))
    }

    #[inline]
    fn idx2(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    #[inline]
    fn idx3(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    #[inline]
    pub fn at2(&self, i: usize, j: usize) -> f64 {
        self.data[self.idx2(i, j)]
    }

    #[inline]
    pub fn at3(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.idx3(i, j, k)]
    }

    #[inline]
    pub fn set2(&mut self, i: usize, j: usize, value: f64) {
        let idx = self.idx2(i, j);
        self.data[idx] = value;
    }

    #[inline]
    pub fn set3(&mut self, i: usize, j: usize, k: usize, value: f64) {
        let idx = self.idx3(i, j, k);
        self.data[idx] = value;
    }

    /// Dimension-generic read; 2D ignores `idx[2]`.
    #[inline]
    pub fn at(&self, idx: [usize; 3]) -> f64 {
        if self.dim == 2 {
            self.at2(idx[0], idx[1])
        } else {
            self.at3(idx[0], idx[1], idx[2])
        }
    }

    /// Dimension-generic write; 2D ignores `idx[2]`.
    #[inline]
    pub fn set(&mut self, idx: [usize; 3], value: f64) {
        if self.dim == 2 {
            self.set2(idx[0], idx[1], value);
        } else {
            self.set3(idx[0], idx[1], idx[2], value);
        }
    }

    /// Maximum absolute value over all points.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// self ← self + alpha · other, pointwise.
    pub fn add_scaled(&mut self, other: &Field, alpha: f64) {
        debug_assert_eq!(self.data.len(), other.data.len());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    /// self ← alpha · self, pointwise.
    pub fn scale(&mut self, alpha: f64) {
        for a in &mut self.data {
            *a *= alpha;
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// True if every entry is finite.
    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn storage_is_row_major() {
        let mut f2 = Field::zeros(2, 5, 0);
        f2.set2(1, 3, 7.0);
        assert_eq!(f2.as_slice()[1 * 5 + 3], 7.0);
        let mut f3 = Field::zeros(3, 5, 0);
        f3.set3(1, 2, 3, 7.0);
        assert_eq!(f3.as_slice()[(1 * 5 + 2) * 5 + 3], 7.0);
        assert_eq!(f3.at([1, 2, 3]), 7.0);
    }

    #[test]
    fn random_interior_is_seed_deterministic_and_leaves_boundary_zero() {
        let a = Field::random_interior(2, 9, 4, 42);
        let b = Field::random_interior(2, 9, 4, 42);
        let c = Field::random_interior(2, 9, 4, 43);
        assert_eq!(a, b);
        assert_ne!(a, c);
        for i in 0..9 {
            assert_eq!(a.at2(i, 0), 0.0);
            assert_eq!(a.at2(i, 8), 0.0);
            assert_eq!(a.at2(0, i), 0.0);
            assert_eq!(a.at2(8, i), 0.0);
        }
        assert!(a.max_norm() <= 1.0);
        assert!(a.max_norm() > 0.0);
    }

    #[test]
    fn add_scaled_and_scale() {
        let mut a = Field::from_fn_interior(2, 5, 0, |idx| (idx[0] + idx[1]) as f64);
        let b = Field::from_fn_interior(2, 5, 0, |idx| idx[0] as f64);
        a.add_scaled(&b, -1.0);
        assert_eq!(a.at2(2, 3), 3.0);
        a.scale(2.0);
        assert_eq!(a.at2(2, 3), 6.0);
    }
}
