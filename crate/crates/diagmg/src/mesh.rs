//! Grid levels and level hierarchies.
//!
//! Every level lives on the finest grid's index space: a level is a stride
//! together with a lattice-class rule that selects which fine-grid indices
//! are its nodes. No rotated coordinate system is ever introduced; the
//! "rotation" of the coarser lattices is entirely a property of which nodes
//! are kept.
//!
//! With n = 2^k + 1 points per side (boundaries included) and depth L, the
//! diagonal hierarchy has 2L+1 levels in 2D and 3L+1 in 3D, each coarsening
//! step halving the lattice density. The conventional hierarchy used by the
//! baseline has L+1 axis-aligned levels with strides 1, 2, …, 2^L.

use crate::field::Field;
use crate::{Error, Scheme};

/// Lattice class of one hierarchy level.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum LevelClass {
    /// 2D axis-aligned square lattice; node spacing stride·h.
    Axis,
    /// 2D 45°-rotated square lattice: stride multiples with (i+j)/stride
    /// even; node spacing √2·stride·h.
    Diagonal,
    /// 3D simple cubic lattice; node spacing stride·h.
    Cubic,
    /// 3D face-centered cubic lattice: stride multiples with (i+j+k)/stride
    /// even; nearest-neighbor spacing √2·stride·h.
    FaceCentered,
    /// 3D body-centered cubic lattice: i/stride, j/stride, k/stride all even
    /// (cell corners) or all odd (cell centers); nearest-neighbor spacing
    /// √3·stride·h. Center nodes are *not* nodes of the face-centered level
    /// above.
    BodyCentered,
}

impl std::fmt::Display for LevelClass {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            LevelClass::Axis => "axis",
            LevelClass::Diagonal => "diagonal",
            LevelClass::Cubic => "cubic",
            LevelClass::FaceCentered => "face-centered",
            LevelClass::BodyCentered => "body-centered",
        };
        write!(out, "{name}")
    }
}

/// One level of a hierarchy. `index` counts from 0 at the coarsest level,
/// increasing toward the finest.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct GridLevel {
    pub index: usize,
    pub dim: usize,
    pub klass: LevelClass,
    pub stride: usize,
}

impl GridLevel {
    /// Node-membership test on fine-grid indices. 2D levels require k = 0.
    pub fn is_member(&self, idx: [usize; 3], n: usize) -> bool {
        let [i, j, k] = idx;
        let s = self.stride;
        if i >= n || j >= n {
            return false;
        }
        if self.dim == 2 {
            if k != 0 {
                return false;
            }
        } else if k >= n {
            return false;
        }
        if i % s != 0 || j % s != 0 || (self.dim == 3 && k % s != 0) {
            return false;
        }
        let (a, b, c) = (i / s, j / s, k / s);
        match self.klass {
            LevelClass::Axis | LevelClass::Cubic => true,
            LevelClass::Diagonal => (a + b) % 2 == 0,
            LevelClass::FaceCentered => (a + b + c) % 2 == 0,
            LevelClass::BodyCentered => a % 2 == b % 2 && b % 2 == c % 2,
        }
    }

    /// Membership restricted to the interior (no coordinate on the boundary).
    pub fn is_interior_member(&self, idx: [usize; 3], n: usize) -> bool {
        let [i, j, k] = idx;
        let inside = i >= 1
            && i <= n - 2
            && j >= 1
            && j <= n - 2
            && (self.dim == 2 || (k >= 1 && k <= n - 2));
        inside && self.is_member(idx, n)
    }

    /// Visits every interior node of the level in lexicographic order.
    pub fn for_each_interior(&self, n: usize, mut visit: impl FnMut([usize; 3])) {
        let s = self.stride;
        let hi = n - 1 - s; // last stride multiple inside the interior
        if self.dim == 2 {
            for i in (s..=hi).step_by(s) {
                for j in (s..=hi).step_by(s) {
                    if self.is_member([i, j, 0], n) {
                        visit([i, j, 0]);
                    }
                }
            }
        } else {
            for i in (s..=hi).step_by(s) {
                for j in (s..=hi).step_by(s) {
                    for k in (s..=hi).step_by(s) {
                        if self.is_member([i, j, k], n) {
                            visit([i, j, k]);
                        }
                    }
                }
            }
        }
    }

    /// Number of interior nodes.
    pub fn interior_count(&self, n: usize) -> usize {
        let mut count = 0;
        self.for_each_interior(n, |_| count += 1);
        count
    }

    /// Nearest-neighbor node spacing in units of the finest spacing h.
    pub fn spacing_in_h(&self) -> f64 {
        let s = self.stride as f64;
        match self.klass {
            LevelClass::Axis | LevelClass::Cubic => s,
            LevelClass::Diagonal | LevelClass::FaceCentered => std::f64::consts::SQRT_2 * s,
            LevelClass::BodyCentered => 3f64.sqrt() * s,
        }
    }
}

/// A full multigrid hierarchy over one fine grid.
#[derive(Clone, Debug)]
pub struct Hierarchy {
    pub dim: usize,
    /// Points per side, boundaries included; n = 2^k + 1.
    pub n: usize,
    pub scheme: Scheme,
    /// Levels ordered coarsest (index 0) to finest.
    pub levels: Vec<GridLevel>,
}

fn check_grid(dim: usize, n: usize, depth: usize) -> Result<usize, Error> {
    if dim != 2 && dim != 3 {
        return Err(Error::BadDimension { dim });
    }
    if n < 5 || !(n - 1).is_power_of_two() {
        return Err(Error::BadGridSize { n });
    }
    if depth == 0 {
        return Err(Error::DepthTooSmall);
    }
    let max = Hierarchy::max_depth(n);
    if depth > max {
        return Err(Error::DepthTooLarge { n, depth, max });
    }
    Ok(max)
}

impl Hierarchy {
    /// Deepest usable hierarchy for a valid grid size: with n = 2^k + 1 the
    /// coarsest lattice of a depth-L hierarchy has stride 2^L, and L = k − 1
    /// leaves exactly one interior unknown.
    pub fn max_depth(n: usize) -> usize {
        (n - 1).trailing_zeros() as usize - 1
    }

    /// Builds the diagonally oriented hierarchy: 2L+1 levels (2D) or 3L+1
    /// levels (3D), density halving at every step, coarsest level axis/cubic.
    pub fn diagonal(dim: usize, n: usize, depth: usize) -> Result<Self, Error> {
        check_grid(dim, n, depth)?;
        let steps = if dim == 2 { 2 * depth } else { 3 * depth };
        let mut levels = Vec::with_capacity(steps + 1);
        // m = number of coarsening steps below the finest level
        for (index, m) in (0..=steps).rev().enumerate() {
            let (klass, stride) = if dim == 2 {
                match m % 2 {
                    0 => (LevelClass::Axis, 1usize << (m / 2)),
                    _ => (LevelClass::Diagonal, 1usize << (m / 2)),
                }
            } else {
                match m % 3 {
                    0 => (LevelClass::Cubic, 1usize << (m / 3)),
                    1 => (LevelClass::FaceCentered, 1usize << (m / 3)),
                    _ => (LevelClass::BodyCentered, 1usize << (m / 3)),
                }
            };
            levels.push(GridLevel {
                index,
                dim,
                klass,
                stride,
            });
        }
        Ok(Hierarchy {
            dim,
            n,
            scheme: Scheme::Diagonal,
            levels,
        })
    }

    /// Builds the conventional hierarchy used by the baseline: L+1
    /// axis-aligned (2D) or simple-cubic (3D) levels with strides 1, 2, …, 2^L.
    pub fn conventional(dim: usize, n: usize, depth: usize) -> Result<Self, Error> {
        check_grid(dim, n, depth)?;
        let klass = if dim == 2 {
            LevelClass::Axis
        } else {
            LevelClass::Cubic
        };
        let levels = (0..=depth)
            .map(|index| GridLevel {
                index,
                dim,
                klass,
                stride: 1usize << (depth - index),
            })
            .collect();
        Ok(Hierarchy {
            dim,
            n,
            scheme: Scheme::Usual,
            levels,
        })
    }

    pub fn level(&self, index: usize) -> &GridLevel {
        &self.levels[index]
    }

    pub fn finest(&self) -> &GridLevel {
        self.levels.last().expect("hierarchy has at least one level")
    }

    pub fn coarsest(&self) -> &GridLevel {
        &self.levels[0]
    }

    /// Finest-grid spacing.
    pub fn h(&self) -> f64 {
        1.0 / (self.n - 1) as f64
    }

    /// Interior unknowns of the finest grid: (n−2)^dim.
    pub fn interior_unknowns(&self) -> usize {
        (self.n - 2).pow(self.dim as u32)
    }
}

/// Resolves the level a field is tagged with and checks its lattice class.
pub(crate) fn field_level<'h>(
    hier: &'h Hierarchy,
    field: &Field,
    klass: LevelClass,
) -> Result<&'h GridLevel, Error> {
    debug_assert_eq!(field.n, hier.n);
    debug_assert_eq!(field.dim, hier.dim);
    if field.level_index >= hier.levels.len() {
        return Err(Error::LevelMismatch {
            expected: hier.levels.len() - 1,
            found: field.level_index,
        });
    }
    let level = hier.level(field.level_index);
    if level.klass != klass {
        return Err(Error::ClassMismatch {
            expected: klass,
            found: level.klass,
        });
    }
    Ok(level)
}

/// Checks that the level at `index` has the given class.
pub(crate) fn class_at(
    hier: &Hierarchy,
    index: usize,
    klass: LevelClass,
) -> Result<&GridLevel, Error> {
    let level = hier.level(index);
    if level.klass != klass {
        return Err(Error::ClassMismatch {
            expected: klass,
            found: level.klass,
        });
    }
    Ok(level)
}

/// Checks that two fields sit on the same level.
pub(crate) fn same_level(a: &Field, b: &Field) -> Result<(), Error> {
    if a.level_index != b.level_index {
        return Err(Error::LevelMismatch {
            expected: a.level_index,
            found: b.level_index,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_2d_65_has_11_levels_with_alternating_classes() {
        let hier = Hierarchy::diagonal(2, 65, 5).unwrap();
        assert_eq!(hier.levels.len(), 11);
        let finest = hier.finest();
        assert_eq!(finest.klass, LevelClass::Axis);
        assert_eq!(finest.stride, 1);
        assert_eq!(hier.coarsest().klass, LevelClass::Axis);
        assert_eq!(hier.coarsest().stride, 32);
        // spacings from the finest: h, √2h, 2h, 2√2h, …, 32h
        let spacings: Vec<f64> = hier.levels.iter().rev().map(|l| l.spacing_in_h()).collect();
        let expect = [
            1.0,
            2f64.sqrt(),
            2.0,
            2.0 * 2f64.sqrt(),
            4.0,
            4.0 * 2f64.sqrt(),
            8.0,
            8.0 * 2f64.sqrt(),
            16.0,
            16.0 * 2f64.sqrt(),
            32.0,
        ];
        for (got, want) in spacings.iter().zip(expect) {
            assert!((got - want).abs() < 1e-12, "got {got}, want {want}");
        }
        // indices count up from the coarsest
        for (pos, level) in hier.levels.iter().enumerate() {
            assert_eq!(level.index, pos);
        }
    }

    #[test]
    fn diagonal_2d_5_has_3_levels() {
        let hier = Hierarchy::diagonal(2, 5, 1).unwrap();
        assert_eq!(hier.levels.len(), 3);
        assert_eq!(hier.coarsest().stride, 2);
        // coarsest level of a maximal hierarchy has exactly one interior node
        assert_eq!(hier.coarsest().interior_count(5), 1);
    }

    #[test]
    fn diagonal_3d_level_chain() {
        let hier = Hierarchy::diagonal(3, 17, 3).unwrap();
        assert_eq!(hier.levels.len(), 10);
        let classes: Vec<LevelClass> = hier.levels.iter().rev().map(|l| l.klass).collect();
        use LevelClass::*;
        assert_eq!(
            classes,
            vec![
                Cubic,
                FaceCentered,
                BodyCentered,
                Cubic,
                FaceCentered,
                BodyCentered,
                Cubic,
                FaceCentered,
                BodyCentered,
                Cubic
            ]
        );
        let strides: Vec<usize> = hier.levels.iter().rev().map(|l| l.stride).collect();
        assert_eq!(strides, vec![1, 1, 1, 2, 2, 2, 4, 4, 4, 8]);
        assert_eq!(hier.coarsest().interior_count(17), 1);
    }

    #[test]
    fn rejects_bad_sizes_and_depths() {
        assert_eq!(
            Hierarchy::diagonal(2, 10, 1).unwrap_err(),
            Error::BadGridSize { n: 10 }
        );
        assert_eq!(
            Hierarchy::diagonal(2, 4, 1).unwrap_err(),
            Error::BadGridSize { n: 4 }
        );
        // depth 4 on n = 17 would give a coarsest stride of 16 = n − 1, whose
        // only lattice node inside the domain edge sits on the boundary
        assert_eq!(
            Hierarchy::diagonal(3, 17, 4).unwrap_err(),
            Error::DepthTooLarge {
                n: 17,
                depth: 4,
                max: 3
            }
        );
        assert_eq!(
            Hierarchy::conventional(2, 65, 6).unwrap_err(),
            Error::DepthTooLarge {
                n: 65,
                depth: 6,
                max: 5
            }
        );
        assert_eq!(Hierarchy::diagonal(4, 17, 2).unwrap_err(), Error::BadDimension { dim: 4 });
    }

    #[test]
    fn node_masks_match_lattice_rules() {
        let fcc = GridLevel {
            index: 0,
            dim: 3,
            klass: LevelClass::FaceCentered,
            stride: 1,
        };
        assert!(fcc.is_member([1, 1, 0], 9));
        assert!(!fcc.is_member([1, 0, 0], 9));
        let bcc = GridLevel {
            index: 0,
            dim: 3,
            klass: LevelClass::BodyCentered,
            stride: 1,
        };
        assert!(bcc.is_member([1, 1, 1], 9)); // cell center
        assert!(bcc.is_member([2, 2, 2], 9)); // cell corner
        assert!(!bcc.is_member([1, 1, 0], 9));
        // the origin is a node of every level class
        for klass in [
            LevelClass::Cubic,
            LevelClass::FaceCentered,
            LevelClass::BodyCentered,
        ] {
            let level = GridLevel {
                index: 0,
                dim: 3,
                klass,
                stride: 2,
            };
            assert!(level.is_member([0, 0, 0], 9));
        }
        for klass in [LevelClass::Axis, LevelClass::Diagonal] {
            let level = GridLevel {
                index: 0,
                dim: 2,
                klass,
                stride: 2,
            };
            assert!(level.is_member([0, 0, 0], 9));
        }
    }

    #[test]
    fn interior_counts_on_small_grids() {
        let axis = GridLevel {
            index: 0,
            dim: 2,
            klass: LevelClass::Axis,
            stride: 1,
        };
        assert_eq!(axis.interior_count(5), 9);
        let diag = GridLevel {
            index: 0,
            dim: 2,
            klass: LevelClass::Diagonal,
            stride: 1,
        };
        assert_eq!(diag.interior_count(5), 5);
        let mut nodes = Vec::new();
        diag.for_each_interior(5, |idx| nodes.push((idx[0], idx[1])));
        assert_eq!(nodes, vec![(1, 1), (1, 3), (2, 2), (3, 1), (3, 3)]);
        let cubic = GridLevel {
            index: 0,
            dim: 3,
            klass: LevelClass::Cubic,
            stride: 1,
        };
        assert_eq!(cubic.interior_count(5), 27);
    }

    /// Counting lattice nodes over the half-open box [0, n−1)^dim — which
    /// tiles space exactly — each coarsening step halves the count.
    #[test]
    fn density_halves_at_every_step() {
        for (dim, ns) in [(2usize, vec![5usize, 9, 17, 33]), (3, vec![5, 9, 17])] {
            for n in ns {
                let depth = Hierarchy::max_depth(n);
                let hier = Hierarchy::diagonal(dim, n, depth).unwrap();
                let counts: Vec<usize> = hier
                    .levels
                    .iter()
                    .rev()
                    .map(|level| {
                        let mut count = 0;
                        for i in 0..n - 1 {
                            for j in 0..n - 1 {
                                if dim == 2 {
                                    if level.is_member([i, j, 0], n) {
                                        count += 1;
                                    }
                                } else {
                                    for k in 0..n - 1 {
                                        if level.is_member([i, j, k], n) {
                                            count += 1;
                                        }
                                    }
                                }
                            }
                        }
                        count
                    })
                    .collect();
                for pair in counts.windows(2) {
                    assert_eq!(pair[0], 2 * pair[1], "dim {dim}, n {n}: {counts:?}");
                }
            }
        }
    }

    /// Neighbor relations between consecutive 3D levels, checked exhaustively
    /// on interior cells: FCC nodes have 6 cubic axis neighbors, BCC corner
    /// nodes have 12 FCC face-diagonal neighbors, doubled-cubic nodes have 8
    /// BCC body-diagonal neighbors.
    #[test]
    fn three_d_neighbor_relations() {
        let n = 9;
        let hier = Hierarchy::diagonal(3, n, 2).unwrap();
        let fcc = hier.level(hier.levels.len() - 2);
        let bcc = hier.level(hier.levels.len() - 3);
        let cubic2 = hier.level(hier.levels.len() - 4);
        assert_eq!(fcc.klass, LevelClass::FaceCentered);
        assert_eq!(bcc.klass, LevelClass::BodyCentered);
        assert_eq!(cubic2.klass, LevelClass::Cubic);
        // FCC node (2,2,2) also lies on the BCC level as a corner
        assert!(bcc.is_member([2, 2, 2], n));
        // all 12 face-diagonal neighbors of a BCC corner are FCC nodes
        let mut fd = Vec::new();
        for (a, b) in [(1i64, 1i64), (1, -1), (-1, 1), (-1, -1)] {
            fd.push([a, b, 0]);
            fd.push([a, 0, b]);
            fd.push([0, a, b]);
        }
        for d in &fd {
            let p = [
                (2 + d[0]) as usize,
                (2 + d[1]) as usize,
                (2 + d[2]) as usize,
            ];
            assert!(fcc.is_member(p, n), "{p:?}");
        }
        // all 8 body-diagonal neighbors of a doubled-cubic node are BCC nodes
        assert!(cubic2.is_member([4, 4, 4], n));
        for a in [-1i64, 1] {
            for b in [-1i64, 1] {
                for c in [-1i64, 1] {
                    let p = [(4 + a) as usize, (4 + b) as usize, (4 + c) as usize];
                    assert!(bcc.is_member(p, n), "{p:?}");
                }
            }
        }
        // BCC centers are not FCC nodes
        assert!(!fcc.is_member([1, 1, 1], n));
        assert!(bcc.is_member([1, 1, 1], n));
    }
}
