//! Helpers shared by the integration suites: grid symmetries and field
//! transforms.

use diagmg::Field;

/// One symmetry of the grid: a coordinate permutation followed by per-axis
/// reflection about the grid midpoint. 2D uses the subgroup fixing the
/// third axis.
#[derive(Copy, Clone, Debug)]
pub struct Sym {
    pub perm: [usize; 3],
    pub flip: [bool; 3],
}

impl Sym {
    pub fn apply(&self, idx: [usize; 3], n: usize) -> [usize; 3] {
        let mut out = [0usize; 3];
        for axis in 0..3 {
            let v = idx[self.perm[axis]];
            out[axis] = if self.flip[axis] { n - 1 - v } else { v };
        }
        out
    }
}

/// The full symmetry group of the square (8 elements) or the cube (48).
pub fn symmetries(dim: usize) -> Vec<Sym> {
    let perms: &[[usize; 3]] = if dim == 2 {
        &[[0, 1, 2], [1, 0, 2]]
    } else {
        &[
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ]
    };
    let axes = if dim == 2 { 2 } else { 3 };
    let mut group = Vec::new();
    for &perm in perms {
        for bits in 0u32..1 << axes {
            let mut flip = [false; 3];
            for (a, f) in flip.iter_mut().enumerate().take(axes) {
                *f = bits >> a & 1 == 1;
            }
            group.push(Sym { perm, flip });
        }
    }
    group
}

/// Carries field values across a symmetry: out[σ(idx)] = field[idx].
pub fn transform(field: &Field, sym: &Sym) -> Field {
    let n = field.n;
    let mut out = Field::zeros(field.dim, n, field.level_index);
    if field.dim == 2 {
        for i in 0..n {
            for j in 0..n {
                out.set(sym.apply([i, j, 0], n), field.at2(i, j));
            }
        }
    } else {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out.set(sym.apply([i, j, k], n), field.at3(i, j, k));
                }
            }
        }
    }
    out
}

/// Largest pointwise absolute difference between two fields.
pub fn max_diff(a: &Field, b: &Field) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
