//! 3D kernels for the cubic → face-centered → body-centered → doubled-cubic
//! level chain: residual stencils on cubic lattices, restriction and
//! prolongation between consecutive levels.
//!
//! As in 2D, every kernel writes only interior nodes of its target level;
//! neighbor reads that leave the lattice pick up stored zeros (homogeneous
//! Dirichlet extension) and no weight is renormalized near the boundary.
//! Prolongation is again a two-half-sweep Jacobi iteration on the target
//! lattice's own nearest-neighbor Laplacian, new nodes first, coincident
//! nodes second from the updated values. The body-centered → face-centered
//! step is the one exception to strict two-coloring: the face-centered
//! lattice's new nodes (face centers) and coincident nodes (cell corners)
//! have different neighbor geometry, so they get separate stencils and can
//! carry separate over-relaxation factors.

use crate::cycle::FlopLedger;
use crate::field::Field;
use crate::mesh::{class_at, field_level, same_level, Hierarchy, LevelClass};
use crate::Error;

const RESIDUAL2_FLOPS: u64 = 9;
const RESIDUAL4_FLOPS: u64 = 22;
const AVERAGE_RHS_FLOPS: u64 = 8;
const RESTRICT_TO_FC_FLOPS: u64 = 8;
const RESTRICT_TO_BC_CORNER_FLOPS: u64 = 14;
const RESTRICT_TO_BC_CENTER_FLOPS: u64 = 6;
const RESTRICT_TO_CUBIC_FLOPS: u64 = 10;
const PROLONG_BC_FLOPS: u64 = 10;
const PROLONG_FC_FACE_FLOPS: u64 = 9;
const PROLONG_FC_CORNER_FLOPS: u64 = 14;
const PROLONG_CUBIC_FLOPS: u64 = 8;

#[inline]
fn axis_sum(u: &Field, i: usize, j: usize, k: usize, s: usize) -> f64 {
    u.at3(i + s, j, k)
        + u.at3(i - s, j, k)
        + u.at3(i, j + s, k)
        + u.at3(i, j - s, k)
        + u.at3(i, j, k + s)
        + u.at3(i, j, k - s)
}

#[inline]
fn face_diagonal_sum(u: &Field, i: usize, j: usize, k: usize, s: usize) -> f64 {
    u.at3(i + s, j + s, k)
        + u.at3(i + s, j - s, k)
        + u.at3(i - s, j + s, k)
        + u.at3(i - s, j - s, k)
        + u.at3(i + s, j, k + s)
        + u.at3(i + s, j, k - s)
        + u.at3(i - s, j, k + s)
        + u.at3(i - s, j, k - s)
        + u.at3(i, j + s, k + s)
        + u.at3(i, j + s, k - s)
        + u.at3(i, j - s, k + s)
        + u.at3(i, j - s, k - s)
}

#[inline]
fn body_diagonal_sum(u: &Field, i: usize, j: usize, k: usize, s: usize) -> f64 {
    u.at3(i + s, j + s, k + s)
        + u.at3(i + s, j + s, k - s)
        + u.at3(i + s, j - s, k + s)
        + u.at3(i + s, j - s, k - s)
        + u.at3(i - s, j + s, k + s)
        + u.at3(i - s, j + s, k - s)
        + u.at3(i - s, j - s, k + s)
        + u.at3(i - s, j - s, k - s)
}

/// Residual of the 7-point Laplacian on `u`'s (cubic) level:
/// r = f − (Σ_axis u − 6u)/(sh)².
pub fn residual_order2(
    hier: &Hierarchy,
    u: &Field,
    f: &Field,
    ledger: &mut FlopLedger,
) -> Result<Field, Error> {
    let level = field_level(hier, u, LevelClass::Cubic)?;
    same_level(u, f)?;
    let s = level.stride;
    let inv_h2 = 1.0 / (s as f64 * hier.h()).powi(2);
    let mut r = Field::zeros(3, hier.n, u.level_index);
    let mut nodes = 0u64;
    level.for_each_interior(hier.n, |[i, j, k]| {
        let lap = axis_sum(u, i, j, k, s) - 6.0 * u.at3(i, j, k);
        r.set3(i, j, k, f.at3(i, j, k) - lap * inv_h2);
        nodes += 1;
    });
    ledger.residual += nodes * RESIDUAL2_FLOPS;
    Ok(r)
}

/// Residual of the compact 19-point fourth-order stencil:
/// r = f̄ − (2 Σ_axis u + Σ_facediag u − 24u)/(6(sh)²), with f̄ from
/// [`average_rhs`].
pub fn residual_order4(
    hier: &Hierarchy,
    u: &Field,
    f_avg: &Field,
    ledger: &mut FlopLedger,
) -> Result<Field, Error> {
    let level = field_level(hier, u, LevelClass::Cubic)?;
    same_level(u, f_avg)?;
    let s = level.stride;
    let c = 1.0 / (6.0 * (s as f64 * hier.h()).powi(2));
    let mut r = Field::zeros(3, hier.n, u.level_index);
    let mut nodes = 0u64;
    level.for_each_interior(hier.n, |[i, j, k]| {
        let lap = 2.0 * axis_sum(u, i, j, k, s) + face_diagonal_sum(u, i, j, k, s)
            - 24.0 * u.at3(i, j, k);
        r.set3(i, j, k, f_avg.at3(i, j, k) - lap * c);
        nodes += 1;
    });
    ledger.residual += nodes * RESIDUAL4_FLOPS;
    Ok(r)
}

/// Right-hand-side averaging for the fourth-order stencil:
/// f̄ = (6f + Σ_axis f)/12; charged to `rhs_setup`.
pub fn average_rhs(
    hier: &Hierarchy,
    f: &Field,
    ledger: &mut FlopLedger,
) -> Result<Field, Error> {
    let level = field_level(hier, f, LevelClass::Cubic)?;
    let s = level.stride;
    let mut out = Field::zeros(3, hier.n, f.level_index);
    let mut nodes = 0u64;
    level.for_each_interior(hier.n, |[i, j, k]| {
        out.set3(
            i,
            j,
            k,
            (6.0 * f.at3(i, j, k) + axis_sum(f, i, j, k, s)) / 12.0,
        );
        nodes += 1;
    });
    ledger.rhs_setup += nodes * AVERAGE_RHS_FLOPS;
    Ok(out)
}

/// Restricts a residual from a cubic level (stride s) to the face-centered
/// level below it (same stride): (6r + Σ_axis r)/12 at each kept node.
pub fn restrict_cubic_to_face_centered(
    hier: &Hierarchy,
    r: &Field,
    ledger: &mut FlopLedger,
) -> Result<Field, Error> {
    let fine = field_level(hier, r, LevelClass::Cubic)?;
    if r.level_index == 0 {
        return Err(Error::LevelMismatch {
            expected: 1,
            found: 0,
        });
    }
    let coarse = class_at(hier, r.level_index - 1, LevelClass::FaceCentered)?;
    debug_assert_eq!(coarse.stride, fine.stride);
    let s = fine.stride;
    let mut out = Field::zeros(3, hier.n, r.level_index - 1);
    let mut nodes = 0u64;
    coarse.for_each_interior(hier.n, |[i, j, k]| {
        out.set3(
            i,
            j,
            k,
            (6.0 * r.at3(i, j, k) + axis_sum(r, i, j, k, s)) / 12.0,
        );
        nodes += 1;
    });
    ledger.restriction += nodes * RESTRICT_TO_FC_FLOPS;
    Ok(out)
}

/// Restricts a residual from a face-centered level (stride s) to the
/// body-centered level below it (same stride). Cell corners (i/s, j/s, k/s
/// all even) average their 12 face-diagonal neighbors with self weight 1/2:
/// (12r + Σ_fd r)/24. Cell centers (all odd) are not face-centered nodes, so
/// they carry no residual of their own and average their 6 axis neighbors:
/// Σ_axis r / 6.
pub fn restrict_face_centered_to_body_centered(
    hier: &Hierarchy,
    r: &Field,
    ledger: &mut FlopLedger,
) -> Result<Field, Error> {
    let fine = field_level(hier, r, LevelClass::FaceCentered)?;
    if r.level_index == 0 {
        return Err(Error::LevelMismatch {
            expected: 1,
            found: 0,
        });
    }
    let coarse = class_at(hier, r.level_index - 1, LevelClass::BodyCentered)?;
    debug_assert_eq!(coarse.stride, fine.stride);
    let s = fine.stride;
    let mut out = Field::zeros(3, hier.n, r.level_index - 1);
    let (mut corners, mut centers) = (0u64, 0u64);
    coarse.for_each_interior(hier.n, |[i, j, k]| {
        if (i / s) % 2 == 0 {
            let v = (12.0 * r.at3(i, j, k) + face_diagonal_sum(r, i, j, k, s)) / 24.0;
            out.set3(i, j, k, v);
            corners += 1;
        } else {
            out.set3(i, j, k, axis_sum(r, i, j, k, s) / 6.0);
            centers += 1;
        }
    });
    ledger.restriction +=
        corners * RESTRICT_TO_BC_CORNER_FLOPS + centers * RESTRICT_TO_BC_CENTER_FLOPS;
    Ok(out)
}

/// Restricts a residual from a body-centered level (stride s) to the cubic
/// level below it (stride 2s): (8r + Σ_bd r)/16 at each kept node.
pub fn restrict_body_centered_to_cubic(
    hier: &Hierarchy,
    r: &Field,
    ledger: &mut FlopLedger,
) -> Result<Field, Error> {
    let fine = field_level(hier, r, LevelClass::BodyCentered)?;
    if r.level_index == 0 {
        return Err(Error::LevelMismatch {
            expected: 1,
            found: 0,
        });
    }
    let coarse = class_at(hier, r.level_index - 1, LevelClass::Cubic)?;
    debug_assert_eq!(coarse.stride, 2 * fine.stride);
    let s = fine.stride;
    let mut out = Field::zeros(3, hier.n, r.level_index - 1);
    let mut nodes = 0u64;
    coarse.for_each_interior(hier.n, |[i, j, k]| {
        out.set3(
            i,
            j,
            k,
            (8.0 * r.at3(i, j, k) + body_diagonal_sum(r, i, j, k, s)) / 16.0,
        );
        nodes += 1;
    });
    ledger.restriction += nodes * RESTRICT_TO_CUBIC_FLOPS;
    Ok(out)
}

/// Prolongation from a cubic level (stride 2s) to the body-centered level
/// above it (stride s). The body-centered lattice's 8 nearest neighbors sit
/// at (±s, ±s, ±s), giving the Jacobi step v = (Σ_bd v − 4(sh)²·r)/8 with
/// the residual term scaled by `relax`. Cell centers (new nodes) first from
/// coarse values, cell corners second from the updated centers.
pub fn prolong_to_body_centered(
    hier: &Hierarchy,
    coarse: &Field,
    r: &Field,
    relax: f64,
    ledger: &mut FlopLedger,
) -> Result<Field, Error> {
    let target = field_level(hier, r, LevelClass::BodyCentered)?;
    if r.level_index == 0 {
        return Err(Error::LevelMismatch {
            expected: 1,
            found: 0,
        });
    }
    if coarse.level_index + 1 != r.level_index {
        return Err(Error::LevelMismatch {
            expected: r.level_index - 1,
            found: coarse.level_index,
        });
    }
    let below = class_at(hier, coarse.level_index, LevelClass::Cubic)?;
    debug_assert_eq!(below.stride, 2 * target.stride);
    let s = target.stride;
    let c = 4.0 * relax * (s as f64 * hier.h()).powi(2);
    let mut v = Field::zeros(3, hier.n, r.level_index);
    let mut nodes = 0u64;
    target.for_each_interior(hier.n, |[i, j, k]| {
        if (i / s) % 2 == 1 {
            let nb = body_diagonal_sum(coarse, i, j, k, s);
            v.set3(i, j, k, (nb - c * r.at3(i, j, k)) / 8.0);
            nodes += 1;
        }
    });
    target.for_each_interior(hier.n, |[i, j, k]| {
        if (i / s) % 2 == 0 {
            let nb = body_diagonal_sum(&v, i, j, k, s);
            v.set3(i, j, k, (nb - c * r.at3(i, j, k)) / 8.0);
            nodes += 1;
        }
    });
    ledger.prolongation += nodes * PROLONG_BC_FLOPS;
    Ok(v)
}

/// Prolongation from a body-centered level to the face-centered level above
/// it (same stride s). Face centers (exactly one of i/s, j/s, k/s even) are
/// the new nodes: their body-centered neighbors are the 2 cell centers at ±s
/// along the even axis and the 4 cell corners across the in-plane diagonals,
/// giving v = (2·Σ_near v + Σ_plane v − 2(sh)²·r)/8 with the residual term
/// scaled by `relax_face`. Cell corners (coincident nodes) then take a full
/// face-centered Jacobi step from the 12 just-updated face centers:
/// v = (Σ_fd v − 4(sh)²·r)/12, scaled by `relax_corner`. Cell centers belong
/// only to the body-centered level and are not part of the result.
pub fn prolong_to_face_centered(
    hier: &Hierarchy,
    coarse: &Field,
    r: &Field,
    relax_face: f64,
    relax_corner: f64,
    ledger: &mut FlopLedger,
) -> Result<Field, Error> {
    let target = field_level(hier, r, LevelClass::FaceCentered)?;
    if r.level_index == 0 {
        return Err(Error::LevelMismatch {
            expected: 1,
            found: 0,
        });
    }
    if coarse.level_index + 1 != r.level_index {
        return Err(Error::LevelMismatch {
            expected: r.level_index - 1,
            found: coarse.level_index,
        });
    }
    let below = class_at(hier, coarse.level_index, LevelClass::BodyCentered)?;
    debug_assert_eq!(below.stride, target.stride);
    let s = target.stride;
    let h2 = (s as f64 * hier.h()).powi(2);
    let c_face = 2.0 * relax_face * h2;
    let c_corner = 4.0 * relax_corner * h2;
    let mut v = Field::zeros(3, hier.n, r.level_index);
    let (mut faces, mut corners) = (0u64, 0u64);
    target.for_each_interior(hier.n, |[i, j, k]| {
        let (pi, pj, pk) = ((i / s) % 2, (j / s) % 2, (k / s) % 2);
        if pi + pj + pk == 2 {
            // face center: one parity even; the even axis is the face normal
            let (near, plane) = if pi == 0 {
                (
                    coarse.at3(i + s, j, k) + coarse.at3(i - s, j, k),
                    coarse.at3(i, j + s, k + s)
                        + coarse.at3(i, j + s, k - s)
                        + coarse.at3(i, j - s, k + s)
                        + coarse.at3(i, j - s, k - s),
                )
            } else if pj == 0 {
                (
                    coarse.at3(i, j + s, k) + coarse.at3(i, j - s, k),
                    coarse.at3(i + s, j, k + s)
                        + coarse.at3(i + s, j, k - s)
                        + coarse.at3(i - s, j, k + s)
                        + coarse.at3(i - s, j, k - s),
                )
            } else {
                (
                    coarse.at3(i, j, k + s) + coarse.at3(i, j, k - s),
                    coarse.at3(i + s, j + s, k)
                        + coarse.at3(i + s, j - s, k)
                        + coarse.at3(i - s, j + s, k)
                        + coarse.at3(i - s, j - s, k),
                )
            };
            v.set3(
                i,
                j,
                k,
                (2.0 * near + plane - c_face * r.at3(i, j, k)) / 8.0,
            );
            faces += 1;
        }
    });
    target.for_each_interior(hier.n, |[i, j, k]| {
        if (i / s) % 2 == 0 && (j / s) % 2 == 0 && (k / s) % 2 == 0 {
            let nb = face_diagonal_sum(&v, i, j, k, s);
            v.set3(i, j, k, (nb - c_corner * r.at3(i, j, k)) / 12.0);
            corners += 1;
        }
    });
    ledger.prolongation += faces * PROLONG_FC_FACE_FLOPS + corners * PROLONG_FC_CORNER_FLOPS;
    Ok(v)
}

/// Prolongation from a face-centered level to the cubic level above it
/// (same stride s). One Jacobi step on the cubic lattice:
/// v = (Σ_axis v − (sh)²·r)/6, residual term scaled by `relax`. Nodes with
/// (i+j+k)/s odd are new (their axis neighbors are face-centered nodes);
/// coincident nodes follow from the updated values.
pub fn prolong_to_cubic(
    hier: &Hierarchy,
    coarse: &Field,
    r: &Field,
    relax: f64,
    ledger: &mut FlopLedger,
) -> Result<Field, Error> {
    let target = field_level(hier, r, LevelClass::Cubic)?;
    if r.level_index == 0 {
        return Err(Error::LevelMismatch {
            expected: 1,
            found: 0,
        });
    }
    if coarse.level_index + 1 != r.level_index {
        return Err(Error::LevelMismatch {
            expected: r.level_index - 1,
            found: coarse.level_index,
        });
    }
    let below = class_at(hier, coarse.level_index, LevelClass::FaceCentered)?;
    debug_assert_eq!(below.stride, target.stride);
    let s = target.stride;
    let c = relax * (s as f64 * hier.h()).powi(2);
    let mut v = Field::zeros(3, hier.n, r.level_index);
    let mut nodes = 0u64;
    target.for_each_interior(hier.n, |[i, j, k]| {
        if (i / s + j / s + k / s) % 2 == 1 {
            let nb = axis_sum(coarse, i, j, k, s);
            v.set3(i, j, k, (nb - c * r.at3(i, j, k)) / 6.0);
            nodes += 1;
        }
    });
    target.for_each_interior(hier.n, |[i, j, k]| {
        if (i / s + j / s + k / s) % 2 == 0 {
            let nb = axis_sum(&v, i, j, k, s);
            v.set3(i, j, k, (nb - c * r.at3(i, j, k)) / 6.0);
            nodes += 1;
        }
    });
    ledger.prolongation += nodes * PROLONG_CUBIC_FLOPS;
    Ok(v)
}
