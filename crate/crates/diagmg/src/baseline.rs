//! Conventional multigrid kernels for the baseline V(0,1) cycle:
//! full-weighting restriction, (bi/tri)linear interpolation, and one
//! two-color Jacobi post-smoothing sweep per ascent level.
//!
//! The sweep updates the even color ((i+j+k)/s even) first, from the freshly
//! interpolated values, then the odd color from the updated evens. Updating
//! the colors in sequence is what damps the highest-frequency checkerboard
//! error mode: a simultaneous Jacobi sweep leaves that mode essentially
//! untouched at any over-relaxation factor, and the cycle — which has no
//! other smoothing — then stalls near ρ ≈ 1.

use crate::cycle::FlopLedger;
use crate::field::Field;
use crate::mesh::{class_at, field_level, same_level, Hierarchy, LevelClass};
use crate::Error;

const RESTRICT2_FLOPS: u64 = 11;
const RESTRICT3_FLOPS: u64 = 30;
const SMOOTH2_FLOPS: u64 = 6;
const SMOOTH3_FLOPS: u64 = 8;

fn axis_class(dim: usize) -> LevelClass {
    if dim == 2 {
        LevelClass::Axis
    } else {
        LevelClass::Cubic
    }
}

/// Full-weighting restriction from an axis-aligned level (stride s) to the
/// one below it (stride 2s): the 9-point [1 2 1; 2 4 2; 1 2 1]/16 stencil in
/// 2D, its 27-point product analogue (weights 8/4/2/1 over 64) in 3D.
pub fn restrict_full_weighting(
    hier: &Hierarchy,
    r: &Field,
    ledger: &mut FlopLedger,
) -> Result<Field, Error> {
    let klass = axis_class(hier.dim);
    let fine = field_level(hier, r, klass)?;
    if r.level_index == 0 {
        return Err(Error::LevelMismatch {
            expected: 1,
            found: 0,
        });
    }
    let coarse = class_at(hier, r.level_index - 1, klass)?;
    debug_assert_eq!(coarse.stride, 2 * fine.stride);
    let s = fine.stride;
    let mut out = Field::zeros(hier.dim, hier.n, r.level_index - 1);
    let mut nodes = 0u64;
    if hier.dim == 2 {
        coarse.for_each_interior(hier.n, |[i, j, _]| {
            let axis = r.at2(i + s, j) + r.at2(i - s, j) + r.at2(i, j + s) + r.at2(i, j - s);
            let diag = r.at2(i + s, j + s)
                + r.at2(i + s, j - s)
                + r.at2(i - s, j + s)
                + r.at2(i - s, j - s);
            out.set2(i, j, (4.0 * r.at2(i, j) + 2.0 * axis + diag) / 16.0);
            nodes += 1;
        });
        ledger.restriction += nodes * RESTRICT2_FLOPS;
    } else {
        coarse.for_each_interior(hier.n, |[i, j, k]| {
            let mut axis = 0.0;
            let mut edge = 0.0;
            let mut corner = 0.0;
            for di in [-1i64, 0, 1] {
                for dj in [-1i64, 0, 1] {
                    for dk in [-1i64, 0, 1] {
                        let taps = di.abs() + dj.abs() + dk.abs();
                        if taps == 0 {
                            continue;
                        }
                        let val = r.at3(
                            (i as i64 + di * s as i64) as usize,
                            (j as i64 + dj * s as i64) as usize,
                            (k as i64 + dk * s as i64) as usize,
                        );
                        match taps {
                            1 => axis += val,
                            2 => edge += val,
                            _ => corner += val,
                        }
                    }
                }
            }
            let val = (8.0 * r.at3(i, j, k) + 4.0 * axis + 2.0 * edge + corner) / 64.0;
            out.set3(i, j, k, val);
            nodes += 1;
        });
        ledger.restriction += nodes * RESTRICT3_FLOPS;
    }
    Ok(out)
}

/// (Bi/tri)linear interpolation from an axis-aligned level (stride 2s) to
/// the one above it (stride s): coarse-coincident nodes copy, the rest
/// average their 2, 4, or 8 nearest coarse neighbors. Charged to the
/// prolongation phase (copies are free).
pub fn interpolate(
    hier: &Hierarchy,
    coarse: &Field,
    ledger: &mut FlopLedger,
) -> Result<Field, Error> {
    let klass = axis_class(hier.dim);
    field_level(hier, coarse, klass)?;
    if coarse.level_index + 1 >= hier.levels.len() {
        return Err(Error::LevelMismatch {
            expected: hier.levels.len().saturating_sub(2),
            found: coarse.level_index,
        });
    }
    let target = class_at(hier, coarse.level_index + 1, klass)?;
    let s = target.stride;
    let mut v = Field::zeros(hier.dim, hier.n, coarse.level_index + 1);
    let mut flops = 0u64;
    if hier.dim == 2 {
        target.for_each_interior(hier.n, |[i, j, _]| {
            let (pi, pj) = ((i / s) % 2, (j / s) % 2);
            let val = match (pi, pj) {
                (0, 0) => coarse.at2(i, j),
                (1, 0) => {
                    flops += 2;
                    (coarse.at2(i + s, j) + coarse.at2(i - s, j)) / 2.0
                }
                (0, 1) => {
                    flops += 2;
                    (coarse.at2(i, j + s) + coarse.at2(i, j - s)) / 2.0
                }
                _ => {
                    flops += 4;
                    (coarse.at2(i + s, j + s)
                        + coarse.at2(i + s, j - s)
                        + coarse.at2(i - s, j + s)
                        + coarse.at2(i - s, j - s))
                        / 4.0
                }
            };
            v.set2(i, j, val);
        });
    } else {
        let ds = s as i64;
        target.for_each_interior(hier.n, |[i, j, k]| {
            // average over the coarse nodes at ±s along each odd axis
            let di: &[i64] = if (i / s) % 2 == 1 { &[-1, 1] } else { &[0] };
            let dj: &[i64] = if (j / s) % 2 == 1 { &[-1, 1] } else { &[0] };
            let dk: &[i64] = if (k / s) % 2 == 1 { &[-1, 1] } else { &[0] };
            let mut sum = 0.0;
            let mut count = 0u64;
            for &a in di {
                for &b in dj {
                    for &c in dk {
                        sum += coarse.at3(
                            (i as i64 + a * ds) as usize,
                            (j as i64 + b * ds) as usize,
                            (k as i64 + c * ds) as usize,
                        );
                        count += 1;
                    }
                }
            }
            if count > 1 {
                flops += count; // count−1 adds + 1 multiply
            }
            v.set3(i, j, k, sum / count as f64);
        });
    }
    ledger.prolongation += flops;
    Ok(v)
}

/// One two-color Jacobi sweep, in place: v ← (Σ_axis v − p(sh)²·r)/(2·dim),
/// even color first, odd color second from the updated evens. Each node
/// reads only the other color, so the in-place update is well defined.
pub fn smooth(
    hier: &Hierarchy,
    v: &mut Field,
    r: &Field,
    relax: f64,
    ledger: &mut FlopLedger,
) -> Result<(), Error> {
    let klass = axis_class(hier.dim);
    let level = *field_level(hier, v, klass)?;
    same_level(v, r)?;
    let s = level.stride;
    let c = relax * (s as f64 * hier.h()).powi(2);
    let denom = 2.0 * hier.dim as f64;
    let mut nodes = 0u64;
    for parity in [0, 1] {
        level.for_each_interior(hier.n, |[i, j, k]| {
            if (i / s + j / s + k / s) % 2 != parity {
                return;
            }
            let nb = if hier.dim == 2 {
                v.at2(i + s, j) + v.at2(i - s, j) + v.at2(i, j + s) + v.at2(i, j - s)
            } else {
                v.at3(i + s, j, k)
                    + v.at3(i - s, j, k)
                    + v.at3(i, j + s, k)
                    + v.at3(i, j - s, k)
                    + v.at3(i, j, k + s)
                    + v.at3(i, j, k - s)
            };
            v.set([i, j, k], (nb - c * r.at([i, j, k])) / denom);
            nodes += 1;
        });
    }
    ledger.prolongation += nodes
        * if hier.dim == 2 {
            SMOOTH2_FLOPS
        } else {
            SMOOTH3_FLOPS
        };
    Ok(())
}
