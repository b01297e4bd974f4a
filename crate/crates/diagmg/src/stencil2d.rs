//! 2D kernels: residual stencils on axis-aligned lattices, restriction and
//! prolongation between consecutive axis/diagonal levels.
//!
//! Every kernel writes only interior nodes of its target level and reads
//! neighbors straight from the stored arrays; reads that land on the
//! boundary (or off the target lattice) pick up stored zeros, which is the
//! homogeneous Dirichlet extension. No stencil weight is ever renormalized
//! near the boundary.
//!
//! Prolongation is a two-half-sweep Jacobi iteration on the target lattice's
//! own 4-point Laplacian, driven by the restricted residual: the first
//! half-sweep fills the nodes that are new on this level from coarse values,
//! the second revisits the coarse-coincident nodes using the just-updated
//! new nodes. Both halves use the same formula, so one over-relaxation
//! factor per level transition scales the residual term.

use crate::cycle::FlopLedger;
use crate::field::Field;
use crate::mesh::{class_at, field_level, same_level, Hierarchy, LevelClass};
use crate::Error;

// Flops charged per node written, counting adds and multiplies (divisions by
// stencil constants are folded into precomputed reciprocal multiplies).
const RESIDUAL2_FLOPS: u64 = 7;
const RESIDUAL4_FLOPS: u64 = 12;
const AVERAGE_RHS_FLOPS: u64 = 6;
const RESTRICT_FLOPS: u64 = 6;
const PROLONG_FLOPS: u64 = 6;

/// Residual of the 5-point Laplacian on `u`'s (axis-aligned) level:
/// r = f − (u_E + u_W + u_N + u_S − 4u)/(sh)², at every interior node.
pub fn residual_order2(
    hier: &Hierarchy,
    u: &Field,
    f: &Field,
    ledger: &mut FlopLedger,
) -> Result<Field, Error> {
    let level = field_level(hier, u, LevelClass::Axis)?;
    same_level(u, f)?;
    let s = level.stride;
    let inv_h2 = 1.0 / (s as f64 * hier.h()).powi(2);
    let mut r = Field::zeros(2, hier.n, u.level_index);
    let mut nodes = 0u64;
    level.for_each_interior(hier.n, |[i, j, _]| {
        let lap =
            u.at2(i + s, j) + u.at2(i - s, j) + u.at2(i, j + s) + u.at2(i, j - s)
                - 4.0 * u.at2(i, j);
        r.set2(i, j, f.at2(i, j) - lap * inv_h2);
        nodes += 1;
    });
    ledger.residual += nodes * RESIDUAL2_FLOPS;
    Ok(r)
}

/// Residual of the compact 9-point fourth-order stencil:
/// r = f̄ − (4 Σ_axis u + Σ_diag u − 20u)/(6(sh)²), where f̄ is the averaged
/// right-hand side produced by [`average_rhs`].
pub fn residual_order4(
    hier: &Hierarchy,
    u: &Field,
    f_avg: &Field,
    ledger: &mut FlopLedger,
) -> Result<Field, Error> {
    let level = field_level(hier, u, LevelClass::Axis)?;
    same_level(u, f_avg)?;
    let s = level.stride;
    let c = 1.0 / (6.0 * (s as f64 * hier.h()).powi(2));
    let mut r = Field::zeros(2, hier.n, u.level_index);
    let mut nodes = 0u64;
    level.for_each_interior(hier.n, |[i, j, _]| {
        let axis = u.at2(i + s, j) + u.at2(i - s, j) + u.at2(i, j + s) + u.at2(i, j - s);
        let diag = u.at2(i + s, j + s)
            + u.at2(i + s, j - s)
            + u.at2(i - s, j + s)
            + u.at2(i - s, j - s);
        let lap = 4.0 * axis + diag - 20.0 * u.at2(i, j);
        r.set2(i, j, f_avg.at2(i, j) - lap * c);
        nodes += 1;
    });
    ledger.residual += nodes * RESIDUAL4_FLOPS;
    Ok(r)
}

/// Right-hand-side averaging required by the fourth-order stencil:
/// f̄ = (8f + f_E + f_W + f_N + f_S)/12. Precomputable once per solve; the
/// cost is charged to the `rhs_setup` phase.
pub fn average_rhs(
    hier: &Hierarchy,
    f: &Field,
    ledger: &mut FlopLedger,
) -> Result<Field, Error> {
    let level = field_level(hier, f, LevelClass::Axis)?;
    let s = level.stride;
    let mut out = Field::zeros(2, hier.n, f.level_index);
    let mut nodes = 0u64;
    level.for_each_interior(hier.n, |[i, j, _]| {
        let sum = f.at2(i + s, j) + f.at2(i - s, j) + f.at2(i, j + s) + f.at2(i, j - s);
        out.set2(i, j, (8.0 * f.at2(i, j) + sum) / 12.0);
        nodes += 1;
    });
    ledger.rhs_setup += nodes * AVERAGE_RHS_FLOPS;
    Ok(out)
}

/// Restricts a residual from an axis level (stride s) to the diagonal level
/// below it (same stride): at each diagonal node, (4r + r_E + r_W + r_N +
/// r_S)/8. The weights sum to 1 on the full lattice; near the boundary the
/// missing neighbors contribute zero.
pub fn restrict_axis_to_diagonal(
    hier: &Hierarchy,
    r: &Field,
    ledger: &mut FlopLedger,
) -> Result<Field, Error> {
    let fine = field_level(hier, r, LevelClass::Axis)?;
    if r.level_index == 0 {
        return Err(Error::LevelMismatch {
            expected: 1,
            found: 0,
        });
    }
    let coarse = class_at(hier, r.level_index - 1, LevelClass::Diagonal)?;
    debug_assert_eq!(coarse.stride, fine.stride);
    let s = fine.stride;
    let mut out = Field::zeros(2, hier.n, r.level_index - 1);
    let mut nodes = 0u64;
    coarse.for_each_interior(hier.n, |[i, j, _]| {
        let sum = r.at2(i + s, j) + r.at2(i - s, j) + r.at2(i, j + s) + r.at2(i, j - s);
        out.set2(i, j, (4.0 * r.at2(i, j) + sum) / 8.0);
        nodes += 1;
    });
    ledger.restriction += nodes * RESTRICT_FLOPS;
    Ok(out)
}

/// Restricts a residual from a diagonal level (stride s) to the axis level
/// below it (stride 2s): at each coarse node, (4r + Σ of the 4 diagonal
/// neighbors at (±s, ±s))/8.
pub fn restrict_diagonal_to_axis(
    hier: &Hierarchy,
    r: &Field,
    ledger: &mut FlopLedger,
) -> Result<Field, Error> {
    let fine = field_level(hier, r, LevelClass::Diagonal)?;
    if r.level_index == 0 {
        return Err(Error::LevelMismatch {
            expected: 1,
            found: 0,
        });
    }
    let coarse = class_at(hier, r.level_index - 1, LevelClass::Axis)?;
    debug_assert_eq!(coarse.stride, 2 * fine.stride);
    let s = fine.stride;
    let mut out = Field::zeros(2, hier.n, r.level_index - 1);
    let mut nodes = 0u64;
    coarse.for_each_interior(hier.n, |[i, j, _]| {
        let sum = r.at2(i + s, j + s)
            + r.at2(i + s, j - s)
            + r.at2(i - s, j + s)
            + r.at2(i - s, j - s);
        out.set2(i, j, (4.0 * r.at2(i, j) + sum) / 8.0);
        nodes += 1;
    });
    ledger.restriction += nodes * RESTRICT_FLOPS;
    Ok(out)
}

/// Prolongation from an axis level (stride 2s) to the diagonal level above
/// it (stride s). The diagonal lattice's nearest neighbors sit at (±s, ±s)
/// and its node spacing is √2·sh, so one Jacobi step for Δv = r reads
/// v = (Σ_nb v − 2(sh)²·r)/4; `relax` scales the residual term. First
/// half-sweep: nodes new on this level (i/s, j/s both odd), neighbors taken
/// from `coarse`. Second half-sweep: coarse-coincident nodes (both even),
/// neighbors taken from the freshly written new nodes.
pub fn prolong_to_diagonal(
    hier: &Hierarchy,
    coarse: &Field,
    r: &Field,
    relax: f64,
    ledger: &mut FlopLedger,
) -> Result<Field, Error> {
    let target = field_level(hier, r, LevelClass::Diagonal)?;
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
    let below = class_at(hier, coarse.level_index, LevelClass::Axis)?;
    debug_assert_eq!(below.stride, 2 * target.stride);
    let s = target.stride;
    let c = relax * 2.0 * (s as f64 * hier.h()).powi(2);
    let mut v = Field::zeros(2, hier.n, r.level_index);
    let mut nodes = 0u64;
    // new nodes read the coarse grid
    target.for_each_interior(hier.n, |[i, j, _]| {
        if (i / s) % 2 == 1 {
            let nb = coarse.at2(i + s, j + s)
                + coarse.at2(i + s, j - s)
                + coarse.at2(i - s, j + s)
                + coarse.at2(i - s, j - s);
            v.set2(i, j, (nb - c * r.at2(i, j)) / 4.0);
            nodes += 1;
        }
    });
    // coincident nodes read the new nodes just written
    target.for_each_interior(hier.n, |[i, j, _]| {
        if (i / s) % 2 == 0 {
            let nb = v.at2(i + s, j + s)
                + v.at2(i + s, j - s)
                + v.at2(i - s, j + s)
                + v.at2(i - s, j - s);
            v.set2(i, j, (nb - c * r.at2(i, j)) / 4.0);
            nodes += 1;
        }
    });
    ledger.prolongation += nodes * PROLONG_FLOPS;
    Ok(v)
}

/// Prolongation from a diagonal level (stride s) to the axis level above it
/// (same stride). One Jacobi step on the axis lattice: v = (Σ_axis v −
/// (sh)²·r)/4, residual term scaled by `relax`. New nodes ((i+j)/s odd)
/// first, from coarse diagonal values; coincident nodes second, from the
/// updated new nodes.
pub fn prolong_to_axis(
    hier: &Hierarchy,
    coarse: &Field,
    r: &Field,
    relax: f64,
    ledger: &mut FlopLedger,
) -> Result<Field, Error> {
    let target = field_level(hier, r, LevelClass::Axis)?;
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
    let below = class_at(hier, coarse.level_index, LevelClass::Diagonal)?;
    debug_assert_eq!(below.stride, target.stride);
    let s = target.stride;
    let c = relax * (s as f64 * hier.h()).powi(2);
    let mut v = Field::zeros(2, hier.n, r.level_index);
    let mut nodes = 0u64;
    target.for_each_interior(hier.n, |[i, j, _]| {
        if (i / s + j / s) % 2 == 1 {
            let nb = coarse.at2(i + s, j) + coarse.at2(i - s, j) + coarse.at2(i, j + s)
                + coarse.at2(i, j - s);
            v.set2(i, j, (nb - c * r.at2(i, j)) / 4.0);
            nodes += 1;
        }
    });
    target.for_each_interior(hier.n, |[i, j, _]| {
        if (i / s + j / s) % 2 == 0 {
            let nb =
                v.at2(i + s, j) + v.at2(i - s, j) + v.at2(i, j + s) + v.at2(i, j - s);
            v.set2(i, j, (nb - c * r.at2(i, j)) / 4.0);
            nodes += 1;
        }
    });
    ledger.prolongation += nodes * PROLONG_FLOPS;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Fills all points, boundary included, from a function of (x, y).
    fn fill_full(n: usize, level_index: usize, f: impl Fn(f64, f64) -> f64) -> Field {
        let h = 1.0 / (n - 1) as f64;
        let mut out = Field::zeros(2, n, level_index);
        for i in 0..n {
            for j in 0..n {
                out.set2(i, j, f(i as f64 * h, j as f64 * h));
            }
        }
        out
    }

    fn delta(n: usize, level_index: usize, i: usize, j: usize) -> Field {
        let mut out = Field::zeros(2, n, level_index);
        out.set2(i, j, 1.0);
        out
    }

    #[test]
    fn residual_order2_annihilates_cubics() {
        // the 5-point stencil differentiates x³ + y³ exactly
        let hier = Hierarchy::diagonal(2, 9, 2).unwrap();
        let top = hier.levels.len() - 1;
        let u = fill_full(9, top, |x, y| x.powi(3) + y.powi(3));
        let f = fill_full(9, top, |x, y| 6.0 * (x + y));
        let mut ledger = FlopLedger::default();
        let r = residual_order2(&hier, &u, &f, &mut ledger).unwrap();
        assert!(r.max_norm() < 1e-12, "max residual {}", r.max_norm());
        assert_eq!(ledger.residual, 7 * 49);
    }

    #[test]
    fn residual_order2_of_a_delta() {
        let hier = Hierarchy::diagonal(2, 5, 1).unwrap();
        let top = hier.levels.len() - 1;
        let u = delta(5, top, 2, 2);
        let f = Field::zeros(2, 5, top);
        let mut ledger = FlopLedger::default();
        let r = residual_order2(&hier, &u, &f, &mut ledger).unwrap();
        // h = 1/4: center −(−4)/h² = 64, each axis neighbor −1/h² = −16
        assert_abs_diff_eq!(r.at2(2, 2), 64.0);
        for (i, j) in [(1, 2), (3, 2), (2, 1), (2, 3)] {
            assert_abs_diff_eq!(r.at2(i, j), -16.0);
        }
        assert_abs_diff_eq!(r.at2(1, 1), 0.0);
    }

    #[test]
    fn residual_order4_is_exact_through_degree_five() {
        let hier = Hierarchy::diagonal(2, 9, 2).unwrap();
        let top = hier.levels.len() - 1;
        let u = fill_full(9, top, |x, y| x.powi(4) + y.powi(5));
        let f = fill_full(9, top, |x, y| 12.0 * x * x + 20.0 * y.powi(3));
        let mut ledger = FlopLedger::default();
        let f_avg = average_rhs(&hier, &f, &mut ledger).unwrap();
        let r = residual_order4(&hier, &u, &f_avg, &mut ledger).unwrap();
        assert!(r.max_norm() < 1e-10, "max residual {}", r.max_norm());
        assert_eq!(ledger.rhs_setup, 6 * 49);
        assert_eq!(ledger.residual, 12 * 49);
        // …but not through degree six
        let u6 = fill_full(9, top, |x, _| x.powi(6));
        let f6 = fill_full(9, top, |x, _| 30.0 * x.powi(4));
        let f6_avg = average_rhs(&hier, &f6, &mut ledger).unwrap();
        let r6 = residual_order4(&hier, &u6, &f6_avg, &mut ledger).unwrap();
        assert!(r6.max_norm() > 1e-4);
    }

    #[test]
    fn average_rhs_preserves_constants() {
        let hier = Hierarchy::diagonal(2, 5, 1).unwrap();
        let top = hier.levels.len() - 1;
        let f = fill_full(5, top, |_, _| 3.0);
        let mut ledger = FlopLedger::default();
        let avg = average_rhs(&hier, &f, &mut ledger).unwrap();
        for i in 1..4 {
            for j in 1..4 {
                assert_abs_diff_eq!(avg.at2(i, j), 3.0);
            }
        }
    }

    #[test]
    fn restrict_axis_to_diagonal_deltas() {
        let hier = Hierarchy::diagonal(2, 5, 1).unwrap();
        let mut ledger = FlopLedger::default();
        // delta at a node the diagonal level keeps: survives with weight 1/2
        let r = delta(5, 2, 2, 2);
        let out = restrict_axis_to_diagonal(&hier, &r, &mut ledger).unwrap();
        assert_eq!(out.level_index, 1);
        assert_abs_diff_eq!(out.at2(2, 2), 0.5);
        for (i, j) in [(1, 1), (1, 3), (3, 1), (3, 3)] {
            assert_abs_diff_eq!(out.at2(i, j), 0.0);
        }
        // delta at a dropped node: spread 1/8 to each adjacent diagonal node
        let r = delta(5, 2, 1, 2);
        let out = restrict_axis_to_diagonal(&hier, &r, &mut ledger).unwrap();
        assert_abs_diff_eq!(out.at2(1, 1), 0.125);
        assert_abs_diff_eq!(out.at2(1, 3), 0.125);
        assert_abs_diff_eq!(out.at2(2, 2), 0.125);
        assert_abs_diff_eq!(out.at2(3, 1), 0.0);
        assert_abs_diff_eq!(out.at2(3, 3), 0.0);
        // 5 interior diagonal nodes, 6 flops each, two calls
        assert_eq!(ledger.restriction, 2 * 6 * 5);
    }

    #[test]
    fn restrict_diagonal_to_axis_delta() {
        let hier = Hierarchy::diagonal(2, 5, 1).unwrap();
        let mut ledger = FlopLedger::default();
        let r = delta(5, 1, 1, 1);
        let out = restrict_diagonal_to_axis(&hier, &r, &mut ledger).unwrap();
        assert_eq!(out.level_index, 0);
        // (2,2) is the only interior coarse node; (1,1) is one of its
        // four diagonal neighbors
        assert_abs_diff_eq!(out.at2(2, 2), 0.125);
        assert_eq!(ledger.restriction, 6);
    }

    #[test]
    fn composite_restriction_row_is_a_17_point_stencil() {
        // feed deltas through both restrictions and read coarse node (4,4)
        let hier = Hierarchy::diagonal(2, 9, 2).unwrap();
        let top = hier.levels.len() - 1;
        let mut weights = std::collections::BTreeMap::new();
        for i in 1..8 {
            for j in 1..8 {
                let mut ledger = FlopLedger::default();
                let d = delta(9, top, i, j);
                let a = restrict_axis_to_diagonal(&hier, &d, &mut ledger).unwrap();
                let b = restrict_diagonal_to_axis(&hier, &a, &mut ledger).unwrap();
                if b.at2(4, 4).abs() > 1e-15 {
                    weights.insert((i, j), b.at2(4, 4));
                }
            }
        }
        assert_eq!(weights.len(), 17);
        assert_abs_diff_eq!(weights[&(4, 4)], 0.25);
        for (i, j) in [(3, 4), (5, 4), (4, 3), (4, 5)] {
            assert_abs_diff_eq!(weights[&(i, j)], 3.0 / 32.0);
        }
        for (i, j) in [(3, 3), (3, 5), (5, 3), (5, 5)] {
            assert_abs_diff_eq!(weights[&(i, j)], 1.0 / 16.0);
        }
        let total: f64 = weights.values().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn prolong_to_diagonal_spreads_coarse_values() {
        // coarse delta, no residual: new nodes get 1/4, then coincident
        // nodes average the new ones
        let hier = Hierarchy::diagonal(2, 9, 2).unwrap();
        let coarse = delta(9, 2, 4, 4); // axis level, stride 2
        let r = Field::zeros(2, 9, 3); // diagonal level, stride 1
        let mut ledger = FlopLedger::default();
        let v = prolong_to_diagonal(&hier, &coarse, &r, 1.0, &mut ledger).unwrap();
        assert_eq!(v.level_index, 3);
        for (i, j) in [(4, 4), (3, 3), (3, 5), (5, 3), (5, 5)] {
            assert_abs_diff_eq!(v.at2(i, j), 0.25);
        }
        for (i, j) in [(2, 4), (6, 4), (4, 2), (4, 6)] {
            assert_abs_diff_eq!(v.at2(i, j), 0.125);
        }
        for (i, j) in [(2, 2), (2, 6), (6, 2), (6, 6)] {
            assert_abs_diff_eq!(v.at2(i, j), 0.0625);
        }
        assert_abs_diff_eq!(v.at2(1, 1), 0.0);
        // 25 interior diagonal nodes at stride 1 on n = 9
        assert_eq!(ledger.prolongation, 6 * 25);
    }

    #[test]
    fn prolong_to_diagonal_residual_term() {
        // zero coarse grid, residual delta at a new node q: q gets
        // −2h²r/4 in the first half-sweep, its coincident neighbors get a
        // quarter of that in the second
        let hier = Hierarchy::diagonal(2, 9, 2).unwrap();
        let coarse = Field::zeros(2, 9, 2);
        let r = delta(9, 3, 3, 3);
        let mut ledger = FlopLedger::default();
        let v = prolong_to_diagonal(&hier, &coarse, &r, 1.0, &mut ledger).unwrap();
        let h = 1.0 / 8.0;
        assert_abs_diff_eq!(v.at2(3, 3), -2.0 * h * h / 4.0);
        for (i, j) in [(2, 2), (2, 4), (4, 2), (4, 4)] {
            assert_abs_diff_eq!(v.at2(i, j), -2.0 * h * h / 16.0);
        }
        assert_abs_diff_eq!(v.at2(5, 5), 0.0);
        // the relax factor scales the residual term linearly
        let mut ledger = FlopLedger::default();
        let v2 = prolong_to_diagonal(&hier, &coarse, &r, 1.5, &mut ledger).unwrap();
        assert_abs_diff_eq!(v2.at2(3, 3), 1.5 * v.at2(3, 3));
    }

    #[test]
    fn prolong_to_axis_spreads_coarse_values() {
        let hier = Hierarchy::diagonal(2, 5, 1).unwrap();
        let coarse = delta(5, 1, 2, 2); // diagonal level, stride 1
        let r = Field::zeros(2, 5, 2); // axis level, stride 1
        let mut ledger = FlopLedger::default();
        let v = prolong_to_axis(&hier, &coarse, &r, 1.0, &mut ledger).unwrap();
        assert_eq!(v.level_index, 2);
        for (i, j) in [(1, 2), (2, 1), (2, 3), (3, 2), (2, 2)] {
            assert_abs_diff_eq!(v.at2(i, j), 0.25);
        }
        for (i, j) in [(1, 1), (1, 3), (3, 1), (3, 3)] {
            assert_abs_diff_eq!(v.at2(i, j), 0.125);
        }
        assert_eq!(ledger.prolongation, 6 * 9);
    }

    #[test]
    fn kernels_reject_wrong_levels() {
        let hier = Hierarchy::diagonal(2, 5, 1).unwrap();
        let mut ledger = FlopLedger::default();
        // residual on a diagonal level
        let u = Field::zeros(2, 5, 1);
        let f = Field::zeros(2, 5, 1);
        assert_eq!(
            residual_order2(&hier, &u, &f, &mut ledger).unwrap_err(),
            Error::ClassMismatch {
                expected: LevelClass::Axis,
                found: LevelClass::Diagonal
            }
        );
        // restriction from the coarsest level
        let r = Field::zeros(2, 5, 0);
        assert_eq!(
            restrict_axis_to_diagonal(&hier, &r, &mut ledger).unwrap_err(),
            Error::LevelMismatch {
                expected: 1,
                found: 0
            }
        );
        // prolongation with a coarse field on the wrong level
        let coarse = Field::zeros(2, 5, 0);
        let r = Field::zeros(2, 5, 2);
        assert_eq!(
            prolong_to_axis(&hier, &coarse, &r, 1.0, &mut ledger).unwrap_err(),
            Error::LevelMismatch {
                expected: 1,
                found: 0
            }
        );
    }
}
