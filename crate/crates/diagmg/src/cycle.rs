//! V-cycle orchestration: cycle parameters, the flop ledger, the solver
//! loop, and the closed-form per-cycle flop model.
//!
//! The cycle is the same shape for both schemes. Descending, the finest
//! residual is restricted level by level — there is no pre-smoothing;
//! restriction is the only operation on the way down. The coarsest level is
//! solved by Jacobi from a zero start (one sweep, exact, when a single
//! unknown remains). Ascending, each level's correction is produced from
//! the one below plus that level's restricted residual — by the
//! two-half-sweep Jacobi prolongation on diagonal hierarchies, or by linear
//! interpolation followed by one two-color Jacobi sweep on conventional
//! ones. The correction is added to the iterate only at the finest level.

use num_rational::Rational64;

use crate::field::Field;
use crate::mesh::{class_at, Hierarchy, LevelClass};
use crate::{baseline, stencil2d, stencil3d};
use crate::{Error, Scheme};

/// Discretization order of the finest-level residual stencil.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Order {
    /// 5-point (2D) / 7-point (3D) Laplacian.
    Second,
    /// Compact 9-point (2D) / 19-point (3D) stencil with averaged
    /// right-hand side.
    Fourth,
}

impl Order {
    pub fn as_u32(self) -> u32 {
        match self {
            Order::Second => 2,
            Order::Fourth => 4,
        }
    }
}

impl std::fmt::Display for Order {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(out, "{}", self.as_u32())
    }
}

/// Over-relaxation of the residual term in the ascent updates.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum Relax {
    /// One factor used everywhere a factor applies.
    Uniform(f64),
    /// One factor per ascent-step kind on a 3D diagonal hierarchy, in
    /// ascent order: [to body-centered, to face-centered (face nodes),
    /// to face-centered (corner nodes), to cubic].
    PerStep([f64; 4]),
}

impl Relax {
    /// Number of independent factors a scheme exposes: 4 on 3D diagonal
    /// hierarchies, 1 everywhere else.
    pub fn arity(scheme: Scheme, dim: usize) -> usize {
        if scheme == Scheme::Diagonal && dim == 3 {
            4
        } else {
            1
        }
    }

    /// Builds a `Relax` from a flat parameter vector of the right arity.
    pub fn from_slice(scheme: Scheme, dim: usize, values: &[f64]) -> Result<Relax, Error> {
        match (Self::arity(scheme, dim), values.len()) {
            (_, 1) => Ok(Relax::Uniform(values[0])),
            (4, 4) => Ok(Relax::PerStep([values[0], values[1], values[2], values[3]])),
            (expected, found) => Err(Error::RelaxArity { expected, found }),
        }
    }

    pub fn to_vec(self) -> Vec<f64> {
        match self {
            Relax::Uniform(p) => vec![p],
            Relax::PerStep(ps) => ps.to_vec(),
        }
    }
}

/// Parameters of one V-cycle.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct CycleParams {
    pub order: Order,
    pub relax: Relax,
}

impl Default for CycleParams {
    /// Second order, no over-relaxation.
    fn default() -> Self {
        CycleParams {
            order: Order::Second,
            relax: Relax::Uniform(1.0),
        }
    }
}

impl CycleParams {
    pub fn order(order: Order) -> Self {
        CycleParams {
            order,
            ..CycleParams::default()
        }
    }
}

/// Running count of floating-point operations, by cycle phase. Kernels
/// charge adds and multiplies per node actually written (divisions by
/// stencil constants count as one multiply by the reciprocal).
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct FlopLedger {
    pub residual: u64,
    pub restriction: u64,
    pub prolongation: u64,
    pub coarse_solve: u64,
    pub correction: u64,
    pub rhs_setup: u64,
}

impl FlopLedger {
    pub fn new() -> Self {
        FlopLedger::default()
    }

    /// Residual + restriction + prolongation: the per-cycle work that the
    /// closed-form model covers.
    pub fn cycle_subtotal(&self) -> u64 {
        self.residual + self.restriction + self.prolongation
    }

    /// Everything, including coarse solve, correction, and one-time
    /// right-hand-side setup.
    pub fn total(&self) -> u64 {
        self.cycle_subtotal() + self.coarse_solve + self.correction + self.rhs_setup
    }
}

/// Expands a `Relax` into the per-step factors a hierarchy uses, checking
/// arity. The four slots are the ascent-step kinds of the 3D diagonal
/// chain; schemes with a single factor read only slot 0.
fn relax_factors(hier: &Hierarchy, relax: &Relax) -> Result<[f64; 4], Error> {
    let expected = Relax::arity(hier.scheme, hier.dim);
    match relax {
        Relax::Uniform(p) => Ok([*p; 4]),
        Relax::PerStep(ps) if expected == 4 => Ok(*ps),
        Relax::PerStep(_) => Err(Error::RelaxArity {
            expected,
            found: 4,
        }),
    }
}

fn expect_finest(hier: &Hierarchy, field: &Field) -> Result<(), Error> {
    let top = hier.levels.len() - 1;
    if field.level_index != top {
        return Err(Error::LevelMismatch {
            expected: top,
            found: field.level_index,
        });
    }
    Ok(())
}

/// Finest-level residual for the given order.
fn finest_residual(
    hier: &Hierarchy,
    u: &Field,
    rhs: &Field,
    order: Order,
    ledger: &mut FlopLedger,
) -> Result<Field, Error> {
    match (hier.dim, order) {
        (2, Order::Second) => stencil2d::residual_order2(hier, u, rhs, ledger),
        (2, Order::Fourth) => stencil2d::residual_order4(hier, u, rhs, ledger),
        (3, Order::Second) => stencil3d::residual_order2(hier, u, rhs, ledger),
        (3, Order::Fourth) => stencil3d::residual_order4(hier, u, rhs, ledger),
        (dim, _) => Err(Error::BadDimension { dim }),
    }
}

/// Pre-processes a right-hand side for a solve: identity at second order,
/// neighbor averaging at fourth (charged to `rhs_setup`). Do this once per
/// solve; [`v_cycle`] and [`solve`] expect the prepared field.
pub fn prepare_rhs(
    hier: &Hierarchy,
    f: &Field,
    order: Order,
    ledger: &mut FlopLedger,
) -> Result<Field, Error> {
    expect_finest(hier, f)?;
    match (hier.dim, order) {
        (_, Order::Second) => Ok(f.clone()),
        (2, Order::Fourth) => stencil2d::average_rhs(hier, f, ledger),
        (3, Order::Fourth) => stencil3d::average_rhs(hier, f, ledger),
        (dim, _) => Err(Error::BadDimension { dim }),
    }
}

/// Jacobi solve of Δv = r at the coarsest (axis/cubic) level, starting from
/// zero; no over-relaxation. With one interior unknown a single sweep is
/// exact; otherwise 20 sweeps are used.
pub fn coarse_solve(
    hier: &Hierarchy,
    r: &Field,
    ledger: &mut FlopLedger,
) -> Result<Field, Error> {
    if r.level_index != 0 {
        return Err(Error::LevelMismatch {
            expected: 0,
            found: r.level_index,
        });
    }
    let klass = if hier.dim == 2 {
        LevelClass::Axis
    } else {
        LevelClass::Cubic
    };
    let level = *class_at(hier, 0, klass)?;
    let s = level.stride;
    let c = (s as f64 * hier.h()).powi(2);
    let denom = 2.0 * hier.dim as f64;
    let count = level.interior_count(hier.n) as u64;
    let sweeps = if count == 1 { 1 } else { 20 };
    // first sweep from zero: v = −(sh)² r / (2·dim)
    let mut v = Field::zeros(hier.dim, hier.n, 0);
    level.for_each_interior(hier.n, |idx| v.set(idx, -c * r.at(idx) / denom));
    ledger.coarse_solve += 2 * count;
    for _ in 1..sweeps {
        let prev = v.clone();
        level.for_each_interior(hier.n, |[i, j, k]| {
            let nb = if hier.dim == 2 {
                prev.at2(i + s, j) + prev.at2(i - s, j) + prev.at2(i, j + s)
                    + prev.at2(i, j - s)
            } else {
                prev.at3(i + s, j, k)
                    + prev.at3(i - s, j, k)
                    + prev.at3(i, j + s, k)
                    + prev.at3(i, j - s, k)
                    + prev.at3(i, j, k + s)
                    + prev.at3(i, j, k - s)
            };
            v.set([i, j, k], (nb - c * r.at([i, j, k])) / denom);
        });
        ledger.coarse_solve += (2 * hier.dim as u64 + 2) * count;
    }
    Ok(v)
}

/// Runs the full descent–coarse-solve–ascent pass on a finest-level
/// residual, returning the finest-level correction.
fn coarse_correction(
    hier: &Hierarchy,
    r_finest: Field,
    relax: [f64; 4],
    ledger: &mut FlopLedger,
) -> Result<Field, Error> {
    let top = hier.levels.len() - 1;
    // descent: residuals[top − ℓ] is the residual restricted to level ℓ
    let mut residuals: Vec<Field> = Vec::with_capacity(top + 1);
    residuals.push(r_finest);
    for target in (0..top).rev() {
        let r = residuals.last().expect("descent starts from the finest residual");
        let next = match hier.scheme {
            Scheme::Usual => baseline::restrict_full_weighting(hier, r, ledger)?,
            Scheme::Diagonal => match (hier.dim, hier.level(target).klass) {
                (2, LevelClass::Diagonal) => {
                    stencil2d::restrict_axis_to_diagonal(hier, r, ledger)?
                }
                (2, LevelClass::Axis) => stencil2d::restrict_diagonal_to_axis(hier, r, ledger)?,
                (3, LevelClass::FaceCentered) => {
                    stencil3d::restrict_cubic_to_face_centered(hier, r, ledger)?
                }
                (3, LevelClass::BodyCentered) => {
                    stencil3d::restrict_face_centered_to_body_centered(hier, r, ledger)?
                }
                (3, LevelClass::Cubic) => {
                    stencil3d::restrict_body_centered_to_cubic(hier, r, ledger)?
                }
                _ => unreachable!("hierarchy construction pairs class and dimension"),
            },
        };
        residuals.push(next);
    }
    let mut v = coarse_solve(hier, residuals.last().expect("descent filled every level"), ledger)?;
    // ascent
    for target in 1..=top {
        let r = &residuals[top - target];
        v = match hier.scheme {
            Scheme::Usual => {
                let mut w = baseline::interpolate(hier, &v, ledger)?;
                baseline::smooth(hier, &mut w, r, relax[0], ledger)?;
                w
            }
            Scheme::Diagonal => match (hier.dim, hier.level(target).klass) {
                (2, LevelClass::Diagonal) => {
                    stencil2d::prolong_to_diagonal(hier, &v, r, relax[0], ledger)?
                }
                (2, LevelClass::Axis) => {
                    stencil2d::prolong_to_axis(hier, &v, r, relax[0], ledger)?
                }
                (3, LevelClass::BodyCentered) => {
                    stencil3d::prolong_to_body_centered(hier, &v, r, relax[0], ledger)?
                }
                (3, LevelClass::FaceCentered) => {
                    stencil3d::prolong_to_face_centered(hier, &v, r, relax[1], relax[2], ledger)?
                }
                (3, LevelClass::Cubic) => {
                    stencil3d::prolong_to_cubic(hier, &v, r, relax[3], ledger)?
                }
                _ => unreachable!("hierarchy construction pairs class and dimension"),
            },
        };
    }
    Ok(v)
}

/// One V-cycle on `u`: finest residual, coarse-grid correction, u ← u + v.
/// `rhs` must already be prepared (see [`prepare_rhs`]).
pub fn v_cycle(
    hier: &Hierarchy,
    u: &mut Field,
    rhs: &Field,
    params: &CycleParams,
    ledger: &mut FlopLedger,
) -> Result<(), Error> {
    expect_finest(hier, u)?;
    let relax = relax_factors(hier, &params.relax)?;
    let r = finest_residual(hier, u, rhs, params.order, ledger)?;
    let v = coarse_correction(hier, r, relax, ledger)?;
    u.add_scaled(&v, 1.0);
    ledger.correction += hier.interior_unknowns() as u64;
    Ok(())
}

/// Outcome of [`solve`].
#[derive(Clone, Debug)]
pub struct SolveReport {
    /// Number of V-cycles performed.
    pub cycles: usize,
    /// Residual max-norms: entry 0 before any cycle, one entry per cycle
    /// after it.
    pub residual_norms: Vec<f64>,
    /// The residual norm dropped below the threshold.
    pub converged: bool,
    /// The residual norm became non-finite or grew by a factor of 1e6.
    pub diverged: bool,
    pub ledger: FlopLedger,
}

impl SolveReport {
    pub fn final_residual(&self) -> f64 {
        *self
            .residual_norms
            .last()
            .expect("at least the initial residual norm is recorded")
    }
}

/// Runs V-cycles on `u` until the residual max-norm drops below
/// `tol · ‖f‖_∞` (or below `tol` absolutely when f ≡ 0), up to `max_cycles`.
pub fn solve(
    hier: &Hierarchy,
    u: &mut Field,
    f: &Field,
    params: &CycleParams,
    tol: f64,
    max_cycles: usize,
) -> Result<SolveReport, Error> {
    expect_finest(hier, u)?;
    expect_finest(hier, f)?;
    let relax = relax_factors(hier, &params.relax)?;
    let mut ledger = FlopLedger::new();
    let rhs = prepare_rhs(hier, f, params.order, &mut ledger)?;
    let f_norm = f.max_norm();
    let threshold = if f_norm > 0.0 { tol * f_norm } else { tol };
    let mut residual_norms = Vec::with_capacity(max_cycles + 1);
    let mut converged = false;
    let mut diverged = false;
    loop {
        let r = finest_residual(hier, u, &rhs, params.order, &mut ledger)?;
        let norm = r.max_norm();
        residual_norms.push(norm);
        if !norm.is_finite() || norm > 1e6 * residual_norms[0] {
            diverged = true;
            break;
        }
        if norm <= threshold {
            converged = true;
            break;
        }
        if residual_norms.len() > max_cycles {
            break;
        }
        let v = coarse_correction(hier, r, relax, &mut ledger)?;
        u.add_scaled(&v, 1.0);
        ledger.correction += hier.interior_unknowns() as u64;
    }
    Ok(SolveReport {
        cycles: residual_norms.len() - 1,
        residual_norms,
        converged,
        diverged,
        ledger,
    })
}

/// Closed-form per-cycle flop counts in units of N (finest-level interior
/// unknowns), from the exact node-density sums. Correction (u + v) is the
/// constant 1·N; `rhs_setup` is the one-time fourth-order right-hand-side
/// averaging, not part of any per-cycle figure. The coarse solve is O(1)
/// per cycle and has no entry here.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct CostModel {
    pub residual: Rational64,
    pub restriction: Rational64,
    pub prolongation: Rational64,
    pub correction: Rational64,
    pub rhs_setup: Rational64,
}

impl CostModel {
    /// Residual + restriction + prolongation, matching
    /// [`FlopLedger::cycle_subtotal`].
    pub fn cycle_subtotal(&self) -> Rational64 {
        self.residual + self.restriction + self.prolongation
    }
}

/// Per-cycle flop model for a scheme. `depth = Some(L)` gives the exact
/// finite-depth densities (valid for L ≤ 20); `None` gives the
/// infinite-depth limit.
pub fn cost_model(
    scheme: Scheme,
    dim: usize,
    order: Order,
    depth: Option<usize>,
) -> Result<CostModel, Error> {
    if dim != 2 && dim != 3 {
        return Err(Error::BadDimension { dim });
    }
    // density factor: 1 − (2^dim)^(−L) coarsening steps below the finest,
    // approaching 1 as the hierarchy deepens
    let factor = match depth {
        None => Rational64::new(1, 1),
        Some(depth) => {
            assert!(depth >= 1 && depth <= 20, "depth {depth} outside 1..=20");
            let full = (1i64 << dim).pow(depth as u32);
            Rational64::new(full - 1, full)
        }
    };
    let (residual, rhs_setup) = match (dim, order) {
        (2, Order::Second) => (7, 0),
        (2, Order::Fourth) => (12, 6),
        (3, Order::Second) => (9, 0),
        _ => (22, 8),
    };
    let (restriction, prolongation) = match (scheme, dim) {
        (Scheme::Diagonal, 2) => (Rational64::from(6), Rational64::from(12)),
        (Scheme::Usual, 2) => (Rational64::new(11, 3), Rational64::new(32, 3)),
        (Scheme::Diagonal, _) => (Rational64::new(62, 7), Rational64::new(125, 7)),
        (Scheme::Usual, _) => (Rational64::new(30, 7), Rational64::new(90, 7)),
    };
    Ok(CostModel {
        residual: Rational64::from(residual),
        restriction: restriction * factor,
        prolongation: prolongation * factor,
        correction: Rational64::from(1),
        rhs_setup: Rational64::from(rhs_setup),
    })
}
