//! Geometric multigrid for Poisson's equation on the unit square and cube,
//! built around *diagonally oriented* grid hierarchies: instead of coarsening
//! by a factor of two in every direction, each coarsening step keeps only
//! every other node, so the lattice density halves per level and the lattice
//! orientation alternates. In 2D the levels alternate between axis-aligned
//! and 45°-rotated square grids; in 3D they chain simple cubic →
//! face-centered → body-centered → doubled simple cubic.
//!
//! The V-cycle on such a hierarchy is deliberately minimal: descending, the
//! residual is restricted level by level (restriction doubles as the only
//! smoothing); at the coarsest level one Jacobi step from zero is the exact
//! solve; ascending, each level's correction is produced by a two-half-sweep
//! Jacobi iteration that plays the role of interpolation. A conventional
//! V(0,1) multigrid with full-weighting restriction and (bi/tri)linear
//! interpolation is included as the baseline for comparison.
//!
//! Crate layout:
//! - [`mesh`]: grid levels, node masks, hierarchy construction
//! - [`field`]: scalar fields stored on the finest grid's index space
//! - [`stencil2d`], [`stencil3d`]: residual/restriction/prolongation kernels
//! - [`baseline`]: conventional multigrid kernels
//! - [`cycle`]: V-cycle orchestration, solver loop, flop-cost model
//! - [`analysis`]: convergence-factor measurement and dense-operator oracle
//! - [`tune`]: Nelder–Mead minimization of the convergence factor over the
//!   over-relaxation parameters

pub mod analysis;
pub mod baseline;
pub mod cycle;
pub mod field;
pub mod mesh;
pub mod stencil2d;
pub mod stencil3d;
pub mod tune;

use thiserror::Error;

pub use cycle::{CycleParams, FlopLedger, Order, Relax, SolveReport};
pub use field::Field;
pub use mesh::{GridLevel, Hierarchy, LevelClass};

/// Which multigrid family a hierarchy (and its cycle) belongs to.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// Density-halving hierarchy with alternating lattice orientation.
    Diagonal,
    /// Conventional factor-of-two coarsening with axis-aligned grids only.
    Usual,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scheme::Diagonal => write!(out, "diagonal"),
            Scheme::Usual => write!(out, "usual"),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum Error {
    #[error("grid size {n} must be 2^k + 1 for some k >= 2")]
    BadGridSize { n: usize },
    #[error("hierarchy depth {depth} too large for n = {n} (max {max})")]
    DepthTooLarge { n: usize, depth: usize, max: usize },
    #[error("depth must be at least 1")]
    DepthTooSmall,
    #[error("dimension {dim} not supported (2 or 3)")]
    BadDimension { dim: usize },
    #[error("field is on level {found}, expected level {expected}")]
    LevelMismatch { expected: usize, found: usize },
    #[error("level class {found:?} where {expected:?} was required")]
    ClassMismatch { expected: LevelClass, found: LevelClass },
    #[error("relaxation parameters: expected {expected} value(s), got {found}")]
    RelaxArity { expected: usize, found: usize },
    #[error("dense operator would have {unknowns} unknowns, above the limit of {limit}")]
    SizeGuard { unknowns: usize, limit: usize },
}
