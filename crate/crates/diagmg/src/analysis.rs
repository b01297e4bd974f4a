//! Convergence-factor measurement and the dense-operator oracle.
//!
//! With f ≡ 0 the V-cycle acts on the error as a fixed linear operator E,
//! so the asymptotic convergence factor is the spectral radius ρ(E).
//! [`estimate_rate`] measures it by power iteration on a seeded random
//! error, taking the geometric mean of the last few per-cycle reduction
//! ratios to damp oscillation from complex eigenvalue pairs.
//! [`assemble_error_operator`] builds E column by column (one V-cycle per
//! unit vector) so ρ(E) can be computed exactly from the dense spectrum at
//! small sizes — the independent check on the power-iteration estimate.

use nalgebra::DMatrix;

use crate::cycle::{v_cycle, CycleParams, FlopLedger};
use crate::field::Field;
use crate::mesh::Hierarchy;
use crate::{Error, Scheme};

/// Largest dense error operator that may be assembled (unknowns per side).
pub const DENSE_LIMIT: usize = 5000;

/// Controls for [`estimate_rate`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct RateOptions {
    /// V-cycles of power iteration to run.
    pub cycles: usize,
    /// Geometric-mean window over the final reduction ratios.
    pub window: usize,
    /// Seed for the random initial error.
    pub seed: u64,
}

impl Default for RateOptions {
    fn default() -> Self {
        RateOptions {
            cycles: 40,
            window: 10,
            seed: 42,
        }
    }
}

/// Result of a power-iteration rate measurement.
#[derive(Clone, Debug)]
pub struct RateReport {
    /// Estimated asymptotic convergence factor ρ̄ (geometric mean of the
    /// last [`RateOptions::window`] ratios); `f64::INFINITY` on divergence.
    pub rate: f64,
    /// Per-cycle error-norm reduction ratios, one per completed cycle.
    pub ratios: Vec<f64>,
    /// The error norm blew past 1e12 or became non-finite.
    pub diverged: bool,
    /// V-cycles actually performed (counts a diverging final cycle).
    pub cycles_run: usize,
    /// Interior unknowns at the finest level.
    pub unknowns: usize,
    pub ledger: FlopLedger,
}

impl RateReport {
    /// Average per-cycle residual + restriction + prolongation work, in
    /// flops per finest-level unknown.
    pub fn cycle_flops_per_unknown(&self) -> f64 {
        self.ledger.cycle_subtotal() as f64 / self.cycles_run as f64 / self.unknowns as f64
    }

    /// Per-cycle work divided by the digits of error reduction per cycle,
    /// in flops per unknown: the figure of merit for comparing schemes.
    pub fn flops_per_digit(&self) -> f64 {
        flops_per_digit(self.cycle_flops_per_unknown(), self.rate)
    }
}

/// `per_cycle / (−log₁₀ rate)`: flops to gain one decimal digit. Infinite
/// when the iteration does not contract (rate ≥ 1), zero when it
/// annihilates the error outright (rate ≤ 0).
pub fn flops_per_digit(per_cycle: f64, rate: f64) -> f64 {
    if !(rate > 0.0) {
        0.0
    } else if rate >= 1.0 {
        f64::INFINITY
    } else {
        per_cycle / -rate.log10()
    }
}

/// Measures the asymptotic convergence factor of the V-cycle by power
/// iteration: start from a seeded random error, apply cycles with f ≡ 0,
/// renormalize by the max-norm each time, and average the tail ratios
/// geometrically.
pub fn estimate_rate(
    hier: &Hierarchy,
    params: &CycleParams,
    opts: &RateOptions,
) -> Result<RateReport, Error> {
    assert!(opts.cycles >= 1 && opts.window >= 1, "need at least one cycle and ratio");
    let top = hier.levels.len() - 1;
    let mut e = Field::random_interior(hier.dim, hier.n, top, opts.seed);
    let norm0 = e.max_norm();
    assert!(norm0 > 0.0, "random initial error is nonzero");
    e.scale(1.0 / norm0);
    let rhs = Field::zeros(hier.dim, hier.n, top);
    let mut ledger = FlopLedger::new();
    let mut ratios = Vec::with_capacity(opts.cycles);
    let mut cycles_run = 0;
    let mut diverged = false;
    let mut annihilated = false;
    for _ in 0..opts.cycles {
        v_cycle(hier, &mut e, &rhs, params, &mut ledger)?;
        cycles_run += 1;
        let m = e.max_norm();
        if !m.is_finite() || m > 1e12 {
            diverged = true;
            break;
        }
        if m < 1e-300 {
            // error hit the floor of the number system; call it exact
            annihilated = true;
            break;
        }
        ratios.push(m);
        e.scale(1.0 / m);
    }
    let rate = if diverged {
        f64::INFINITY
    } else if annihilated {
        0.0
    } else {
        let window = opts.window.min(ratios.len());
        let tail = &ratios[ratios.len() - window..];
        (tail.iter().map(|r| r.ln()).sum::<f64>() / window as f64).exp()
    };
    Ok(RateReport {
        rate,
        ratios,
        diverged,
        cycles_run,
        unknowns: hier.interior_unknowns(),
        ledger,
    })
}

/// Assembles the dense error-propagation matrix E: column k is the V-cycle
/// image (with f ≡ 0) of the k-th interior unit vector, interior nodes
/// enumerated lexicographically. Refuses grids above [`DENSE_LIMIT`]
/// unknowns.
pub fn assemble_error_operator(
    hier: &Hierarchy,
    params: &CycleParams,
) -> Result<DMatrix<f64>, Error> {
    let unknowns = hier.interior_unknowns();
    if unknowns > DENSE_LIMIT {
        return Err(Error::SizeGuard {
            unknowns,
            limit: DENSE_LIMIT,
        });
    }
    let top = hier.levels.len() - 1;
    let finest = hier.finest();
    let mut nodes = Vec::with_capacity(unknowns);
    finest.for_each_interior(hier.n, |idx| nodes.push(idx));
    let rhs = Field::zeros(hier.dim, hier.n, top);
    let mut ledger = FlopLedger::new();
    let mut mat = DMatrix::zeros(unknowns, unknowns);
    for (col, &source) in nodes.iter().enumerate() {
        let mut e = Field::zeros(hier.dim, hier.n, top);
        e.set(source, 1.0);
        v_cycle(hier, &mut e, &rhs, params, &mut ledger)?;
        for (row, &target) in nodes.iter().enumerate() {
            mat[(row, col)] = e.at(target);
        }
    }
    Ok(mat)
}

/// Largest eigenvalue modulus of a dense square matrix — the spectral
/// radius, for checking power-iteration estimates.
///
/// Evaluates the norm-of-powers limit ρ = lim ‖Eᵐ‖^(1/m) by repeated
/// squaring with renormalization. Forty squarings reach m = 2⁴⁰, where the
/// polynomial slack of even a maximally defective eigenvalue is below 1e-7.
/// The loop is fixed-length, so unlike shifted-QR eigensolvers it cannot
/// stall on the near-nilpotent, equal-modulus spectra these error
/// operators produce.
pub fn dense_dominant_modulus(mat: &DMatrix<f64>) -> f64 {
    assert_eq!(mat.nrows(), mat.ncols(), "operator must be square");
    let mut m = mat.clone();
    // ln ρ accumulates as Σₖ 2⁻ᵏ ln‖Aₖ‖ along the normalized squaring chain
    let mut log_radius = 0.0;
    for k in 0..=40u32 {
        let norm = m.amax();
        if norm == 0.0 {
            // some power vanished exactly: the operator is nilpotent
            return 0.0;
        }
        log_radius += norm.ln() / (1u64 << k) as f64;
        if k < 40 {
            m /= norm;
            m = &m * &m;
        }
    }
    log_radius.exp()
}

/// One measured configuration, ready for tabulation.
#[derive(Clone, Debug)]
pub struct TableRow {
    pub scheme: Scheme,
    pub dim: usize,
    pub n: usize,
    pub order: u32,
    pub relax: Vec<f64>,
    pub rate: f64,
    pub cycle_flops_per_unknown: f64,
    pub flops_per_digit: f64,
}

impl TableRow {
    pub fn csv_header() -> &'static str {
        "scheme,dim,n,order,relax,rate,cycle_flops_per_unknown,flops_per_digit"
    }

    pub fn to_csv(&self) -> String {
        let relax = self
            .relax
            .iter()
            .map(|p| format!("{p}"))
            .collect::<Vec<_>>()
            .join(";");
        format!(
            "{},{},{},{},{},{:.6},{:.3},{:.2}",
            self.scheme,
            self.dim,
            self.n,
            self.order,
            relax,
            self.rate,
            self.cycle_flops_per_unknown,
            self.flops_per_digit
        )
    }
}

/// Runs [`estimate_rate`] for one configuration and packages the row.
pub fn measure_row(
    hier: &Hierarchy,
    params: &CycleParams,
    opts: &RateOptions,
) -> Result<TableRow, Error> {
    let report = estimate_rate(hier, params, opts)?;
    Ok(TableRow {
        scheme: hier.scheme,
        dim: hier.dim,
        n: hier.n,
        order: params.order.as_u32(),
        relax: params.relax.to_vec(),
        rate: report.rate,
        cycle_flops_per_unknown: report.cycle_flops_per_unknown(),
        flops_per_digit: report.flops_per_digit(),
    })
}
