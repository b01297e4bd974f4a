//! Nelder–Mead minimization of the measured convergence factor over the
//! over-relaxation parameters.
//!
//! The simplex method needs nothing but function values, which suits an
//! objective that is a measured spectral radius: noisy at the margins,
//! non-differentiable, and undefined (treated as +∞) wherever the cycle
//! diverges.

use crate::analysis::{estimate_rate, RateOptions};
use crate::cycle::{CycleParams, Order, Relax};
use crate::mesh::Hierarchy;
use crate::Error;

// standard Nelder–Mead coefficients: reflection, expansion, contraction,
// shrink
const ALPHA: f64 = 1.0;
const CHI: f64 = 2.0;
const GAMMA: f64 = 0.5;
const SIGMA: f64 = 0.5;

/// Termination controls for [`nelder_mead`].
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct NmOptions {
    /// Stop when every vertex is within this ∞-distance of the best.
    pub x_tol: f64,
    /// Stop when the best–worst value spread falls below this.
    pub f_tol: f64,
    /// Hard cap on objective evaluations.
    pub max_evals: usize,
}

impl Default for NmOptions {
    fn default() -> Self {
        NmOptions {
            x_tol: 1e-3,
            f_tol: 1e-5,
            max_evals: 500,
        }
    }
}

/// Minimizer output: the best point ever evaluated, not merely the final
/// simplex vertex.
#[derive(Clone, Debug)]
pub struct NmResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

struct Tracker<F> {
    f: F,
    evals: usize,
    best_x: Vec<f64>,
    best_f: f64,
}

impl<F: FnMut(&[f64]) -> f64> Tracker<F> {
    // non-finite objective values become +∞ so the simplex retreats from
    // them instead of poisoning comparisons
    fn eval(&mut self, x: &[f64]) -> f64 {
        self.evals += 1;
        let raw = (self.f)(x);
        let v = if raw.is_finite() { raw } else { f64::INFINITY };
        if v < self.best_f {
            self.best_f = v;
            self.best_x = x.to_vec();
        }
        v
    }
}

fn blend(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    // a + t·(a − b)
    a.iter().zip(b).map(|(&a, &b)| a + t * (a - b)).collect()
}

/// Derivative-free minimization of `f` from `x0` by the Nelder–Mead
/// simplex method. The initial simplex perturbs each coordinate by 5%
/// (or to 0.00025 where it is zero).
pub fn nelder_mead<F>(f: F, x0: &[f64], opts: &NmOptions) -> NmResult
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
    assert!(dim >= 1, "need at least one coordinate");
    let mut tr = Tracker {
        f,
        evals: 0,
        best_x: x0.to_vec(),
        best_f: f64::INFINITY,
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let v0 = tr.eval(x0);
    simplex.push((x0.to_vec(), v0));
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] = if x[i] != 0.0 { x[i] * 1.05 } else { 0.00025 };
        let v = tr.eval(&x);
        simplex.push((x, v));
    }
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .map(|(&a, &b)| (a - b).abs())
            })
            .fold(0.0, f64::max);
        let spread = simplex[dim].1 - simplex[0].1;
        if diameter < opts.x_tol || spread < opts.f_tol || tr.evals >= opts.max_evals {
            break;
        }
        let centroid: Vec<f64> = (0..dim)
            .map(|k| simplex[..dim].iter().map(|(x, _)| x[k]).sum::<f64>() / dim as f64)
            .collect();
        let (worst_x, worst_v) = simplex[dim].clone();
        let reflected = blend(&centroid, &worst_x, ALPHA);
        let vr = tr.eval(&reflected);
        if vr < simplex[0].1 {
            let expanded = blend(&reflected, &centroid, CHI - 1.0);
            let ve = tr.eval(&expanded);
            simplex[dim] = if ve < vr { (expanded, ve) } else { (reflected, vr) };
        } else if vr < simplex[dim - 1].1 {
            simplex[dim] = (reflected, vr);
        } else {
            let (contracted, accept_below) = if vr < worst_v {
                // outside: between the reflection and the centroid
                (blend(&centroid, &reflected, -GAMMA), vr)
            } else {
                // inside: between the centroid and the worst vertex
                (blend(&centroid, &worst_x, -GAMMA), worst_v)
            };
            let vc = tr.eval(&contracted);
            if vc <= accept_below {
                simplex[dim] = (contracted, vc);
            } else {
                // shrink the whole simplex toward the best vertex
                let best = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    vertex.0 = blend(&best, &vertex.0, -SIGMA);
                    vertex.1 = tr.eval(&vertex.0);
                }
            }
        }
    }
    NmResult {
        x: tr.best_x,
        value: tr.best_f,
        evals: tr.evals,
    }
}

/// Controls for [`tune_params`].
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct TuneOptions {
    /// Rate measurement used as the objective.
    pub rate: RateOptions,
    /// Simplex termination.
    pub nm: NmOptions,
}

impl Default for TuneOptions {
    fn default() -> Self {
        TuneOptions {
            rate: RateOptions::default(),
            nm: NmOptions::default(),
        }
    }
}

/// A tuned parameter set and the objective value it achieved.
#[derive(Clone, Debug)]
pub struct TuneResult {
    pub relax: Vec<f64>,
    pub rate: f64,
    pub evals: usize,
}

/// Minimizes the measured convergence factor over the over-relaxation
/// parameters, starting the simplex at `start` (length 1, or 4 on a 3D
/// diagonal hierarchy). Parameters outside (0, 3] score +∞; a divergent
/// cycle penalizes itself through its growth factor (> 1), or +∞ when the
/// measurement overflows.
pub fn tune_params(
    hier: &Hierarchy,
    order: Order,
    start: &[f64],
    opts: &TuneOptions,
) -> Result<TuneResult, Error> {
    Relax::from_slice(hier.scheme, hier.dim, start)?;
    let objective = |x: &[f64]| -> f64 {
        if x.iter().any(|&p| !(p > 0.0 && p <= 3.0)) {
            return f64::INFINITY;
        }
        let relax = Relax::from_slice(hier.scheme, hier.dim, x)
            .expect("simplex keeps the validated arity");
        let params = CycleParams { order, relax };
        estimate_rate(hier, &params, &opts.rate)
            .expect("measurement on a validated configuration")
            .rate
    };
    let nm = nelder_mead(objective, start, &opts.nm);
    Ok(TuneResult {
        relax: nm.x,
        rate: nm.value,
        evals: nm.evals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Scheme;
    use approx::assert_abs_diff_eq;

    #[test]
    fn minimizes_a_quadratic_bowl() {
        let f = |x: &[f64]| (x[0] - 1.3).powi(2) + 2.0 * (x[1] + 0.7).powi(2);
        let opts = NmOptions {
            x_tol: 1e-6,
            f_tol: 1e-12,
            max_evals: 500,
        };
        let result = nelder_mead(f, &[0.0, 0.0], &opts);
        assert_abs_diff_eq!(result.x[0], 1.3, epsilon = 1e-4);
        assert_abs_diff_eq!(result.x[1], -0.7, epsilon = 1e-4);
        assert!(result.value < 1e-8);
    }

    #[test]
    fn minimizes_rosenbrock() {
        let f = |x: &[f64]| {
            (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
        };
        let opts = NmOptions {
            x_tol: 1e-8,
            f_tol: 1e-14,
            max_evals: 2000,
        };
        let result = nelder_mead(f, &[-1.2, 1.0], &opts);
        assert_abs_diff_eq!(result.x[0], 1.0, epsilon = 1e-2);
        assert_abs_diff_eq!(result.x[1], 1.0, epsilon = 1e-2);
    }

    #[test]
    fn minimizes_in_one_dimension() {
        let f = |x: &[f64]| (x[0] - 1.05).powi(4);
        let opts = NmOptions {
            x_tol: 1e-7,
            f_tol: 1e-16,
            max_evals: 300,
        };
        let result = nelder_mead(f, &[1.0], &opts);
        assert_abs_diff_eq!(result.x[0], 1.05, epsilon = 1e-2);
    }

    #[test]
    fn retreats_from_non_finite_regions() {
        // objective is NaN outside the unit disk; the simplex must stay in
        // and still find the center
        let f = |x: &[f64]| {
            let r2 = x[0] * x[0] + x[1] * x[1];
            if r2 > 1.0 {
                f64::NAN
            } else {
                r2
            }
        };
        let opts = NmOptions {
            x_tol: 1e-6,
            f_tol: 1e-12,
            max_evals: 500,
        };
        let result = nelder_mead(f, &[0.6, 0.6], &opts);
        assert!(result.value < 1e-6);
        assert!(result.x[0].abs() < 1e-2 && result.x[1].abs() < 1e-2);
    }

    #[test]
    fn respects_the_evaluation_cap() {
        let mut calls = 0usize;
        let f = |x: &[f64]| {
            calls += 1;
            x[0].sin() * x[1].cos() + x[0] * x[0]
        };
        let opts = NmOptions {
            x_tol: 0.0,
            f_tol: 0.0,
            max_evals: 37,
        };
        let result = nelder_mead(f, &[2.0, 2.0], &opts);
        // one loop pass after the cap check can add at most dim + 2 evals
        assert!(result.evals >= 37 && result.evals <= 37 + 4);
        assert_eq!(calls, result.evals);
    }

    #[test]
    fn tuning_improves_on_unit_relaxation() {
        let hier = Hierarchy::diagonal(2, 9, 2).unwrap();
        let opts = TuneOptions {
            nm: NmOptions {
                max_evals: 60,
                ..NmOptions::default()
            },
            ..TuneOptions::default()
        };
        let baseline = estimate_rate(
            &hier,
            &CycleParams::default(),
            &opts.rate,
        )
        .unwrap()
        .rate;
        let tuned = tune_params(&hier, Order::Second, &[1.0], &opts).unwrap();
        assert!(tuned.rate <= baseline);
        assert!(tuned.relax[0] > 0.0 && tuned.relax[0] <= 3.0);
        assert!(tuned.evals <= 60 + 3);
        // deterministic: a second run reproduces the result exactly
        let again = tune_params(&hier, Order::Second, &[1.0], &opts).unwrap();
        assert_eq!(again.relax, tuned.relax);
        assert_eq!(again.rate, tuned.rate);
    }

    #[test]
    fn start_vector_arity_is_validated() {
        let hier = Hierarchy::diagonal(2, 9, 2).unwrap();
        let err = tune_params(
            &hier,
            Order::Second,
            &[1.0, 1.0],
            &TuneOptions::default(),
        )
        .unwrap_err();
        assert_eq!(
            err,
            Error::RelaxArity {
                expected: Relax::arity(Scheme::Diagonal, 2),
                found: 2
            }
        );
    }
}
