//! Descent methods for the discrete energy: steepest descent and
//! Polak–Ribière⁺ nonlinear conjugate gradients, both with Armijo
//! backtracking. The first trial step of each line search is a secant
//! estimate of the 1D minimiser, which keeps the conjugate directions
//! meaningful on this nearly quadratic energy.

use super::problem::{energy_and_gradient, energy_and_gradient_unchecked, GridProblem};
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    GradientDescent,
    NonlinearCG,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Armijo {
    pub c: f64,
    pub backtrack: f64,
}

impl Default for Armijo {
    fn default() -> Self {
        Self {
            c: 1e-4,
            backtrack: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Initialization {
    /// Boundary data with a zero interior.
    ZeroFill,
    /// Interior uniform in `[-1, 1]` from the given seed.
    Random(u64),
    Given(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub max_iter: usize,
    /// Max-norm target for the interior gradient; defaults to
    /// `1e-8 · max(1, E₀)`.
    pub tol: Option<f64>,
    pub method: Method,
    pub line_search: Armijo,
    pub init: Initialization,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_iter: 20_000,
            tol: None,
            method: Method::NonlinearCG,
            line_search: Armijo::default(),
            init: Initialization::ZeroFill,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub u: Vec<f64>,
    pub energy: f64,
    pub energy_history: Vec<f64>,
    pub iterations: usize,
    pub grad_norm_final: f64,
    pub max_cell_gradient: f64,
    /// Largest Hessian eigenvalue ratio of the integrand over all cells.
    pub max_cell_ratio: f64,
    pub converged: bool,
    pub tol: f64,
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(u: &[f64], alpha: f64, d: &[f64]) -> Vec<f64> {
    u.iter().zip(d).map(|(x, y)| x + alpha * y).collect()
}

fn initial_state(problem: &GridProblem, init: &Initialization) -> Result<Vec<f64>> {
    match init {
        Initialization::ZeroFill => Ok(problem.with_interior(|_| 0.0)),
        Initialization::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            Ok(problem.with_interior(|_| rng.gen_range(-1.0..1.0)))
        }
        Initialization::Given(u) => {
            if u.len() != problem.node_count() {
                return Err(Error::InvalidProblem(format!(
                    "initial guess has {} values, expected {}",
                    u.len(),
                    problem.node_count()
                )));
            }
            // boundary entries are replaced so they match bit for bit
            Ok(problem.with_interior(|k| u[k]))
        }
    }
}

/// Per-cell diagnostics of a node array: max `|Du_h|` and max Hessian ratio.
pub fn cell_diagnostics(problem: &GridProblem, u: &[f64]) -> (f64, f64) {
    problem.cells().fold((0.0f64, 0.0f64), |(g, r), (i, j)| {
        let z = problem.cell_gradient(u, i, j);
        let ratio = problem.integrand.hessian_ratio(z).unwrap_or(0.0);
        (g.max(z[0].hypot(z[1])), r.max(ratio))
    })
}

struct LineSearchOutcome {
    alpha: f64,
    u: Vec<f64>,
    energy: f64,
    grad: Vec<f64>,
}

/// Armijo backtracking from a secant estimate of the minimiser along `d`.
fn line_search(
    problem: &GridProblem,
    u: &[f64],
    energy: f64,
    slope: f64,
    d: &[f64],
    trial: f64,
    rule: Armijo,
) -> Result<Option<LineSearchOutcome>> {
    let probe_u = axpy(u, trial, d);
    let (probe_e, probe_g) = energy_and_gradient_unchecked(problem, &probe_u);
    let probe_slope = dot(&probe_g, d);
    let mut alpha = if probe_e.is_finite() && probe_slope > slope {
        trial * slope / (slope - probe_slope)
    } else {
        trial
    };
    // the probe itself is a candidate if the secant step would overshoot it
    let mut best: Option<LineSearchOutcome> = None;
    if probe_e.is_finite() && probe_e <= energy + rule.c * trial * slope {
        best = Some(LineSearchOutcome {
            alpha: trial,
            u: probe_u,
            energy: probe_e,
            grad: probe_g,
        });
    }
    for _ in 0..60 {
        if !(alpha > 0.0 && alpha.is_finite()) {
            break;
        }
        let cand_u = axpy(u, alpha, d);
        let (cand_e, cand_g) = energy_and_gradient_unchecked(problem, &cand_u);
        if cand_e.is_nan() {
            return Err(Error::Solver(format!("non-finite energy at step {alpha}")));
        }
        if cand_e <= energy + rule.c * alpha * slope {
            if best.as_ref().is_none_or(|b| cand_e < b.energy) {
                best = Some(LineSearchOutcome {
                    alpha,
                    u: cand_u,
                    energy: cand_e,
                    grad: cand_g,
                });
            }
            break;
        }
        alpha *= rule.backtrack;
    }
    Ok(best)
}

pub fn minimize(problem: &GridProblem, opts: &SolveOptions) -> Result<SolveResult> {
    let mut u = initial_state(problem, &opts.init)?;
    let (mut energy, mut grad) = energy_and_gradient(problem, &u)?;
    if !energy.is_finite() {
        return Err(Error::Solver(format!("initial energy is {energy}")));
    }
    let tol = opts.tol.unwrap_or(1e-8 * energy.max(1.0));
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Solver(format!("tolerance {tol} must be positive")));
    }
    let mut history = vec![energy];
    let mut direction: Vec<f64> = grad.iter().map(|g| -g).collect();
    let mut last_step = 1.0 / max_norm(&grad).max(1e-300);
    let mut iterations = 0;
    let mut converged = max_norm(&grad) <= tol;

    while !converged && iterations < opts.max_iter {
        let mut slope = dot(&grad, &direction);
        if slope >= 0.0 {
            direction = grad.iter().map(|g| -g).collect();
            slope = dot(&grad, &direction);
        }
        let outcome = match line_search(
            problem,
            &u,
            energy,
            slope,
            &direction,
            last_step,
            opts.line_search,
        )? {
            Some(o) => Some(o),
            None if opts.method == Method::NonlinearCG => {
                // restart along steepest descent before giving up
                direction = grad.iter().map(|g| -g).collect();
                slope = dot(&grad, &direction);
                line_search(
                    problem,
                    &u,
                    energy,
                    slope,
                    &direction,
                    last_step,
                    opts.line_search,
                )?
            }
            None => None,
        };
        let Some(step) = outcome else {
            break;
        };
        iterations += 1;
        last_step = step.alpha;
        let new_dir = match opts.method {
            Method::GradientDescent => step.grad.iter().map(|g| -g).collect(),
            Method::NonlinearCG => {
                let denom = dot(&grad, &grad);
                let beta = if denom > 0.0 {
                    (dot(&step.grad, &step.grad) - dot(&step.grad, &grad)) / denom
                } else {
                    0.0
                }
                .max(0.0);
                step.grad
                    .iter()
                    .zip(&direction)
                    .map(|(g, d)| -g + beta * d)
                    .collect()
            }
        };
        u = step.u;
        energy = step.energy;
        grad = step.grad;
        direction = new_dir;
        history.push(energy);
        converged = max_norm(&grad) <= tol;
    }

    let (max_cell_gradient, max_cell_ratio) = cell_diagnostics(problem, &u);
    Ok(SolveResult {
        grad_norm_final: max_norm(&grad),
        u,
        energy,
        energy_history: history,
        iterations,
        max_cell_gradient,
        max_cell_ratio,
        converged,
        tol,
    })
}
