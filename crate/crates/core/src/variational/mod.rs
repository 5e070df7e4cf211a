//! Discrete minimisation of `u ↦ Σ_cells f(Du_h) h²` on the unit square with
//! Dirichlet data, used as numerical evidence for gradient bounds of
//! minimisers.

mod problem;
mod solver;

pub use problem::{
    build_problem, default_mu_reg, energy_and_gradient, BoundaryData, GridProblem, Integrand,
    DEFAULT_SUBQUADRATIC_MU_REG, MIN_CELLS,
};
pub use solver::{
    cell_diagnostics, minimize, Armijo, Initialization, Method, SolveOptions, SolveResult,
};

use crate::error::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementRow {
    pub n_cells: usize,
    pub max_cell_gradient: f64,
    pub energy: f64,
    pub iterations: usize,
    /// `max_cell_gradient` relative to the previous level.
    pub growth_factor: Option<f64>,
}

/// One converged solve per level, same boundary data and integrand.
pub fn refinement_study(
    boundary: &BoundaryData,
    integrand: Integrand,
    levels: &[usize],
    opts: &SolveOptions,
) -> Result<Vec<RefinementRow>> {
    if levels.is_empty() {
        return Err(Error::InvalidProblem(
            "refinement study needs at least one level".into(),
        ));
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidProblem(
            "levels must be strictly ascending".into(),
        ));
    }
    let solves: Vec<Result<(usize, SolveResult)>> = levels
        .par_iter()
        .map(|&n| {
            let problem = build_problem(n, boundary.clone(), integrand)?;
            let result = minimize(&problem, opts)?;
            if !result.converged {
                return Err(Error::Solver(format!(
                    "level n_cells={n} did not converge (gradient {:.3e} > tol {:.3e})",
                    result.grad_norm_final, result.tol
                )));
            }
            Ok((n, result))
        })
        .collect();
    let mut rows: Vec<RefinementRow> = Vec::with_capacity(levels.len());
    for solve in solves {
        let (n, result) = solve?;
        let growth_factor = rows
            .last()
            .map(|prev| result.max_cell_gradient / prev.max_cell_gradient);
        rows.push(RefinementRow {
            n_cells: n,
            max_cell_gradient: result.max_cell_gradient,
            energy: result.energy,
            iterations: result.iterations,
            growth_factor,
        });
    }
    Ok(rows)
}
