use crate::error::{Error, Result};
use crate::hessian::regularized_power_curvature;
use crate::integrand::g_eval;
use crate::params::PQParams;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

pub const MIN_CELLS: usize = 4;
/// Gradient regularisation used when none is given and `p < 2`.
pub const DEFAULT_SUBQUADRATIC_MU_REG: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BoundaryData {
    /// `u = c₁ x₁ + c₂ x₂`
    Affine(f64, f64),
    /// `u = x₁² - x₂²`
    Saddle,
    /// Values on the boundary nodes, in row-major node order.
    Custom(Vec<f64>),
}

impl BoundaryData {
    fn value_at(&self, x1: f64, x2: f64) -> f64 {
        match self {
            BoundaryData::Affine(c1, c2) => c1 * x1 + c2 * x2,
            BoundaryData::Saddle => x1 * x1 - x2 * x2,
            BoundaryData::Custom(_) => unreachable!("custom data is indexed, not evaluated"),
        }
    }
}

impl FromStr for BoundaryData {
    type Err = Error;

    /// `saddle`, `affine:c1,c2`, or `custom:v0,v1,...`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let numbers = || -> Result<Vec<f64>> {
            rest.split(',')
                .filter(|v| !v.trim().is_empty())
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidProblem(format!("bad boundary value '{v}'")))
                })
                .collect()
        };
        match kind.trim().to_ascii_lowercase().as_str() {
            "saddle" => Ok(BoundaryData::Saddle),
            "affine" => match numbers()?.as_slice() {
                [] => Ok(BoundaryData::Affine(1.0, 0.0)),
                [c1, c2] => Ok(BoundaryData::Affine(*c1, *c2)),
                _ => Err(Error::InvalidProblem(
                    "affine boundary takes two coefficients".into(),
                )),
            },
            "custom" => Ok(BoundaryData::Custom(numbers()?)),
            other => Err(Error::InvalidProblem(format!(
                "unknown boundary id '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Integrand {
    /// `g(sqrt(|z|² + μ²))`
    Radial { params: PQParams, mu_reg: f64 },
    /// `(z₁² + μ²)^{p/2} + (z₂² + μ²)^{q/2}`
    Split { p: f64, q: f64, mu_reg: f64 },
}

impl Integrand {
    /// Radial integrand with the default regularisation for its `p`.
    pub fn radial(params: PQParams) -> Self {
        Integrand::Radial {
            params,
            mu_reg: default_mu_reg(params.p),
        }
    }

    pub fn split(p: f64, q: f64) -> Self {
        Integrand::Split {
            p,
            q,
            mu_reg: default_mu_reg(p),
        }
    }

    pub fn mu_reg(&self) -> f64 {
        match *self {
            Integrand::Radial { mu_reg, .. } | Integrand::Split { mu_reg, .. } => mu_reg,
        }
    }

    /// Value and gradient of the integrand at a cell gradient `z`.
    pub fn value_and_gradient(&self, z: [f64; 2]) -> (f64, [f64; 2]) {
        match *self {
            Integrand::Radial { params, mu_reg } => {
                let r = (z[0] * z[0] + z[1] * z[1] + mu_reg * mu_reg).sqrt();
                if r == 0.0 {
                    return (0.0, [0.0, 0.0]);
                }
                match g_eval(&params, r) {
                    Ok(ev) => {
                        let s = ev.g_prime / r;
                        (ev.g, [s * z[0], s * z[1]])
                    }
                    Err(_) => (f64::NAN, [f64::NAN, f64::NAN]),
                }
            }
            Integrand::Split { p, q, mu_reg } => {
                let (v1, d1) = regularized_power(p, mu_reg, z[0]);
                let (v2, d2) = regularized_power(q, mu_reg, z[1]);
                (v1 + v2, [d1, d2])
            }
        }
    }

    /// Eigenvalue ratio of the integrand's Hessian at `z`; `None` where the
    /// Hessian degenerates.
    pub fn hessian_ratio(&self, z: [f64; 2]) -> Option<f64> {
        let (lo, hi) = match *self {
            Integrand::Radial { params, mu_reg } => {
                let s2 = z[0] * z[0] + z[1] * z[1];
                let r2 = s2 + mu_reg * mu_reg;
                if r2 == 0.0 {
                    return None;
                }
                let r = r2.sqrt();
                let ev = g_eval(&params, r).ok()?;
                let tangent = ev.g_prime / r;
                // Hessian of g(sqrt(|z|² + μ²)) along z mixes g'' and g'/r
                let radial = ev.g_double_prime? * s2 / r2 + tangent * mu_reg * mu_reg / r2;
                (radial.min(tangent), radial.max(tangent))
            }
            Integrand::Split { p, q, mu_reg } => {
                let l1 = regularized_power_curvature(p, mu_reg, z[0]);
                let l2 = regularized_power_curvature(q, mu_reg, z[1]);
                (l1.min(l2), l1.max(l2))
            }
        };
        (lo > 0.0 && hi.is_finite()).then(|| hi / lo)
    }
}

/// `(s² + μ²)^{k/2}` and its derivative.
fn regularized_power(k: f64, mu: f64, s: f64) -> (f64, f64) {
    let r2 = s * s + mu * mu;
    if r2 == 0.0 {
        return (0.0, 0.0);
    }
    let value = r2.powf(0.5 * k);
    (value, k * s * value / r2)
}

pub fn default_mu_reg(p: f64) -> f64 {
    if p >= 2.0 {
        0.0
    } else {
        DEFAULT_SUBQUADRATIC_MU_REG
    }
}

/// Dirichlet problem on the unit square with `(n_cells + 1)²` nodes, stored
/// row-major: node `(i, j)` at `x = (i h, j h)` has index `j (n_cells + 1) + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridProblem {
    pub n_cells: usize,
    pub boundary: BoundaryData,
    pub integrand: Integrand,
    pub cell_size: f64,
    prescribed: Vec<f64>,
    on_boundary: Vec<bool>,
}

impl GridProblem {
    pub fn nodes_per_side(&self) -> usize {
        self.n_cells + 1
    }

    pub fn node_count(&self) -> usize {
        self.nodes_per_side().pow(2)
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nodes_per_side() + i
    }

    pub fn is_boundary(&self, k: usize) -> bool {
        self.on_boundary[k]
    }

    /// Prescribed values on boundary nodes, zero elsewhere.
    pub fn prescribed(&self) -> &[f64] {
        &self.prescribed
    }

    pub fn coordinates(&self, k: usize) -> (f64, f64) {
        let m = self.nodes_per_side();
        (
            (k % m) as f64 * self.cell_size,
            (k / m) as f64 * self.cell_size,
        )
    }

    /// Node values with the boundary data applied and the interior from `fill`.
    pub fn with_interior(&self, mut fill: impl FnMut(usize) -> f64) -> Vec<f64> {
        (0..self.node_count())
            .map(|k| {
                if self.on_boundary[k] {
                    self.prescribed[k]
                } else {
                    fill(k)
                }
            })
            .collect()
    }

    /// Nodal interpolant of the boundary data's own formula; `None` for
    /// custom data.
    pub fn boundary_extension(&self) -> Option<Vec<f64>> {
        if matches!(self.boundary, BoundaryData::Custom(_)) {
            return None;
        }
        Some(
            (0..self.node_count())
                .map(|k| {
                    let (x1, x2) = self.coordinates(k);
                    if self.on_boundary[k] {
                        self.prescribed[k]
                    } else {
                        self.boundary.value_at(x1, x2)
                    }
                })
                .collect(),
        )
    }

    /// Forward-difference gradient of cell `(i, j)` from its lower-left node.
    pub fn cell_gradient(&self, u: &[f64], i: usize, j: usize) -> [f64; 2] {
        let h = self.cell_size;
        let k = self.index(i, j);
        [
            (u[k + 1] - u[k]) / h,
            (u[k + self.nodes_per_side()] - u[k]) / h,
        ]
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n_cells).flat_map(move |j| (0..self.n_cells).map(move |i| (i, j)))
    }
}

pub fn build_problem(
    n_cells: usize,
    boundary: BoundaryData,
    integrand: Integrand,
) -> Result<GridProblem> {
    if n_cells < MIN_CELLS {
        return Err(Error::InvalidProblem(format!(
            "n_cells={n_cells} must be at least {MIN_CELLS}"
        )));
    }
    let mu = integrand.mu_reg();
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(Error::InvalidProblem(format!(
            "mu_reg={mu} must be finite and nonnegative"
        )));
    }
    if let Integrand::Split { p, q, .. } = integrand {
        if !(p > 1.0 && q > 1.0) {
            return Err(Error::InvalidProblem(format!(
                "split exponents must exceed 1, got p={p}, q={q}"
            )));
        }
    }
    let m = n_cells + 1;
    let h = 1.0 / n_cells as f64;
    let on_boundary: Vec<bool> = (0..m * m)
        .map(|k| {
            let (i, j) = (k % m, k / m);
            i == 0 || j == 0 || i == n_cells || j == n_cells
        })
        .collect();
    let mut prescribed = vec![0.0; m * m];
    match &boundary {
        BoundaryData::Custom(values) => {
            let slots: Vec<usize> = (0..m * m).filter(|&k| on_boundary[k]).collect();
            if values.len() != slots.len() {
                return Err(Error::InvalidProblem(format!(
                    "custom boundary needs {} values, got {}",
                    slots.len(),
                    values.len()
                )));
            }
            for (&k, &v) in slots.iter().zip(values) {
                prescribed[k] = v;
            }
        }
        data => {
            for k in (0..m * m).filter(|&k| on_boundary[k]) {
                prescribed[k] = data.value_at((k % m) as f64 * h, (k / m) as f64 * h);
            }
        }
    }
    if prescribed.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidProblem(
            "boundary values must be finite".into(),
        ));
    }
    Ok(GridProblem {
        n_cells,
        boundary,
        integrand,
        cell_size: h,
        prescribed,
        on_boundary,
    })
}

/// Discrete energy `Σ f(Du_h) h²` and its exact gradient (zero on boundary
/// nodes).
pub fn energy_and_gradient(problem: &GridProblem, u: &[f64]) -> Result<(f64, Vec<f64>)> {
    if u.len() != problem.node_count() {
        return Err(Error::InvalidProblem(format!(
            "expected {} node values, got {}",
            problem.node_count(),
            u.len()
        )));
    }
    if let Some(k) = (0..u.len())
        .find(|&k| problem.on_boundary[k] && u[k].to_bits() != problem.prescribed[k].to_bits())
    {
        return Err(Error::InvalidProblem(format!(
            "boundary node {k} holds {} instead of {}",
            u[k], problem.prescribed[k]
        )));
    }
    Ok(energy_and_gradient_unchecked(problem, u))
}

pub(crate) fn energy_and_gradient_unchecked(problem: &GridProblem, u: &[f64]) -> (f64, Vec<f64>) {
    let h = problem.cell_size;
    let area = h * h;
    let up = problem.nodes_per_side();
    let mut grad = vec![0.0; u.len()];
    let mut energy = 0.0;
    let mut compensation = 0.0;
    for (i, j) in problem.cells() {
        let k = problem.index(i, j);
        let z = problem.cell_gradient(u, i, j);
        let (f, df) = problem.integrand.value_and_gradient(z);
        // Kahan summation keeps the energy usable for line-search comparisons
        let y = f * area - compensation;
        let sum = energy + y;
        compensation = (sum - energy) - y;
        energy = sum;
        grad[k + 1] += h * df[0];
        grad[k + up] += h * df[1];
        grad[k] -= h * (df[0] + df[1]);
    }
    for (g, &b) in grad.iter_mut().zip(&problem.on_boundary) {
        if b {
            *g = 0.0;
        }
    }
    (energy, grad)
}
