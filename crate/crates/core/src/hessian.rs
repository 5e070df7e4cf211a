//! Gradient, Hessian and spectrum of the radial integrand `f(z) = g(|z|)` on
//! `n × N` gradient matrices, plus the split integrand `|z₁|^p + |z₂|^q` as a
//! non-uniformly-elliptic contrast.
//!
//! The Hessian of a radial function is a rank-one update of a scaled
//! identity, `(g'' - g'/t) ẑẑᵀ + (g'/t) I`, so its spectrum is known in closed
//! form: `g''(t)` once (along `z`) and `g'(t)/t` with multiplicity `nN - 1`.

use crate::error::{Error, Result};
use crate::integrand::g_eval;
use crate::params::PQParams;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Matrix norm used for `|DDf(z)|` in the upper Hessian envelope.
pub const HESSIAN_NORM_CONVENTION: &str = "spectral norm (largest eigenvalue)";

/// A flattened `n × N` matrix `z`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixPoint {
    values: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl MatrixPoint {
    pub fn new(values: Vec<f64>, rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Domain("matrix dimensions must be positive".into()));
        }
        if values.len() != rows * cols {
            return Err(Error::Domain(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                values.len()
            )));
        }
        let point = Self { values, rows, cols };
        if !point.norm().is_finite() {
            return Err(Error::Domain("matrix entries must have finite norm".into()));
        }
        Ok(point)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HessianSpectrum {
    pub radius: f64,
    pub lambda_radial: f64,
    pub lambda_tangent: f64,
    pub ratio: f64,
}

impl HessianSpectrum {
    pub fn min_eigenvalue(&self) -> f64 {
        self.lambda_radial.min(self.lambda_tangent)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.lambda_radial.max(self.lambda_tangent)
    }
}

/// Two-sided bound `m ≤ g''(t) t / g'(t) ≤ M` and the resulting cap on the
/// eigenvalue ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticityBounds {
    pub m: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
    pub ratio_cap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpectrum {
    pub z: [f64; 2],
    pub lambda_first: f64,
    pub lambda_second: f64,
    pub ratio: f64,
}

/// Empirical growth constants fitted on a radius grid.
///
/// `c4` is the supremum of `g` on grid points `t ≤ 1`, so the upper bound
/// reads `g ≤ c3 t^q` on `t ≥ 1` and `g ≤ c4` below. `ratio_sup` is the
/// plain supremum of the eigenvalue ratio, i.e. the uniform ellipticity
/// constant on the sampled range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub mu: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
    pub c7: f64,
    pub ratio_sup: f64,
    pub sample_range: (f64, f64),
    pub norm_convention: String,
    pub verified: bool,
}

fn radial_parts(params: &PQParams, radius: f64) -> Result<(f64, f64)> {
    let ev = g_eval(params, radius)?;
    let g2 = ev
        .g_double_prime
        .ok_or_else(|| Error::Domain("g'' is unavailable at radius 0".into()))?;
    Ok((g2, ev.g_prime / radius))
}

/// `Df(z) = g'(|z|) z/|z|`; zero at `z = 0`.
pub fn grad_f(params: &PQParams, point: &MatrixPoint) -> Result<Vec<f64>> {
    let r = point.norm();
    if r == 0.0 {
        return Ok(vec![0.0; point.len()]);
    }
    let scale = g_eval(params, r)?.g_prime / r;
    Ok(point.values.iter().map(|v| scale * v).collect())
}

/// `⟨DDf(z) λ̂, λ̂⟩ = (g'' - g'/t) ⟨ẑ, λ̂⟩² + g'/t`.
pub fn hess_quadratic_form(
    params: &PQParams,
    z: &MatrixPoint,
    lambda: &MatrixPoint,
) -> Result<f64> {
    if z.dims() != lambda.dims() {
        return Err(Error::Domain(
            "z and lambda must have equal dimensions".into(),
        ));
    }
    let (rz, rl) = (z.norm(), lambda.norm());
    if rz == 0.0 || rl == 0.0 {
        return Err(Error::Domain("z and lambda must be nonzero".into()));
    }
    let (g2, tangent) = radial_parts(params, rz)?;
    let cos = z
        .values
        .iter()
        .zip(&lambda.values)
        .map(|(a, b)| a * b)
        .sum::<f64>()
        / (rz * rl);
    Ok((g2 - tangent) * cos * cos + tangent)
}

pub fn hess_matrix(params: &PQParams, z: &MatrixPoint) -> Result<DMatrix<f64>> {
    let r = z.norm();
    if r == 0.0 {
        return Err(Error::Domain("Hessian is undefined at z = 0".into()));
    }
    let (g2, tangent) = radial_parts(params, r)?;
    let dim = z.len();
    let unit: Vec<f64> = z.values.iter().map(|v| v / r).collect();
    let coeff = g2 - tangent;
    Ok(DMatrix::from_fn(dim, dim, |i, j| {
        let diag = if i == j { tangent } else { 0.0 };
        coeff * (unit[i] * unit[j]) + diag
    }))
}

pub fn hess_spectrum(params: &PQParams, radius: f64) -> Result<HessianSpectrum> {
    if radius.is_nan() || radius <= 0.0 {
        return Err(Error::Domain(format!("radius={radius} must be positive")));
    }
    let (lambda_radial, lambda_tangent) = radial_parts(params, radius)?;
    let ratio = lambda_radial.max(lambda_tangent) / lambda_radial.min(lambda_tangent);
    Ok(HessianSpectrum {
        radius,
        lambda_radial,
        lambda_tangent,
        ratio,
    })
}

pub fn ellipticity_bounds(params: &PQParams) -> EllipticityBounds {
    let (a, b, eps) = (params.a, params.b, params.epsilon);
    let m = a - 1.0 - b - 224.0 * b * eps;
    let big_m = a - 1.0 + b + 224.0 * b * eps;
    EllipticityBounds {
        m,
        big_m,
        ratio_cap: big_m.max(1.0 / m),
    }
}

/// Second derivative of `s ↦ (s² + μ²)^{k/2}`.
pub(crate) fn regularized_power_curvature(k: f64, mu: f64, s: f64) -> f64 {
    let r2 = s * s + mu * mu;
    if mu == 0.0 {
        return k * (k - 1.0) * s.abs().powf(k - 2.0);
    }
    k * r2.powf(0.5 * k - 2.0) * ((k - 1.0) * s * s + mu * mu)
}

/// Eigenvalues of the Hessian of `|z₁|^p + |z₂|^q` (diagonal).
pub fn split_baseline_spectrum(p: f64, q: f64, z: [f64; 2]) -> Result<SplitSpectrum> {
    if !(p > 1.0 && q > 1.0) {
        return Err(Error::Domain(format!(
            "split exponents must exceed 1, got p={p}, q={q}"
        )));
    }
    if z[0] == 0.0 || z[1] == 0.0 || !z.iter().all(|v| v.is_finite()) {
        return Err(Error::Domain(format!(
            "split Hessian is degenerate at z=({}, {})",
            z[0], z[1]
        )));
    }
    let lambda_first = regularized_power_curvature(p, 0.0, z[0]);
    let lambda_second = regularized_power_curvature(q, 0.0, z[1]);
    Ok(SplitSpectrum {
        z,
        lambda_first,
        lambda_second,
        ratio: lambda_first.max(lambda_second) / lambda_first.min(lambda_second),
    })
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid(
            "growth fit needs a nonempty grid".into(),
        ));
    }
    if grid.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::InvalidGrid(
            "grid points must be finite and positive".into(),
        ));
    }
    Ok(())
}

fn within(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + 1e-12 * lhs.abs().max(rhs.abs()).max(1.0)
}

/// Fits the growth and ellipticity envelope constants of the radial integrand
/// over `grid`, then re-checks every fitted inequality at every grid point.
pub fn fit_growth_constants(params: &PQParams, mu: f64, grid: &[f64]) -> Result<GrowthFit> {
    check_grid(grid)?;
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::Domain(format!("mu={mu} must lie in [0, 1]")));
    }
    let (p, q) = (params.p, params.q);
    struct Sample {
        t: f64,
        g: f64,
        spec: HessianSpectrum,
    }
    let samples = grid
        .iter()
        .map(|&t| {
            Ok(Sample {
                t,
                g: g_eval(params, t)?.g,
                spec: hess_spectrum(params, t)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let inf = |f: &dyn Fn(&Sample) -> f64| samples.iter().map(f).fold(f64::INFINITY, f64::min);
    let sup = |f: &dyn Fn(&Sample) -> f64| samples.iter().map(f).fold(f64::NEG_INFINITY, f64::max);

    let c1 = inf(&|s| s.g / s.t.powf(p));
    let c2 = if c1 > 0.0 { 0.0 } else { f64::NAN };
    let upper: Vec<&Sample> = samples.iter().filter(|s| s.t >= 1.0).collect();
    let c3 = if upper.is_empty() {
        1.0
    } else {
        upper
            .iter()
            .map(|s| s.g / s.t.powf(q))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let c4 = samples
        .iter()
        .filter(|s| s.t <= 1.0)
        .map(|s| s.g)
        .fold(0.0, f64::max);
    let c5 = inf(&|s| s.spec.min_eigenvalue() / (mu + s.t).powf(p - 2.0));
    let c6 = sup(&|s| s.spec.max_eigenvalue() / (mu + s.t).powf(q - 2.0));
    let c7 = sup(&|s| s.spec.ratio / (mu + s.t).powf(q - p));
    let ratio_sup = sup(&|s| s.spec.ratio);

    let verified = samples.iter().all(|s| {
        let (t, g) = (s.t, s.g);
        let upper_rhs = if t >= 1.0 { c3 * t.powf(q) } else { c4 };
        within(c1 * t.powf(p) - c2, g)
            && within(g, upper_rhs)
            && within(c5 * (mu + t).powf(p - 2.0), s.spec.min_eigenvalue())
            && within(s.spec.max_eigenvalue(), c6 * (mu + t).powf(q - 2.0))
            && within(s.spec.ratio, c7 * (mu + t).powf(q - p))
    });

    Ok(GrowthFit {
        mu,
        c1,
        c2,
        c3,
        c4,
        c5,
        c6,
        c7,
        ratio_sup,
        sample_range: (
            grid.iter().copied().fold(f64::INFINITY, f64::min),
            grid.iter().copied().fold(0.0, f64::max),
        ),
        norm_convention: HESSIAN_NORM_CONVENTION.to_string(),
        verified,
    })
}

/// Ratio envelope of the split integrand sampled along `z = (t/√2, t/√2)`.
/// Returns `(c7, ratio_sup)` with the same normalisation as
/// [`fit_growth_constants`].
pub fn fit_split_ratio(p: f64, q: f64, mu: f64, grid: &[f64]) -> Result<(f64, f64)> {
    check_grid(grid)?;
    let mut c7 = f64::NEG_INFINITY;
    let mut ratio_sup = f64::NEG_INFINITY;
    for &t in grid {
        let c = t / std::f64::consts::SQRT_2;
        let spec = split_baseline_spectrum(p, q, [c, c])?;
        c7 = c7.max(spec.ratio / (mu + t).powf(q - p));
        ratio_sup = ratio_sup.max(spec.ratio);
    }
    Ok((c7, ratio_sup))
}
