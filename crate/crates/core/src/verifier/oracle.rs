//! Finite-difference oracles for the derivative formulas.

use super::record::{at_t, at_z, CheckRecord, ReportSection};
use crate::hessian::{grad_f, hess_matrix, MatrixPoint};
use crate::integrand::g_eval;
use crate::params::PQParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Relative step for central differences in `t`.
pub const FD_RELATIVE_STEP: f64 = 1e-6;
/// Relative step for the finite-difference Hessian of `f`.
pub const FD_HESSIAN_STEP: f64 = 1e-5;
/// Half-width of the excluded neighbourhoods of `t = 0` and `t = 1`.
pub const FD_HOLE: f64 = 1e-4;
pub const FD_DERIVATIVE_TOL: f64 = 1e-6;
pub const FD_HESSIAN_TOL: f64 = 1e-5;
pub const FD_GRADIENT_TOL: f64 = 1e-6;
pub const FD_RANDOM_POINTS: usize = 20;

pub fn central_difference(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// `f(z) = g(|z|)` evaluated directly from the profile.
pub fn radial_energy(params: &PQParams, z: &[f64]) -> f64 {
    let r = z.iter().map(|v| v * v).sum::<f64>().sqrt();
    g_eval(params, r).map(|ev| ev.g).unwrap_or(f64::NAN)
}

/// Gradient of `f` by central differences with step `h`.
pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, z: &[f64], h: f64) -> Vec<f64> {
    let mut work = z.to_vec();
    (0..z.len())
        .map(|i| {
            work[i] = z[i] + h;
            let plus = f(&work);
            work[i] = z[i] - h;
            let minus = f(&work);
            work[i] = z[i];
            (plus - minus) / (2.0 * h)
        })
        .collect()
}

/// Jacobian of a vector field by central differences with step `h`,
/// row-major. Applied to the gradient of `f` it gives the Hessian of `f`.
pub fn fd_jacobian(field: impl Fn(&[f64]) -> Vec<f64>, z: &[f64], h: f64) -> Vec<f64> {
    let n = z.len();
    let mut out = vec![0.0; n * n];
    let mut work = z.to_vec();
    for j in 0..n {
        work[j] = z[j] + h;
        let plus = field(&work);
        work[j] = z[j] - h;
        let minus = field(&work);
        work[j] = z[j];
        for i in 0..n {
            out[i * n + j] = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
    out
}

/// Random `rows × cols` matrix with Frobenius norm `radius`.
pub fn random_point(rng: &mut impl Rng, rows: usize, cols: usize, radius: f64) -> MatrixPoint {
    loop {
        let v: Vec<f64> = (0..rows * cols).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-3 {
            let scaled = v.into_iter().map(|x| x * radius / norm).collect();
            return MatrixPoint::new(scaled, rows, cols).expect("dimensions are consistent");
        }
    }
}

fn in_fd_domain(t: f64) -> bool {
    t.is_finite() && t >= FD_HOLE && (t - 1.0).abs() >= FD_HOLE
}

fn scalar_records(params: &PQParams, t: f64) -> Vec<CheckRecord> {
    let h = FD_RELATIVE_STEP * t;
    let g = |s: f64| g_eval(params, s).map(|e| e.g).unwrap_or(f64::NAN);
    let g1 = |s: f64| g_eval(params, s).map(|e| e.g_prime).unwrap_or(f64::NAN);
    let ev = match g_eval(params, t) {
        Ok(ev) => ev,
        Err(_) => return vec![CheckRecord::leq("g_eval", at_t(t), f64::NAN, 0.0)],
    };
    let g2 = ev.g_double_prime.unwrap_or(f64::NAN);
    let err1 = (ev.g_prime - central_difference(g, t, h)).abs() / ev.g_prime.abs().max(1.0);
    let err2 = (g2 - central_difference(g1, t, h)).abs() / g2.abs().max(1.0);
    vec![
        CheckRecord::leq("fd_g_prime", at_t(t), err1, FD_DERIVATIVE_TOL),
        CheckRecord::leq("fd_g_double_prime", at_t(t), err2, FD_DERIVATIVE_TOL),
    ]
}

fn matrix_records(params: &PQParams, z: &MatrixPoint) -> Vec<CheckRecord> {
    let loc = at_z(z.values());
    let f = |w: &[f64]| radial_energy(params, w);
    let (rows, cols) = z.dims();
    let field = |w: &[f64]| {
        MatrixPoint::new(w.to_vec(), rows, cols)
            .and_then(|p| grad_f(params, &p))
            .unwrap_or_else(|_| vec![f64::NAN; w.len()])
    };
    let fd_h = fd_jacobian(field, z.values(), FD_HESSIAN_STEP * z.norm());
    let (hess, grad) = match (hess_matrix(params, z), grad_f(params, z)) {
        (Ok(hm), Ok(gr)) => (hm, gr),
        _ => return vec![CheckRecord::leq("fd_hessian", loc, f64::NAN, 0.0)],
    };
    let dim = z.len();
    let hess_err = (0..dim * dim)
        .map(|k| (hess[(k / dim, k % dim)] - fd_h[k]).abs())
        .fold(0.0, f64::max);
    let fd_g = fd_gradient(f, z.values(), FD_RELATIVE_STEP * z.norm());
    let grad_scale = grad.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let grad_err = grad
        .iter()
        .zip(&fd_g)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / grad_scale;
    vec![
        CheckRecord::leq("fd_hessian", loc.clone(), hess_err, FD_HESSIAN_TOL),
        CheckRecord::leq("fd_gradient", loc, grad_err, FD_GRADIENT_TOL),
    ]
}

/// Derivative formulas against central differences: `g'` and `g''` on the
/// grid (minus holes at 0 and 1), the gradient and Hessian of `f` at random
/// `2 × 2` points with `|z| ∈ [0.05, 3]` away from the unit sphere. The
/// Hessian oracle differentiates `grad_f`, which is itself checked against
/// differences of `f`.
pub fn fd_crosscheck(params: &PQParams, grid: &[f64], seed: u64) -> ReportSection {
    let points: Vec<f64> = grid.iter().copied().filter(|t| in_fd_domain(*t)).collect();
    let mut records: Vec<CheckRecord> = points
        .par_iter()
        .map(|&t| scalar_records(params, t))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zs: Vec<MatrixPoint> = (0..FD_RANDOM_POINTS)
        .map(|_| {
            let mut r = (rng.gen_range(0.05f64.ln()..3.0f64.ln())).exp();
            if (r - 1.0).abs() < 1e-2 {
                r += 2e-2;
            }
            random_point(&mut rng, 2, 2, r)
        })
        .collect();
    records.extend(
        zs.par_iter()
            .map(|z| matrix_records(params, z))
            .collect::<Vec<_>>()
            .into_iter()
            .flatten(),
    );
    ReportSection::new("fd_crosscheck", records)
}
