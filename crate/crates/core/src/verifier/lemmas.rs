//! Pointwise bounds on the phase building blocks on `(1, ∞)`.
//!
//! The three rational ratios and the log ratio are evaluated here from
//! `d = t - 1` independently of the integrand module, so these checks do not
//! share code with the quantities they bound.

use super::record::{at_t, CheckRecord, ReportSection};
use crate::integrand::phi_factors;
use crate::params::PQParams;
use rayon::prelude::*;
use std::f64::consts::E;

/// `d³ / (e + d⁴)`
pub fn lemma_ratio_cubic(d: f64) -> f64 {
    if d < 1.0 {
        d.powi(3) / (E + d.powi(4))
    } else {
        1.0 / (d + E / d.powi(3))
    }
}

/// `d³ t / (e + d⁴)` with `t = 1 + d`
pub fn lemma_ratio_cubic_t(d: f64) -> f64 {
    if d < 1.0 {
        d.powi(3) * (1.0 + d) / (E + d.powi(4))
    } else {
        (1.0 + 1.0 / d) / (1.0 + E / d.powi(4))
    }
}

/// `d² t² / (e + d⁴)`
pub fn lemma_ratio_square(d: f64) -> f64 {
    if d < 1.0 {
        (d * (1.0 + d)).powi(2) / (E + d.powi(4))
    } else {
        (1.0 + 1.0 / d).powi(2) / (1.0 + E / d.powi(4))
    }
}

/// `ln t / ln(e + d⁴)`
pub fn lemma_ratio_log(d: f64) -> f64 {
    let ln_t = d.ln_1p();
    let ln_base = if d < 1.0 {
        1.0 + (d.powi(4) / E).ln_1p()
    } else {
        4.0 * d.ln() + (E / d.powi(4)).ln_1p()
    };
    ln_t / ln_base
}

/// Grid points above 1 with `d = t - 1` for each.
fn offsets(grid: &[f64]) -> Vec<(f64, f64)> {
    grid.iter()
        .filter(|t| **t > 1.0 && t.is_finite())
        .map(|&t| (t, t - 1.0))
        .collect()
}

pub fn check_lemmas(params: &PQParams, grid: &[f64]) -> ReportSection {
    let eps = params.epsilon;
    let records: Vec<CheckRecord> = offsets(grid)
        .par_iter()
        .map(|&(t, d)| {
            let loc = at_t(t);
            let mut out = vec![
                CheckRecord::between("ratio_cubic", loc.clone(), 0.0, lemma_ratio_cubic(d), 1.0),
                CheckRecord::between(
                    "ratio_cubic_t",
                    loc.clone(),
                    0.0,
                    lemma_ratio_cubic_t(d),
                    2.0,
                ),
                CheckRecord::between("ratio_square", loc.clone(), 0.0, lemma_ratio_square(d), 4.0),
                CheckRecord::between("ratio_log", loc.clone(), 0.0, lemma_ratio_log(d), 1.0),
            ];
            match phi_factors(params, t) {
                Ok(f) => out.extend([
                    CheckRecord::between("phi_prime_t_ln_t", loc.clone(), 0.0, f.f1, 8.0 * eps),
                    CheckRecord::between("phi_prime_t", loc.clone(), 0.0, f.f2, 8.0 * eps),
                    CheckRecord::leq("phi_double_prime_t2_ln_t", loc, f.f3, 128.0 * eps),
                ]),
                Err(_) => out.push(CheckRecord::leq("phi_factors", loc, f64::NAN, 0.0)),
            }
            out
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    ReportSection::new("lemmas", records)
}
