//! Uniform ellipticity of the radial integrand and the split contrast.

use super::oracle::random_point;
use super::record::{at_t, at_z, CheckRecord, ReportSection};
use crate::hessian::{
    ellipticity_bounds, hess_quadratic_form, hess_spectrum, split_baseline_spectrum,
};
use crate::params::PQParams;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Relative band around `[λ_min, λ_max]` accepted for the quadratic form.
pub const QUADRATIC_FORM_BAND: f64 = 1e-10;

/// Ratio cap at every radius, and the quadratic form at random `(z, λ)`
/// pairs (alternating `2 × 2` and `3 × 1` shapes) inside the closed-form
/// eigenvalue range.
pub fn check_uniform_ellipticity(
    params: &PQParams,
    radii: &[f64],
    directions_per_radius: usize,
    seed: u64,
) -> ReportSection {
    let cap = ellipticity_bounds(params).ratio_cap;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::new();
    for &r in radii {
        let spec = match hess_spectrum(params, r) {
            Ok(s) => s,
            Err(_) => {
                records.push(CheckRecord::leq("ratio_cap", at_t(r), f64::NAN, cap));
                continue;
            }
        };
        records.push(CheckRecord::leq("ratio_cap", at_t(r), spec.ratio, cap));
        let lo = spec.min_eigenvalue() * (1.0 - QUADRATIC_FORM_BAND);
        let hi = spec.max_eigenvalue() * (1.0 + QUADRATIC_FORM_BAND);
        for k in 0..directions_per_radius {
            let (rows, cols) = if k % 2 == 0 { (2, 2) } else { (3, 1) };
            let z = random_point(&mut rng, rows, cols, r);
            let lambda = random_point(&mut rng, rows, cols, 1.0);
            let value = hess_quadratic_form(params, &z, &lambda).unwrap_or(f64::NAN);
            records.push(CheckRecord::between(
                "quadratic_form_in_spectrum",
                at_z(z.values()),
                lo,
                value,
                hi,
            ));
        }
    }
    ReportSection::new("uniform_ellipticity", records)
}

/// Closed form `q(q-1) s^{q-2} / (p(p-1))` for the split ratio at `z = (1, s)`,
/// valid when the second eigenvalue dominates.
pub fn split_ratio_closed_form(p: f64, q: f64, s: f64) -> f64 {
    q * (q - 1.0) * s.powf(q - 2.0) / (p * (p - 1.0))
}

/// Split integrand at `z = (1, 10^k)`: the computed ratio against its closed
/// form. Each record's margin is relative to that closed form; the notes list
/// how far past the radial cap each ratio lies.
pub fn split_contrast(params: &PQParams, exponents: &[i32]) -> ReportSection {
    let (p, q) = (params.p, params.q);
    let cap = ellipticity_bounds(params).ratio_cap;
    let mut records = Vec::new();
    let mut excess = Vec::new();
    for &k in exponents {
        let s = 10f64.powi(k);
        let z = [1.0, s];
        let expected = split_ratio_closed_form(p, q, s);
        let observed = split_baseline_spectrum(p, q, z)
            .map(|sp| sp.ratio)
            .unwrap_or(f64::NAN);
        let mut rec = CheckRecord::equal("split_ratio_closed_form", at_z(&z), observed, expected);
        // relative comparison: the ratios span many decades
        rec.margin = -((observed - expected) / expected).abs();
        rec.passed = rec.margin >= -1e-12;
        records.push(rec);
        excess.push(format!("k={k}: ratio/cap={:.6e}", observed / cap));
    }
    ReportSection::new("split_contrast", records).with_note(format!(
        "radial ratio cap {cap:.6}; split {}",
        excess.join(", ")
    ))
}
