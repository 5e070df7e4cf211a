//! Two-sided bounds on `g'` and `g''`, the growth envelope, convexity, the
//! limits at `0⁺` and `∞`, and the subquadratic monotonicity of `g'(t)/t`.

use super::record::{at_t, CheckRecord, ReportSection};
use crate::error::{Error, Result};
use crate::integrand::{g_eval, GEvaluation};
use crate::params::PQParams;
use rayon::prelude::*;

pub const SMALL_T_THRESHOLD: f64 = 1e-6;
pub const LARGE_T_THRESHOLD: f64 = 1e6;
pub const SMALL_T_NOMINAL: f64 = 1e-8;
pub const LARGE_T_NOMINAL: f64 = 1e12;

/// Point near 0 at which `g(t)/t` and `g'(t)` are required to be below
/// [`SMALL_T_THRESHOLD`]: `1e-8`, moved closer to 0 when `t^{p-1}` decays
/// too slowly for that to be reachable at `1e-8`.
pub fn small_t_probe(params: &PQParams) -> f64 {
    let p = params.lower_exponent();
    let needed = (0.1 * SMALL_T_THRESHOLD / p).powf(1.0 / (p - 1.0));
    SMALL_T_NOMINAL.min(needed).max(f64::MIN_POSITIVE)
}

/// Point at which `g(t)/t` is required to exceed [`LARGE_T_THRESHOLD`]:
/// `max(1e12, t_max)`, moved further out when `t^{p-1}` grows too slowly.
pub fn large_t_probe(params: &PQParams, t_max: f64) -> f64 {
    let p = params.lower_exponent();
    let needed = (10.0 * LARGE_T_THRESHOLD).powf(1.0 / (p - 1.0));
    LARGE_T_NOMINAL.max(t_max).max(needed).min(f64::MAX)
}

/// `g(t)/t` from the log-domain value, finite wherever `g` is.
fn g_over_t(ev: &GEvaluation) -> f64 {
    if ev.t == 0.0 {
        return 0.0;
    }
    (ev.ln_g - ev.t.ln()).exp()
}

fn eval_grid(params: &PQParams, grid: &[f64]) -> Vec<Option<GEvaluation>> {
    grid.par_iter().map(|&t| g_eval(params, t).ok()).collect()
}

fn pointwise(params: &PQParams, ev: &GEvaluation) -> Vec<CheckRecord> {
    let (a, b, eps) = (params.a, params.b, params.epsilon);
    let t = ev.t;
    let loc = at_t(t);
    let gt = g_over_t(ev);
    let g2 = ev.g_double_prime.unwrap_or(f64::NAN);
    let low1 = a - b - 8.0 * b * eps;
    let high1 = a + b + 8.0 * b * eps;
    let m = a - 1.0 - b - 224.0 * b * eps;
    let big_m = a - 1.0 + b + 224.0 * b * eps;
    let tangent = ev.g_prime / t;
    let mut out = vec![
        CheckRecord::leq("statement1_lower", loc.clone(), low1 * gt, ev.g_prime),
        CheckRecord::leq("statement1_upper", loc.clone(), ev.g_prime, high1 * gt),
        CheckRecord::leq(
            "statement2_lower",
            loc.clone(),
            low1 * t.powf(a - b - 1.0),
            ev.g_prime,
        ),
        CheckRecord::leq(
            "statement2_upper",
            loc.clone(),
            ev.g_prime,
            high1 * (t.powf(a - b - 1.0) + t.powf(a + b - 1.0)),
        ),
        CheckRecord::leq("statement3_lower", loc.clone(), m * tangent, g2),
        CheckRecord::leq("statement3_upper", loc.clone(), g2, big_m * tangent),
    ];
    if t >= 1.0 {
        out.push(CheckRecord::leq(
            "envelope_lower",
            loc.clone(),
            t.powf(a - b),
            ev.g,
        ));
        out.push(CheckRecord::leq("envelope_upper", loc, ev.g, t.powf(a + b)));
    } else {
        out.push(CheckRecord::equal(
            "power_branch_exact",
            loc,
            ev.g,
            t.powf(a - b),
        ));
    }
    out
}

pub fn check_theorem_g(params: &PQParams, grid: &[f64]) -> ReportSection {
    let evals = eval_grid(params, grid);
    let mut records: Vec<CheckRecord> = grid
        .par_iter()
        .zip(evals.par_iter())
        .map(|(&t, ev)| match ev {
            Some(ev) => pointwise(params, ev),
            None => vec![CheckRecord::leq("g_eval", at_t(t), f64::NAN, 0.0)],
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();

    let (b, eps) = (params.b, params.epsilon);
    let constant_lhs = b * eps * (64.0 * eps + 152.0) / (params.a - b - 8.0 * b * eps);
    records.push(CheckRecord::leq(
        "phi2_over_statement1_constant",
        "constants".to_string(),
        constant_lhs,
        216.0 * b * eps,
    ));

    for pair in evals.windows(2) {
        if let [Some(lo), Some(hi)] = pair {
            records.push(CheckRecord::leq(
                "g_prime_increasing",
                format!("{}..{}", at_t(lo.t), at_t(hi.t)),
                lo.g_prime,
                hi.g_prime,
            ));
        }
    }

    let t_small = small_t_probe(params);
    let t_max = grid.iter().copied().fold(0.0, f64::max);
    let t_large = large_t_probe(params, t_max);
    let mut note = format!("limit probes at t={t_small:.3e} and t={t_large:.3e}");
    match g_eval(params, t_small) {
        Ok(ev) => {
            records.push(CheckRecord::leq(
                "limit_g_over_t_at_0",
                at_t(t_small),
                g_over_t(&ev),
                SMALL_T_THRESHOLD,
            ));
            records.push(CheckRecord::leq(
                "limit_g_prime_at_0",
                at_t(t_small),
                ev.g_prime,
                SMALL_T_THRESHOLD,
            ));
        }
        Err(_) => records.push(CheckRecord::leq(
            "limit_g_over_t_at_0",
            at_t(t_small),
            f64::NAN,
            0.0,
        )),
    }
    match g_eval(params, t_large) {
        Ok(ev) => records.push(CheckRecord::leq(
            "limit_g_over_t_at_infinity",
            at_t(t_large),
            LARGE_T_THRESHOLD,
            g_over_t(&ev),
        )),
        Err(_) => records.push(CheckRecord::leq(
            "limit_g_over_t_at_infinity",
            at_t(t_large),
            f64::NAN,
            0.0,
        )),
    }
    if t_small != SMALL_T_NOMINAL || t_large != LARGE_T_NOMINAL.max(t_max) {
        note.push_str(" (moved from 1e-8 / 1e12 because t^(p-1) varies too slowly there)");
    }
    ReportSection::new("theorem_g", records).with_note(note)
}

/// `224 b ε + a - 2 + b`; negative for admissible subquadratic parameters.
pub fn subquadratic_constant(params: &PQParams) -> f64 {
    224.0 * params.b * params.epsilon + params.a - 2.0 + params.b
}

pub fn check_subquadratic(params: &PQParams, grid: &[f64]) -> Result<ReportSection> {
    if !params.subquadratic {
        return Err(Error::InvalidParams(
            "subquadratic checks need parameters built with the subquadratic flag".into(),
        ));
    }
    let evals = eval_grid(params, grid);
    let constant = subquadratic_constant(params);
    let mut records = vec![CheckRecord::leq(
        "subquadratic_constant_negative",
        "constants".to_string(),
        constant,
        0.0,
    )];
    for (t, ev) in grid.iter().zip(&evals) {
        match ev {
            Some(ev) => {
                let tangent = ev.g_prime / t;
                let g2 = ev.g_double_prime.unwrap_or(f64::NAN);
                records.push(CheckRecord::leq(
                    "second_minus_tangent",
                    at_t(*t),
                    g2 - tangent,
                    0.0,
                ));
                records.push(CheckRecord::leq(
                    "second_minus_tangent_bound",
                    at_t(*t),
                    g2 - tangent,
                    constant * tangent,
                ));
            }
            None => records.push(CheckRecord::leq("g_eval", at_t(*t), f64::NAN, 0.0)),
        }
    }
    for pair in evals.windows(2) {
        if let [Some(lo), Some(hi)] = pair {
            records.push(CheckRecord::leq(
                "tangent_decreasing",
                format!("{}..{}", at_t(lo.t), at_t(hi.t)),
                hi.g_prime / hi.t,
                lo.g_prime / lo.t,
            ));
        }
    }
    Ok(ReportSection::new("subquadratic", records))
}
