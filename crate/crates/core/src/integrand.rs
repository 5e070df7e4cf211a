//! Evaluation of the phase `φ`, the integrand profile `g(t) = t^{a + b sin φ(t)}`
//! and their first two derivatives.
//!
//! For `t > 1` the phase is `φ(t) = 3π/2 + ε L(t)` with
//! `L(t) = ln ln(e + (t-1)^4)`. Every quantity here is evaluated from
//! `d = t - 1` directly so that neither the region `t → 1⁺` nor the region
//! where `(t-1)^4` overflows loses accuracy. The trigonometric factors use
//! `sin φ = -cos(εL)` and `cos φ = sin(εL)`, which avoids rounding the
//! `3π/2` offset into the argument.

use crate::error::{Error, Result};
use crate::params::PQParams;
use serde::{Deserialize, Serialize};
use std::f64::consts::{E, PI};

pub const THREE_HALVES_PI: f64 = 1.5 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiEvaluation {
    pub t: f64,
    pub phi: f64,
    pub phi_prime: f64,
    pub phi_double_prime: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// `t <= 1`: `g(t) = t^{a-b}` exactly.
    PowerLaw,
    /// `t > 1`: the exponent drifts with the phase.
    Oscillating,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GEvaluation {
    pub t: f64,
    pub alpha: f64,
    pub g: f64,
    /// `α ln t`; finite even where `g` overflows.
    pub ln_g: f64,
    pub g_prime: f64,
    /// `None` at `t = 0`, where the limit depends on whether `a - b` exceeds 2.
    pub g_double_prime: Option<f64>,
    pub branch: Branch,
}

/// Lemma factors on `(1, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiFactors {
    pub t: f64,
    /// `φ'(t) t ln t`
    pub f1: f64,
    /// `φ'(t) t`
    pub f2: f64,
    /// `|φ''(t)| t² ln t`
    pub f3: f64,
}

/// Decomposition `g''(t) t = g'(t) Φ₁(t) + (g(t)/t) Φ₂(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BigPhi {
    pub t: f64,
    pub phi1: f64,
    pub phi2: f64,
}

/// Building blocks of `φ` on `t > 1`, all expressed through `d = t - 1`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PhaseParts {
    /// `ln(e + d⁴)`
    pub log_base: f64,
    /// `L = ln ln(e + d⁴)`
    pub phase: f64,
    /// `4 d³ / (e + d⁴)`
    pub ratio: f64,
    /// `(12 d² e - 4 d⁶) / (e + d⁴)²`
    pub curvature: f64,
}

impl PhaseParts {
    pub(crate) fn new(d: f64) -> Self {
        debug_assert!(d > 0.0);
        if d < 1.0 {
            let s = d.powi(4);
            let base = E + s;
            let log_base_m1 = (s / E).ln_1p();
            let d2 = d * d;
            Self {
                log_base: 1.0 + log_base_m1,
                phase: log_base_m1.ln_1p(),
                ratio: 4.0 * d2 * d / base,
                curvature: (12.0 * d2 * E - 4.0 * d2 * d2 * d2) / (base * base),
            }
        } else {
            // divide through by d⁴ (resp. d⁸) so nothing overflows
            let inv = E / d.powi(4);
            let log_base = 4.0 * d.ln() + inv.ln_1p();
            let one_plus = 1.0 + inv;
            Self {
                log_base,
                phase: log_base.ln(),
                ratio: 4.0 / (d * one_plus),
                curvature: (12.0 * E / d.powi(6) - 4.0 / (d * d)) / (one_plus * one_plus),
            }
        }
    }

    pub(crate) fn phi_prime(&self, epsilon: f64) -> f64 {
        epsilon * self.ratio / self.log_base
    }

    pub(crate) fn phi_double_prime(&self, epsilon: f64) -> f64 {
        let lb = self.log_base;
        epsilon * (-(self.ratio * self.ratio) / (lb * lb) + self.curvature / lb)
    }
}

/// `ln t` for `t = 1 + d`, accurate as `d → 0`.
fn ln_from_offset(t: f64, d: f64) -> f64 {
    if t < 2.0 {
        d.ln_1p()
    } else {
        t.ln()
    }
}

fn check_nonnegative(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::Domain(format!("t={t} must be nonnegative")));
    }
    Ok(())
}

pub fn phi_eval(params: &PQParams, t: f64) -> Result<PhiEvaluation> {
    check_nonnegative(t)?;
    if t <= 1.0 {
        return Ok(PhiEvaluation {
            t,
            phi: THREE_HALVES_PI,
            phi_prime: 0.0,
            phi_double_prime: 0.0,
        });
    }
    let parts = PhaseParts::new(t - 1.0);
    Ok(PhiEvaluation {
        t,
        phi: THREE_HALVES_PI + params.epsilon * parts.phase,
        phi_prime: parts.phi_prime(params.epsilon),
        phi_double_prime: parts.phi_double_prime(params.epsilon),
    })
}

/// Everything needed for `g`, `g'`, `g''` at one `t > 1`.
struct OscillatingState {
    ln_t: f64,
    sin_phi: f64,
    cos_phi: f64,
    phi_prime: f64,
    phi_double_prime: f64,
    alpha: f64,
}

impl OscillatingState {
    fn new(params: &PQParams, t: f64) -> Self {
        let d = t - 1.0;
        let parts = PhaseParts::new(d);
        let shift = params.epsilon * parts.phase;
        let sin_phi = -shift.cos();
        Self {
            ln_t: ln_from_offset(t, d),
            sin_phi,
            cos_phi: shift.sin(),
            phi_prime: parts.phi_prime(params.epsilon),
            phi_double_prime: parts.phi_double_prime(params.epsilon),
            alpha: params.a + params.b * sin_phi,
        }
    }

    fn factors(&self, t: f64) -> (f64, f64, f64) {
        let f2 = self.phi_prime * t;
        let f1 = f2 * self.ln_t;
        let f3_signed = self.phi_double_prime * t * t * self.ln_t;
        (f1, f2, f3_signed)
    }

    fn big_phi(&self, params: &PQParams, t: f64) -> (f64, f64) {
        let b = params.b;
        let (f1, f2, f3_signed) = self.factors(t);
        let phi1 = b * self.cos_phi * f1 + params.a - 1.0 + b * self.sin_phi;
        let phi2 =
            -b * self.sin_phi * f2 * f1 + b * self.cos_phi * (f3_signed + f2 * (self.ln_t + 2.0));
        (phi1, phi2)
    }
}

/// `g`, `g'` and `g''` at `t >= 0`. `g''` is taken from the `Φ₁/Φ₂`
/// identity; [`g_double_prime_direct`] expands it term by term instead.
pub fn g_eval(params: &PQParams, t: f64) -> Result<GEvaluation> {
    check_nonnegative(t)?;
    let low = params.lower_exponent();
    if t == 0.0 {
        return Ok(GEvaluation {
            t,
            alpha: low,
            g: 0.0,
            ln_g: f64::NEG_INFINITY,
            g_prime: 0.0,
            g_double_prime: None,
            branch: Branch::PowerLaw,
        });
    }
    if t <= 1.0 {
        let ln_t = t.ln();
        return Ok(GEvaluation {
            t,
            alpha: low,
            g: t.powf(low),
            ln_g: low * ln_t,
            g_prime: low * t.powf(low - 1.0),
            g_double_prime: Some(low * (low - 1.0) * t.powf(low - 2.0)),
            branch: Branch::PowerLaw,
        });
    }
    let st = OscillatingState::new(params, t);
    let ln_g = st.alpha * st.ln_t;
    let g = ln_g.exp();
    let g_over_t = (ln_g - st.ln_t).exp();
    let (f1, _, _) = st.factors(t);
    let g_prime = g_over_t * (params.b * st.cos_phi * f1 + st.alpha);
    let (phi1, phi2) = st.big_phi(params, t);
    let g_double_prime = (g_prime * phi1 + g_over_t * phi2) / t;
    Ok(GEvaluation {
        t,
        alpha: st.alpha,
        g,
        ln_g,
        g_prime,
        g_double_prime: Some(g_double_prime),
        branch: Branch::Oscillating,
    })
}

/// `g''(t)` from the unsimplified product-rule expansion of `g'`.
/// Independent of [`big_phi`]; used to cross-check [`g_eval`].
pub fn g_double_prime_direct(params: &PQParams, t: f64) -> Result<f64> {
    if t.is_nan() || t <= 0.0 {
        return Err(Error::Domain(format!("t={t} must be positive")));
    }
    let ev = g_eval(params, t)?;
    if t <= 1.0 {
        return Ok(ev.g_double_prime.unwrap_or(f64::NAN));
    }
    let phi = phi_eval(params, t)?;
    let b = params.b;
    let (sin_phi, cos_phi) = phi.phi.sin_cos();
    let alpha = params.a + b * sin_phi;
    let ln_t = t.ln();
    let (g, g1) = (ev.g, ev.g_prime);
    let (p1, p2) = (phi.phi_prime, phi.phi_double_prime);
    let bracket = b * cos_phi * p1 * t * ln_t + alpha;
    let bracket_prime = -b * sin_phi * p1 * p1 * t * ln_t
        + b * cos_phi * (p2 * t * ln_t + p1 * (ln_t + 1.0))
        + b * cos_phi * p1;
    Ok((g1 * t - g) / (t * t) * bracket + g / t * bracket_prime)
}

pub fn phi_factors(params: &PQParams, t: f64) -> Result<PhiFactors> {
    if t.is_nan() || t <= 1.0 {
        return Err(Error::Domain(format!("phi factors need t > 1, got t={t}")));
    }
    let st = OscillatingState::new(params, t);
    let (f1, f2, f3_signed) = st.factors(t);
    Ok(PhiFactors {
        t,
        f1,
        f2,
        f3: f3_signed.abs(),
    })
}

pub fn big_phi(params: &PQParams, t: f64) -> Result<BigPhi> {
    if t.is_nan() || t <= 0.0 {
        return Err(Error::Domain(format!("t={t} must be positive")));
    }
    if t <= 1.0 {
        return Ok(BigPhi {
            t,
            phi1: params.a - 1.0 - params.b,
            phi2: 0.0,
        });
    }
    let st = OscillatingState::new(params, t);
    let (phi1, phi2) = st.big_phi(params, t);
    Ok(BigPhi { t, phi1, phi2 })
}
