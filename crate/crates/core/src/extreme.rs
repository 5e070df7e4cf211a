//! The exponent `α = a + b sin(3π/2 + εL)` as a function of the phase
//! variable `L = ln ln(e + (t-1)^4)`.
//!
//! `α` reaches `a + b` only at `L = π/ε`, i.e. at `t ≈ 1 + exp(exp(π/ε)/4)`,
//! far outside `f64`. Here such radii are described symbolically and every
//! numerical statement is made in `L`, where it is exact.

use crate::error::{Error, Result};
use crate::integrand::PhaseParts;
use crate::params::PQParams;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest `L` for which `exp(L)` and the radius `t(L)` still fit in `f64`.
const NUMERIC_T_PHASE_LIMIT: f64 = 6.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WitnessKind {
    LowerExtreme,
    UpperExtreme,
    Generic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseWitness {
    #[serde(rename = "L")]
    pub phase: f64,
    pub alpha: f64,
    pub t_description: String,
    pub kind: WitnessKind,
}

pub fn phase_of_t(t: f64) -> Result<f64> {
    if t.is_nan() || t <= 1.0 {
        return Err(Error::Domain(format!("phase needs t > 1, got t={t}")));
    }
    Ok(PhaseParts::new(t - 1.0).phase)
}

/// `a + b sin(3π/2 + εL) = a - b cos(εL)`.
pub fn exponent_at_phase(params: &PQParams, phase: f64) -> Result<f64> {
    if phase.is_nan() || phase < 0.0 {
        return Err(Error::Domain(format!(
            "phase L={phase} must be nonnegative"
        )));
    }
    Ok(params.a - params.b * (params.epsilon * phase).cos())
}

/// Smallest `L ≥ 0` with `exponent_at_phase(L) = target`:
/// `L = arccos((a - target)/b) / ε`, the first branch of the inverse.
pub fn phase_for_exponent(params: &PQParams, target: f64) -> Result<f64> {
    let (lo, hi) = (params.lower_exponent(), params.upper_exponent());
    if target.is_nan() || target < lo || target > hi {
        return Err(Error::Domain(format!(
            "exponent {target} outside [{lo}, {hi}]"
        )));
    }
    let cosine = ((params.a - target) / params.b).clamp(-1.0, 1.0);
    Ok(cosine.acos() / params.epsilon)
}

/// Describes the radius with phase `L` without materialising it when it is
/// beyond `f64`: `t - 1 = exp(exp(L)/4) (1 + δ)` with
/// `1 + δ = (1 + e/(t-1)^4)^{-1/4}`, hence `|δ| ≤ e·exp(-exp(L))` once
/// `L ≥ 0.26`.
pub fn describe_radius(phase: f64) -> String {
    if phase == 0.0 {
        return "t = 1 (phase is 3pi/2 on all of [0, 1])".to_string();
    }
    if phase <= NUMERIC_T_PHASE_LIMIT {
        // invert L exactly: (t-1)^4 = exp(exp(L)) - e
        let s = phase.exp().exp() - std::f64::consts::E;
        let t = 1.0 + s.powf(0.25);
        return format!("t = {t:.16e}");
    }
    format!("1 + exp(exp({phase:.6})/4)*(1+delta), |delta| <= e*exp(-exp({phase:.6}))")
}

/// `L = kπ/ε` for `k = 0..=2·cycles`: the exponent alternates between its
/// extremes `a - b` (even `k`) and `a + b` (odd `k`).
pub fn oscillation_witnesses(params: &PQParams, cycles: usize) -> Result<Vec<PhaseWitness>> {
    if cycles == 0 {
        return Err(Error::Domain("need at least one cycle".into()));
    }
    Ok((0..=2 * cycles)
        .map(|k| {
            let phase = k as f64 * PI / params.epsilon;
            let (alpha, kind) = if k % 2 == 0 {
                (params.lower_exponent(), WitnessKind::LowerExtreme)
            } else {
                (params.upper_exponent(), WitnessKind::UpperExtreme)
            };
            PhaseWitness {
                phase,
                alpha,
                t_description: describe_radius(phase),
                kind,
            }
        })
        .collect())
}

/// Generic witness at an arbitrary phase.
pub fn witness_at_phase(params: &PQParams, phase: f64) -> Result<PhaseWitness> {
    Ok(PhaseWitness {
        phase,
        alpha: exponent_at_phase(params, phase)?,
        t_description: describe_radius(phase),
        kind: WitnessKind::Generic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pq26() -> PQParams {
        PQParams::new(2.0, 6.0, Some(0.002), false).unwrap()
    }

    #[test]
    fn phase_values() {
        // ln ln(e + 1)
        assert!((phase_of_t(2.0).unwrap() - 0.272_513_880_502_583_4).abs() < 1e-15);
        assert!(phase_of_t(1.0 + 1e-12).unwrap() < 1e-40);
        assert!((phase_of_t(1e300).unwrap() - 7.924_109_281_024_047).abs() < 1e-13);
        assert!(phase_of_t(1.0).is_err());
    }

    #[test]
    fn exponent_values() {
        let pq = pq26();
        assert_eq!(exponent_at_phase(&pq, 0.0).unwrap(), 2.0);
        assert!((exponent_at_phase(&pq, PI / 0.002).unwrap() - 6.0).abs() < 1e-12);
        assert!((exponent_at_phase(&pq, PI / 0.004).unwrap() - 4.0).abs() < 1e-12);
        assert!(exponent_at_phase(&pq, -1.0).is_err());
    }

    #[test]
    fn inverse_phase() {
        let pq = pq26();
        assert_eq!(phase_for_exponent(&pq, 2.0).unwrap(), 0.0);
        let l = phase_for_exponent(&pq, 6.0).unwrap();
        assert!((l - 1_570.796_326_794_896_6).abs() < 1e-9);
        assert!(phase_for_exponent(&pq, 10.0).is_err());
    }

    #[test]
    fn witnesses() {
        let w = oscillation_witnesses(&pq26(), 1).unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(w[0].kind, WitnessKind::LowerExtreme);
        assert_eq!((w[0].phase, w[0].alpha), (0.0, 2.0));
        assert_eq!(w[1].alpha, 6.0);
        assert!((w[1].phase - 1_570.796_326_794_896_6).abs() < 1e-9);
        assert!(w[1]
            .t_description
            .starts_with("1 + exp(exp(1570.796327)/4)"));
        assert!((w[2].phase - 3_141.592_653_589_793).abs() < 1e-9);
        assert!(oscillation_witnesses(&pq26(), 0).is_err());
    }

    #[test]
    fn small_phase_descriptions_invert() {
        let t = 3.0;
        let l = phase_of_t(t).unwrap();
        let text = describe_radius(l);
        let back: f64 = text.trim_start_matches("t = ").parse().unwrap();
        assert!((back - t).abs() < 1e-12);
    }
}
