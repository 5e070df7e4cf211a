//! Parameters of the oscillating-exponent integrand.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Fraction of the admissible upper bound used when no `epsilon` is supplied.
pub const DEFAULT_EPSILON_FRACTION: f64 = 0.9;

/// Growth exponents `p < q`, their midpoint `a` and half-width `b`, and the
/// phase speed `epsilon` of the exponent oscillation.
///
/// Construct through [`PQParams::new`]; the fields are public for reading but
/// hand-built values skip validation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PQParams {
    pub p: f64,
    pub q: f64,
    pub a: f64,
    pub b: f64,
    pub epsilon: f64,
    pub subquadratic: bool,
}

impl PQParams {
    /// Validates `(p, q)`, and either validates `epsilon` against its open
    /// bound or picks `0.9 ×` that bound.
    pub fn new(p: f64, q: f64, epsilon: Option<f64>, subquadratic: bool) -> Result<Self> {
        if !(p.is_finite() && q.is_finite()) {
            return Err(Error::InvalidParams(format!("p={p}, q={q} must be finite")));
        }
        if p <= 1.0 {
            return Err(Error::InvalidParams(format!("p={p} must exceed 1")));
        }
        if q <= p {
            return Err(Error::InvalidParams(format!("q={q} must exceed p={p}")));
        }
        if subquadratic && q >= 2.0 {
            return Err(Error::InvalidParams(format!(
                "subquadratic regime requires q < 2, got q={q}"
            )));
        }
        let a = 0.5 * (p + q);
        let b = 0.5 * (q - p);
        let bound = epsilon_upper_bound(a, b, subquadratic);
        let epsilon = match epsilon {
            Some(eps) => {
                if !(eps > 0.0 && eps < bound) {
                    return Err(Error::InvalidParams(format!(
                        "epsilon={eps} outside the open interval (0, {bound:.17e})"
                    )));
                }
                eps
            }
            None => DEFAULT_EPSILON_FRACTION * bound,
        };
        Ok(Self {
            p,
            q,
            a,
            b,
            epsilon,
            subquadratic,
        })
    }

    /// Supremum of admissible `epsilon` for these exponents.
    pub fn epsilon_bound(&self) -> f64 {
        epsilon_upper_bound(self.a, self.b, self.subquadratic)
    }

    /// Lower growth exponent `a - b` (equal to `p` up to rounding).
    pub fn lower_exponent(&self) -> f64 {
        self.a - self.b
    }

    /// Upper growth exponent `a + b`.
    pub fn upper_exponent(&self) -> f64 {
        self.a + self.b
    }
}

/// `min{1, (a-1-b)/(224 b)}`, further capped by `(2-a-b)/(224 b)` in the
/// subquadratic regime.
pub fn epsilon_upper_bound(a: f64, b: f64, subquadratic: bool) -> f64 {
    let mut bound = f64::min(1.0, (a - 1.0 - b) / (224.0 * b));
    if subquadratic {
        bound = bound.min((2.0 - a - b) / (224.0 * b));
    }
    bound
}
