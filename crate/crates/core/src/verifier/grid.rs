use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Log-uniform sample grid with optional clustering around `t = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleGridSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub count_log: usize,
    /// Adds `1 ± 10^{-k}` for `k = 1..=boundary_refine`.
    pub boundary_refine: u32,
    pub seed: u64,
}

impl Default for SampleGridSpec {
    fn default() -> Self {
        Self {
            t_min: 1e-6,
            t_max: 1e12,
            count_log: 400,
            boundary_refine: 8,
            seed: 0,
        }
    }
}

impl SampleGridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_min.is_finite() && self.t_max.is_finite()) {
            return Err(Error::InvalidGrid("grid bounds must be finite".into()));
        }
        if !(self.t_min > 0.0 && self.t_min < 1.0 && 1.0 < self.t_max) {
            return Err(Error::InvalidGrid(format!(
                "need 0 < t_min < 1 < t_max, got t_min={}, t_max={}",
                self.t_min, self.t_max
            )));
        }
        if self.count_log < 2 {
            return Err(Error::InvalidGrid(format!(
                "count_log={} must be at least 2",
                self.count_log
            )));
        }
        Ok(())
    }
}

/// Sorted, deduplicated union of the log-uniform points and the boundary
/// refinement points that fall strictly inside `(t_min, t_max)`.
pub fn sample_grid(spec: &SampleGridSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let (lo, hi) = (spec.t_min.log10(), spec.t_max.log10());
    let last = spec.count_log - 1;
    let mut points: Vec<f64> = (0..spec.count_log)
        .map(|k| match k {
            0 => spec.t_min,
            k if k == last => spec.t_max,
            k => 10f64.powf(lo + (hi - lo) * k as f64 / last as f64),
        })
        .collect();
    for k in 1..=spec.boundary_refine {
        let offset = 10f64.powi(-(k as i32));
        for t in [1.0 - offset, 1.0 + offset] {
            if t > spec.t_min && t < spec.t_max {
                points.push(t);
            }
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup();
    Ok(points)
}
