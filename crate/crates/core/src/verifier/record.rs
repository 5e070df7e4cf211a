use serde::{Deserialize, Serialize};

/// Relative floating-point slack granted to every inequality.
pub const RELATIVE_SLACK: f64 = 1e-12;

/// Outcome of one inequality at one location. `margin` is the signed slack
/// (positive when the inequality holds with room to spare).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check_id: String,
    pub location: String,
    #[serde(with = "crate::report::float_repr")]
    pub lhs: f64,
    #[serde(with = "crate::report::float_repr")]
    pub rhs: f64,
    #[serde(with = "crate::report::float_repr")]
    pub margin: f64,
    pub passed: bool,
}

fn tolerance(lhs: f64, rhs: f64) -> f64 {
    RELATIVE_SLACK * 1f64.max(lhs.abs()).max(rhs.abs())
}

impl CheckRecord {
    fn build(check_id: &str, location: String, lhs: f64, rhs: f64, margin: f64) -> Self {
        let passed = !margin.is_nan() && margin >= -tolerance(lhs, rhs);
        Self {
            check_id: check_id.to_string(),
            location,
            lhs,
            rhs,
            margin,
            passed,
        }
    }

    /// `lhs ≤ rhs` (or `<`; strictness is read off the sign of `margin`).
    pub fn leq(check_id: &str, location: String, lhs: f64, rhs: f64) -> Self {
        Self::build(check_id, location, lhs, rhs, rhs - lhs)
    }

    /// `lower ≤ value ≤ upper`, reported as `lhs = value`, `rhs = upper` with
    /// the smaller of the two slacks as margin.
    pub fn between(check_id: &str, location: String, lower: f64, value: f64, upper: f64) -> Self {
        let margin = (value - lower).min(upper - value);
        Self::build(check_id, location, value, upper, margin)
    }

    /// `lhs = rhs`; the margin is `-|lhs - rhs|`.
    pub fn equal(check_id: &str, location: String, lhs: f64, rhs: f64) -> Self {
        Self::build(check_id, location, lhs, rhs, -(lhs - rhs).abs())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSection {
    pub name: String,
    pub records: Vec<CheckRecord>,
    #[serde(with = "crate::report::float_repr")]
    pub worst_margin: f64,
    pub all_passed: bool,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl ReportSection {
    pub fn new(name: &str, records: Vec<CheckRecord>) -> Self {
        let worst_margin = records
            .iter()
            .map(|r| r.margin)
            .fold(f64::INFINITY, f64::min);
        let all_passed = records.iter().all(|r| r.passed);
        Self {
            name: name.to_string(),
            records,
            worst_margin,
            all_passed,
            notes: Vec::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn records_for<'a>(
        &'a self,
        check_id: &'a str,
    ) -> impl Iterator<Item = &'a CheckRecord> + 'a {
        self.records.iter().filter(move |r| r.check_id == check_id)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.passed)
    }
}

pub(crate) fn at_t(t: f64) -> String {
    format!("t={t:.16e}")
}

pub(crate) fn at_z(z: &[f64]) -> String {
    let parts: Vec<String> = z.iter().map(|v| format!("{v:.16e}")).collect();
    format!("z=[{}]", parts.join(";"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_policy() {
        assert!(CheckRecord::leq("x", String::new(), 1.0, 1.0).passed);
        assert!(CheckRecord::leq("x", String::new(), 1.0 + 1e-13, 1.0).passed);
        assert!(!CheckRecord::leq("x", String::new(), 1.0 + 1e-11, 1.0).passed);
        assert!(CheckRecord::leq("x", String::new(), 1e6 * (1.0 + 1e-13), 1e6).passed);
        assert!(!CheckRecord::leq("x", String::new(), f64::NAN, 1.0).passed);
        let b = CheckRecord::between("x", String::new(), 0.0, 0.25, 1.0);
        assert_eq!(b.margin, 0.25);
        assert!(!CheckRecord::between("x", String::new(), 0.0, -0.5, 1.0).passed);
        assert!(CheckRecord::equal("x", String::new(), 2.0, 2.0).passed);
    }

    #[test]
    fn section_aggregates() {
        let s = ReportSection::new(
            "s",
            vec![
                CheckRecord::leq("a", String::new(), 0.0, 1.0),
                CheckRecord::leq("b", String::new(), 0.0, 0.5),
            ],
        );
        assert_eq!(s.worst_margin, 0.5);
        assert!(s.all_passed);
        let s = ReportSection::new("s", vec![CheckRecord::leq("a", String::new(), 2.0, 1.0)]);
        assert!(!s.all_passed);
        assert_eq!(s.failures().count(), 1);
    }
}
