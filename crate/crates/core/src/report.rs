//! CSV and JSON emission. Reals are written with 17 significant digits so
//! every `f64` round-trips exactly.

use crate::error::{Error, Result};
use crate::verifier::ReportSection;
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

pub const REPORT_CSV_HEADER: [&str; 7] = [
    "section", "check_id", "location", "lhs", "rhs", "margin", "passed",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Report(format!("unknown format '{other}'"))),
        }
    }
}

/// `f64` with 17 significant digits; `inf`, `-inf` and `NaN` spelled out.
pub fn fmt_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// Serde adapter writing finite floats as JSON numbers and non-finite ones
/// as strings, so records with infinite margins survive a round trip.
pub mod float_repr {
    use serde::de::{self, Deserializer, Visitor};
    use serde::Serializer;
    use std::fmt;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_str(&super::fmt_real(*x))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        struct FloatVisitor;
        impl Visitor<'_> for FloatVisitor {
            type Value = f64;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or one of \"inf\", \"-inf\", \"NaN\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
                Ok(v)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
                match v {
                    "inf" => Ok(f64::INFINITY),
                    "-inf" => Ok(f64::NEG_INFINITY),
                    "NaN" => Ok(f64::NAN),
                    other => Err(E::custom(format!("unexpected float string '{other}'"))),
                }
            }
        }
        d.deserialize_any(FloatVisitor)
    }
}

pub fn report_to_csv(sections: &[ReportSection], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Report(e.to_string());
    w.write_record(REPORT_CSV_HEADER).map_err(io)?;
    for s in sections {
        for r in &s.records {
            w.write_record([
                s.name.as_str(),
                r.check_id.as_str(),
                r.location.as_str(),
                &fmt_real(r.lhs),
                &fmt_real(r.rhs),
                &fmt_real(r.margin),
                if r.passed { "true" } else { "false" },
            ])
            .map_err(io)?;
        }
    }
    w.flush().map_err(|e| Error::Report(e.to_string()))
}

pub fn report_to_json(sections: &[ReportSection]) -> Result<String> {
    serde_json::to_string_pretty(sections).map_err(|e| Error::Report(e.to_string()))
}

pub fn report_from_json(text: &str) -> Result<Vec<ReportSection>> {
    serde_json::from_str(text).map_err(|e| Error::Report(e.to_string()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Report(format!("cannot write {}: {e}", path.display())))
}

pub fn write_report(sections: &[ReportSection], format: Format, path: &Path) -> Result<()> {
    if sections.is_empty() {
        return Err(Error::Report("no sections to write".into()));
    }
    let mut file = create(path)?;
    match format {
        Format::Csv => report_to_csv(sections, &mut file)?,
        Format::Json => {
            let text = report_to_json(sections)?;
            file.write_all(text.as_bytes())
                .map_err(|e| Error::Report(e.to_string()))?;
        }
    }
    file.flush().map_err(|e| Error::Report(e.to_string()))
}

/// Header plus rows of reals, written as CSV.
pub fn write_table(header: &[&str], rows: &[Vec<f64>], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Report(e.to_string());
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row.iter().map(|x| fmt_real(*x)))
            .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Report(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verifier::CheckRecord;

    fn one_section() -> Vec<ReportSection> {
        vec![ReportSection::new(
            "lemmas",
            vec![CheckRecord::leq("ratio_cubic", "t=2".into(), 0.25, 1.0)],
        )]
    }

    #[test]
    fn csv_has_header_and_one_row() {
        let mut buf = Vec::new();
        report_to_csv(&one_section(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "section,check_id,location,lhs,rhs,margin,passed");
        assert!(lines[1].starts_with("lemmas,ratio_cubic,t=2,2.5000000000000000e-1,"));
        assert!(lines[1].ends_with(",true"));
    }

    #[test]
    fn json_round_trip_with_infinities() {
        let mut sections = one_section();
        sections[0]
            .records
            .push(CheckRecord::leq("x", "t=1e300".into(), 1.0, f64::INFINITY));
        sections[0]
            .records
            .push(CheckRecord::leq("y", "t=3".into(), 0.1 + 0.2, 1.0 / 3.0));
        let text = report_to_json(&sections).unwrap();
        assert_eq!(report_from_json(&text).unwrap(), sections);
    }

    #[test]
    fn empty_sections_rejected() {
        let dir = tempfile::tempdir().unwrap();
        assert!(write_report(&[], Format::Csv, &dir.path().join("r.csv")).is_err());
    }

    #[test]
    fn seventeen_digits() {
        let x = 0.1 + 0.2;
        assert_eq!(fmt_real(x).parse::<f64>().unwrap(), x);
        assert_eq!(fmt_real(f64::NEG_INFINITY), "-inf");
    }
}
