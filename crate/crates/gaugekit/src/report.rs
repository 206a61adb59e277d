//! Machine-readable key/value reports.
//!
//! One `key = value` pair per line, written in insertion order so output is
//! byte-identical across runs with fixed seeds. Floats are printed in their
//! shortest round-trip form and the document parses back into itself.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub enum ReportValue {
    Str(String),
    Num(f64),
    Int(i64),
    Bool(bool),
}

impl std::fmt::Display for ReportValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReportValue::Str(s) => write!(f, "\"{s}\""),
            ReportValue::Num(v) => write!(f, "{v:?}"),
            ReportValue::Int(v) => write!(f, "{v}"),
            ReportValue::Bool(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReportParseError {
    #[error("line {line}: missing ' = ' separator")]
    MissingSeparator { line: usize },
    #[error("line {line}: unterminated string")]
    UnterminatedString { line: usize },
    #[error("line {line}: unparsable value `{value}`")]
    BadValue { line: usize, value: String },
}

/// Ordered key/value document.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub entries: Vec<(String, ReportValue)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_str(&mut self, key: &str, value: impl Into<String>) {
        let value: String = value.into();
        debug_assert!(!value.contains('"') && !value.contains('\n'));
        self.entries
            .push((key.to_string(), ReportValue::Str(value)));
    }

    pub fn push_num(&mut self, key: &str, value: f64) {
        self.entries.push((key.to_string(), ReportValue::Num(value)));
    }

    pub fn push_int(&mut self, key: &str, value: i64) {
        self.entries.push((key.to_string(), ReportValue::Int(value)));
    }

    pub fn push_bool(&mut self, key: &str, value: bool) {
        self.entries
            .push((key.to_string(), ReportValue::Bool(value)));
    }

    pub fn get(&self, key: &str) -> Option<&ReportValue> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn get_num(&self, key: &str) -> Option<f64> {
        match self.get(key) {
            Some(ReportValue::Num(v)) => Some(*v),
            Some(ReportValue::Int(v)) => Some(*v as f64),
            _ => None,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v.to_string());
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Report, ReportParseError> {
        let mut report = Report::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let Some((key, value)) = trimmed.split_once(" = ") else {
                return Err(ReportParseError::MissingSeparator { line });
            };
            let key = key.trim().to_string();
            let value = value.trim();
            let parsed = if let Some(stripped) = value.strip_prefix('"') {
                let Some(inner) = stripped.strip_suffix('"') else {
                    return Err(ReportParseError::UnterminatedString { line });
                };
                ReportValue::Str(inner.to_string())
            } else if value == "true" || value == "false" {
                ReportValue::Bool(value == "true")
            } else if let Ok(i) = value.parse::<i64>() {
                ReportValue::Int(i)
            } else if let Some(f) = parse_float(value) {
                ReportValue::Num(f)
            } else {
                return Err(ReportParseError::BadValue {
                    line,
                    value: value.to_string(),
                });
            };
            report.entries.push((key, parsed));
        }
        Ok(report)
    }
}

fn parse_float(s: &str) -> Option<f64> {
    match s {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        "NaN" => Some(f64::NAN),
        _ => s.parse::<f64>().ok(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_through_its_own_parser() {
        let mut r = Report::new();
        r.push_str("kind", "solve");
        r.push_num("primal_value", 7.0 - std::f64::consts::SQRT_2);
        r.push_num("dual_value", 1.0 / 3.0);
        r.push_num("residual", 0.0);
        r.push_num("gap", f64::INFINITY);
        r.push_int("iterations", 512);
        r.push_bool("stalled", false);
        let text = r.to_text();
        let back = Report::parse(&text).unwrap();
        assert_eq!(r, back);
        // byte-identical re-serialization
        assert_eq!(text, back.to_text());
    }

    #[test]
    fn parse_errors_are_line_anchored() {
        let err = Report::parse("a = 1\nbroken line\n").unwrap_err();
        assert_eq!(err, ReportParseError::MissingSeparator { line: 2 });
        let err = Report::parse("a = \"unterminated\n").unwrap_err();
        assert_eq!(err, ReportParseError::UnterminatedString { line: 1 });
    }
}
