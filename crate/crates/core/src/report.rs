//! Deterministic CSV/JSON emission and artifact manifests.
//!
//! Floats are written with 17 significant digits so every value round-trips.
//! Non-finite floats become `null` in JSON and `NaN`/`inf`/`-inf` in CSV.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("no records to emit")]
    Empty,
    #[error("record {index} has a different schema than record 0")]
    SchemaMismatch { index: usize },
    #[error("field `{0}` is not a scalar and cannot go in a CSV column")]
    NotScalar(String),
    #[error("serialization: {0}")]
    Serialize(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// `x` with 17 significant digits in exponent form.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn to_values<R: Serialize>(records: &[R]) -> Result<Vec<Value>, ReportError> {
    if records.is_empty() {
        return Err(ReportError::Empty);
    }
    let values: Vec<Value> = records
        .iter()
        .map(serde_json::to_value)
        .collect::<Result<_, _>>()?;
    let keys = |v: &Value| v.as_object().map(|m| m.keys().cloned().collect::<Vec<_>>());
    let first = keys(&values[0]);
    for (index, v) in values.iter().enumerate().skip(1) {
        if keys(v) != first {
            return Err(ReportError::SchemaMismatch { index });
        }
    }
    Ok(values)
}

/// Serialize homogeneous records; CSV needs flat records of scalars.
pub fn emit<R: Serialize>(records: &[R], format: Format) -> Result<String, ReportError> {
    let values = to_values(records)?;
    match format {
        Format::Json => {
            let mut out = String::new();
            write_json(&Value::Array(values), &mut out);
            out.push('\n');
            Ok(out)
        }
        Format::Csv => {
            let mut out = String::new();
            match &values[0] {
                Value::Object(m) => out.push_str(&m.keys().cloned().collect::<Vec<_>>().join(",")),
                _ => out.push_str("value"),
            }
            out.push('\n');
            for v in &values {
                let cells: Vec<String> = match v {
                    Value::Object(m) => m
                        .iter()
                        .map(|(k, x)| csv_cell(x).ok_or_else(|| ReportError::NotScalar(k.clone())))
                        .collect::<Result<_, _>>()?,
                    other => {
                        vec![csv_cell(other)
                            .ok_or_else(|| ReportError::NotScalar("value".into()))?]
                    }
                };
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            Ok(out)
        }
    }
}

fn number_text(n: &serde_json::Number) -> String {
    if n.is_f64() {
        fmt_f64(n.as_f64().unwrap_or(f64::NAN))
    } else {
        n.to_string()
    }
}

fn csv_cell(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("NaN".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(number_text(n)),
        Value::String(s) if s.contains([',', '"', '\n']) => {
            Some(format!("\"{}\"", s.replace('"', "\"\"")))
        }
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn write_json(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => out.push_str(&number_text(n)),
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(a) => {
            out.push('[');
            for (i, x) in a.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str("\n  ");
                write_json(x, out);
            }
            if !a.is_empty() {
                out.push('\n');
            }
            out.push(']');
        }
        Value::Object(m) => {
            out.push('{');
            for (i, (k, x)) in m.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{}: ", Value::String(k.clone()));
                write_json(x, out);
            }
            out.push('}');
        }
    }
}

/// One emitted file and its SHA-256.
#[derive(Debug, Clone, Serialize)]
pub struct ManifestEntry {
    pub file: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Writes artifacts into a directory and records them in `manifest.json`.
#[derive(Debug)]
pub struct ArtifactWriter {
    dir: PathBuf,
    entries: Vec<ManifestEntry>,
}

impl ArtifactWriter {
    pub fn new(dir: impl AsRef<Path>) -> Result<Self, ReportError> {
        let dir = dir.as_ref().to_path_buf();
        std::fs::create_dir_all(&dir).map_err(|source| ReportError::Io {
            path: dir.clone(),
            source,
        })?;
        Ok(Self {
            dir,
            entries: vec![],
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf, ReportError> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).map_err(|source| ReportError::Io {
            path: path.clone(),
            source,
        })?;
        self.entries.retain(|e| e.file != name);
        self.entries.push(ManifestEntry {
            file: name.to_string(),
            bytes: bytes.len() as u64,
            sha256: hex::encode(Sha256::digest(bytes)),
        });
        Ok(path)
    }

    pub fn write_records<R: Serialize>(
        &mut self,
        stem: &str,
        records: &[R],
        format: Format,
    ) -> Result<PathBuf, ReportError> {
        let text = emit(records, format)?;
        self.write(&format!("{stem}.{}", format.extension()), text.as_bytes())
    }

    /// Write one record as a JSON object with the same float formatting as [`emit`].
    pub fn write_object<R: Serialize>(
        &mut self,
        stem: &str,
        record: &R,
    ) -> Result<PathBuf, ReportError> {
        let mut text = String::new();
        write_json(&serde_json::to_value(record)?, &mut text);
        text.push('\n');
        self.write(&format!("{stem}.json"), text.as_bytes())
    }

    pub fn entries(&self) -> &[ManifestEntry] {
        &self.entries
    }

    /// Write `manifest.json` listing every artifact in name order.
    pub fn finish(mut self) -> Result<PathBuf, ReportError> {
        self.entries.sort_by(|a, b| a.file.cmp(&b.file));
        let mut text = String::new();
        write_json(&serde_json::to_value(&self.entries)?, &mut text);
        text.push('\n');
        let path = self.dir.join("manifest.json");
        std::fs::write(&path, text).map_err(|source| ReportError::Io {
            path: path.clone(),
            source,
        })?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        t: f64,
        name: &'static str,
        n: u32,
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        let x = std::f64::consts::PI;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn csv_header_and_row() {
        let out = emit(
            &[Row {
                t: 1.5,
                name: "a",
                n: 3,
            }],
            Format::Csv,
        )
        .unwrap();
        assert_eq!(out, "t,name,n\n1.5000000000000000e0,a,3\n");
    }

    #[test]
    fn empty_is_error() {
        assert!(matches!(
            emit::<Row>(&[], Format::Json),
            Err(ReportError::Empty)
        ));
    }

    #[test]
    fn schema_mismatch() {
        let recs = vec![serde_json::json!({"a": 1.0}), serde_json::json!({"b": 1.0})];
        assert!(matches!(
            emit(&recs, Format::Csv),
            Err(ReportError::SchemaMismatch { index: 1 })
        ));
    }

    #[test]
    fn nested_not_allowed_in_csv() {
        let recs = vec![serde_json::json!({"a": {"b": 1}})];
        assert!(matches!(
            emit(&recs, Format::Csv),
            Err(ReportError::NotScalar(_))
        ));
        assert!(emit(&recs, Format::Json).is_ok());
    }

    #[test]
    fn json_parses_back() {
        let rows: Vec<Row> = (0..5)
            .map(|i| Row {
                t: 1.0 / (i as f64 + 3.0),
                name: "x",
                n: i,
            })
            .collect();
        let text = emit(&rows, Format::Json).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(v[i]["t"].as_f64().unwrap(), r.t);
        }
    }
}
