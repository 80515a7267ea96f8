//! Number formatting, tabular rendering and atomic file output.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::failure::Failure;

/// Significant digits of every emitted float.
pub const SIG_DIGITS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap_or(x)
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().unwrap_or(f64::NAN));
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_value).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

pub fn to_value<T: Serialize>(x: &T) -> Result<Value, Failure> {
    serde_json::to_value(x)
        .map(round_value)
        .map_err(|e| Failure::Internal(e.to_string()))
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(cell).collect::<Vec<_>>().join(";"),
        Value::Object(_) => v.to_string(),
    }
}

/// CSV of a list of flat records; nested values are flattened to one cell.
/// The header comes from the first record's field order.
fn csv_of(rows: &[Map<String, Value>]) -> Result<String, Failure> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    if let Some(first) = rows.first() {
        w.write_record(first.keys())
            .map_err(|e| Failure::Internal(e.to_string()))?;
    }
    for row in rows {
        w.write_record(row.values().map(cell))
            .map_err(|e| Failure::Internal(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Internal(e.to_string()))
}

/// Renders one report (object) or a table (array of objects).
pub fn render(v: &Value, format: Format) -> Result<String, Failure> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(v).map_err(|e| Failure::Internal(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let rows = match v {
                Value::Array(items) => items.clone(),
                other => vec![other.clone()],
            };
            let rows = rows
                .into_iter()
                .map(|r| match r {
                    Value::Object(m) => Ok(m),
                    other => {
                        let mut m = Map::new();
                        m.insert("value".into(), other);
                        Ok(m)
                    }
                })
                .collect::<Result<Vec<_>, Failure>>()?;
            csv_of(&rows)
        }
    }
}

/// Writes to `path` through a sibling temporary file so a failed run never
/// leaves partial output; without a path, writes to stdout.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), Failure> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        return out
            .write_all(text.as_bytes())
            .and_then(|_| out.flush())
            .map_err(|e| Failure::Io(e.to_string()));
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    tmp.write_all(text.as_bytes()).map_err(|e| Failure::Io(e.to_string()))?;
    tmp.persist(path)
        .map_err(|e| Failure::Io(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}
