use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{Map, Value};

pub const FORMAT_VERSION: u32 = 1;

/// Wraps a payload with the format version and resolved config. Payload
/// fields are merged into the top-level object.
pub fn artifact<T: Serialize>(kind: &str, config: &Value, payload: &T) -> Result<Value> {
    let mut obj = Map::new();
    obj.insert("format_version".into(), FORMAT_VERSION.into());
    obj.insert("artifact".into(), kind.into());
    obj.insert("config".into(), config.clone());
    match serde_json::to_value(payload)? {
        Value::Object(fields) => {
            for (k, v) in fields {
                obj.insert(k, v);
            }
        }
        other => {
            obj.insert("data".into(), other);
        }
    }
    Ok(Value::Object(obj))
}

pub fn to_pretty(value: &Value) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, to_pretty(value)?).with_context(|| format!("writing {}", path.display()))
}

/// Writes to `path`, or stdout when no path is given.
pub fn emit(path: Option<&Path>, value: &Value) -> Result<()> {
    match path {
        Some(p) => write_json(p, value),
        None => {
            print!("{}", to_pretty(value)?);
            Ok(())
        }
    }
}

pub fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}
