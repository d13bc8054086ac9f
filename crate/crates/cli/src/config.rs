//! Run configuration: defaults, then the JSON config file, then flags.
//!
//! A config file is one JSON object. Top-level `seed`, `task` and `basis`
//! apply to every command; a nested object named after the command (e.g.
//! `"split": {...}`) holds that command's keys. Flags given on the command
//! line win over both.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

pub const GLOBAL_KEYS: [&str; 3] = ["seed", "task", "basis"];

/// Flag values that were actually given, keyed by config field name.
#[derive(Debug, Default)]
pub struct Flags(Map<String, Value>);

impl Flags {
    pub fn set<T: Serialize>(&mut self, key: &str, value: &Option<T>) -> &mut Self {
        if let Some(v) = value {
            self.0.insert(key.to_string(), serde_json::to_value(v).expect("flag values serialize"));
        }
        self
    }

    /// Boolean switches only ever turn a setting on.
    pub fn switch(&mut self, key: &str, on: bool) -> &mut Self {
        if on {
            self.0.insert(key.to_string(), Value::Bool(true));
        }
        self
    }
}

pub fn read_config_file(path: &Path) -> Result<Map<String, Value>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    match serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))? {
        Value::Object(m) => Ok(m),
        _ => bail!("config {} must be a JSON object", path.display()),
    }
}

fn overlay(base: &mut Map<String, Value>, top: &Map<String, Value>, what: &str) -> Result<()> {
    for (k, v) in top {
        if !base.contains_key(k) {
            bail!("unknown setting {k:?} in {what}");
        }
        base.insert(k.clone(), v.clone());
    }
    Ok(())
}

/// Resolves the settings of `command` into `T`. Returns the typed config and
/// its canonical JSON form for echoing into artifacts.
pub fn resolve<T>(command: &str, file: Option<&Map<String, Value>>, globals: &Flags, flags: &Flags) -> Result<(T, Value)>
where
    T: Default + Serialize + DeserializeOwned,
{
    let Value::Object(mut merged) = serde_json::to_value(T::default())? else {
        unreachable!("configs are structs");
    };
    if let Some(file) = file {
        for (k, v) in file {
            if GLOBAL_KEYS.contains(&k.as_str()) {
                if merged.contains_key(k) {
                    merged.insert(k.clone(), v.clone());
                }
            } else if k == command {
                let Value::Object(section) = v else {
                    bail!("config section {command:?} must be an object");
                };
                overlay(&mut merged, section, &format!("config section {command:?}"))?;
            } else if !is_command(k) {
                bail!("unknown top-level config key {k:?}");
            }
        }
    }
    for (k, v) in &globals.0 {
        if merged.contains_key(k) {
            merged.insert(k.clone(), v.clone());
        }
    }
    overlay(&mut merged, &flags.0, "flags")?;
    let value = Value::Object(merged);
    let typed: T = serde_json::from_value(value).with_context(|| format!("invalid {command} settings"))?;
    let canonical = serde_json::to_value(&typed)?;
    Ok((typed, canonical))
}

fn is_command(k: &str) -> bool {
    matches!(k, "analyze" | "cluster" | "split" | "eval" | "report")
}

pub fn require<'a>(value: &'a Option<PathBuf>, name: &str) -> Result<&'a PathBuf> {
    value
        .as_ref()
        .with_context(|| format!("missing required setting {name:?} (flag --{})", name.replace('_', "-")))
}
