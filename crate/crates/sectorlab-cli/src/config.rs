//! TOML run configurations.
//!
//! ```toml
//! command = "density verify"
//! seed = 7
//! threads = 2
//! output = "report.json"
//!
//! [params]
//! C = "151/10"
//! mode = "e2"
//! ```

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::schema::{self, Kind, Presence};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Flag(bool),
    One(String),
    Many(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub params: BTreeMap<String, ParamValue>,
}

/// Every problem found in a configuration file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub problems: Vec<String>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "invalid configuration:")?;
        for p in &self.problems {
            writeln!(f, "  - {p}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

const TOP_KEYS: [&str; 6] = ["command", "seed", "threads", "output", "csv", "params"];

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError { problems: vec![format!("cannot read {}: {e}", path.display())] })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| ConfigError { problems: vec![format!("not valid TOML: {}", e.message())] })?;
    let mut problems = Vec::new();
    for key in table.keys() {
        if !TOP_KEYS.contains(&key.as_str()) {
            problems.push(format!("unknown key {key:?}"));
        }
    }

    let command = match table.get("command") {
        Some(toml::Value::String(s)) => Some(s.split_whitespace().collect::<Vec<_>>().join(" ")),
        Some(_) => {
            problems.push("command: expected a string".into());
            None
        }
        None => {
            problems.push("missing key \"command\"".into());
            None
        }
    };
    let schema = command.as_deref().and_then(|c| {
        let s = schema::find(c);
        if s.is_none() {
            problems.push(format!("command: unknown command {c:?}"));
        }
        s
    });

    let seed = match table.get("seed") {
        None => 0,
        Some(toml::Value::Integer(n)) if *n >= 0 => *n as u64,
        Some(_) => {
            problems.push("seed: expected a non-negative integer".into());
            0
        }
    };
    let threads = match table.get("threads") {
        None => None,
        Some(toml::Value::Integer(n)) if *n >= 1 => Some(*n as usize),
        Some(_) => {
            problems.push("threads: expected a positive integer".into());
            None
        }
    };
    let mut path_key = |key: &str| match table.get(key) {
        None => None,
        Some(toml::Value::String(s)) => Some(PathBuf::from(s)),
        Some(_) => {
            problems.push(format!("{key}: expected a path string"));
            None
        }
    };
    let output = path_key("output");
    let csv = path_key("csv");

    let mut params = BTreeMap::new();
    let raw_params = match table.get("params") {
        None => toml::Table::new(),
        Some(toml::Value::Table(t)) => t.clone(),
        Some(_) => {
            problems.push("params: expected a table".into());
            toml::Table::new()
        }
    };
    if let Some(schema) = &schema {
        for (key, value) in &raw_params {
            let Some(param) = schema.param(key) else {
                problems.push(format!("params.{key}: unknown key for command {:?}", schema.path));
                continue;
            };
            match convert(param.kind, param.list, value) {
                Ok(v) => {
                    let raws: Vec<&String> = match &v {
                        ParamValue::Flag(_) => vec![],
                        ParamValue::One(s) => vec![s],
                        ParamValue::Many(list) => list.iter().collect(),
                    };
                    let mut ok = true;
                    for raw in raws {
                        if let Err(e) = param.check(raw) {
                            problems.push(format!("params.{key}: {e}"));
                            ok = false;
                        }
                    }
                    if ok {
                        params.insert(key.clone(), v);
                    }
                }
                Err(e) => problems.push(format!("params.{key}: {e}")),
            }
        }
        for p in &schema.params {
            if p.presence == Presence::Required && !raw_params.contains_key(p.name) {
                problems.push(format!("params.{}: required by {:?}", p.name, schema.path));
            }
        }
    }

    if !problems.is_empty() {
        return Err(ConfigError { problems });
    }
    Ok(RunConfig { command: command.unwrap_or_default(), seed, threads, output, csv, params })
}

fn scalar(kind: Kind, v: &toml::Value) -> Result<String, String> {
    match v {
        toml::Value::String(s) => Ok(s.clone()),
        toml::Value::Integer(n) => Ok(n.to_string()),
        toml::Value::Float(_) if kind == Kind::Rational => {
            Err("rationals must be written as strings such as \"151/10\" to stay exact".into())
        }
        toml::Value::Float(x) if kind == Kind::Real => Ok(x.to_string()),
        toml::Value::Float(_) => Err(format!("expected {}, got a float", kind.label())),
        other => Err(format!("expected {}, got {}", kind.label(), other.type_str())),
    }
}

fn convert(kind: Kind, list: bool, v: &toml::Value) -> Result<ParamValue, String> {
    if kind == Kind::Flag {
        return match v {
            toml::Value::Boolean(b) => Ok(ParamValue::Flag(*b)),
            _ => Err("expected true or false".into()),
        };
    }
    if list {
        let items = match v {
            toml::Value::Array(a) => a.iter().map(|x| scalar(kind, x)).collect::<Result<Vec<_>, _>>()?,
            toml::Value::String(s) => s.split(',').map(|p| p.trim().to_string()).collect(),
            other => vec![scalar(kind, other)?],
        };
        if items.is_empty() {
            return Err("empty list".into());
        }
        return Ok(ParamValue::Many(items));
    }
    Ok(ParamValue::One(scalar(kind, v)?))
}

impl RunConfig {
    /// The equivalent command line, globals excluded.
    pub fn to_argv(&self) -> Vec<OsString> {
        let mut argv: Vec<OsString> = vec!["sectorlab".into()];
        argv.extend(self.command.split_whitespace().map(OsString::from));
        for (key, value) in &self.params {
            match value {
                ParamValue::Flag(true) => argv.push(format!("--{key}").into()),
                ParamValue::Flag(false) => {}
                ParamValue::One(v) => argv.push(format!("--{key}={v}").into()),
                ParamValue::Many(vs) => argv.push(format!("--{key}={}", vs.join(",")).into()),
            }
        }
        argv
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs serialize")
    }
}
