//! Run reports and CSV tables, both written atomically.

use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::RunConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckLine {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl CheckLine {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        CheckLine { name: name.into(), pass, detail: detail.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub results: Value,
    pub checks: Vec<CheckLine>,
    pub passed: bool,
    pub wall_time_seconds: f64,
}

/// Timing fields, which are the only part of a report allowed to differ between runs.
pub const TIMING_KEYS: [&str; 2] = ["wall_time_seconds", "runtime_ms"];

impl RunReport {
    pub fn new(config: RunConfig, results: Value, checks: Vec<CheckLine>, wall_time_seconds: f64) -> Self {
        let passed = checks.iter().all(|c| c.pass);
        RunReport {
            tool: "sectorlab".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config,
            results,
            checks,
            passed,
            wall_time_seconds,
        }
    }

    /// Pretty JSON with keys sorted at every level.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("reports serialize");
        let mut s = serde_json::to_string_pretty(&value).expect("values serialize");
        s.push('\n');
        s
    }

    /// Results and checks with timing fields removed.
    pub fn payload(&self) -> String {
        let mut v = serde_json::json!({ "results": self.results, "checks": self.checks });
        strip_timing(&mut v);
        serde_json::to_string(&v).expect("values serialize")
    }
}

pub fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(map) => {
            for k in TIMING_KEYS {
                map.remove(k);
            }
            map.values_mut().for_each(strip_timing);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

/// Writes `bytes` to a temporary file beside `path`, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn write_report(report: &RunReport, path: &Path) -> io::Result<()> {
    write_atomic(path, report.to_json().as_bytes())
}

pub fn read_report(path: &Path) -> io::Result<RunReport> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> io::Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| e.into_error())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunReport {
        let config = crate::config::parse_config("command = \"exppair\"\n[params]\nword = \"AB\"\n").unwrap();
        let results = serde_json::json!({ "zeta": 1, "alpha": { "runtime_ms": 3.5, "b": [1, 2] } });
        RunReport::new(config, results, vec![CheckLine::new("c", true, "ok")], 0.25)
    }

    #[test]
    fn keys_are_sorted() {
        let json = sample().to_json();
        let alpha = json.find("\"alpha\"").unwrap();
        let zeta = json.find("\"zeta\"").unwrap();
        assert!(alpha < zeta);
        assert!(json.find("\"checks\"").unwrap() < json.find("\"config\"").unwrap());
    }

    #[test]
    fn payload_drops_timing() {
        let p = sample().payload();
        assert!(!p.contains("runtime_ms") && !p.contains("wall_time"));
        assert!(p.contains("\"b\":[1,2]"));
    }

    #[test]
    fn csv_quotes_when_needed() {
        let mut t = Table::new(&["m", "note"]);
        t.push(vec!["1".into(), "a,b".into()]);
        assert_eq!(String::from_utf8(t.to_csv().unwrap()).unwrap(), "m,note\n1,\"a,b\"\n");
    }
}
