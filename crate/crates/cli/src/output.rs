//! Artifact writers.
//!
//! Every file a run produces is stamped with the tool version and the SHA-256
//! digest of the effective configuration: as `#` comment lines in CSV and
//! plain-text files, and as top-level `version`/`config_digest` fields in
//! JSON.  Floats are written in shortest round-trip form, so identical runs
//! produce byte-identical artifacts.

use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::config::Failure;

/// Provenance stamped into every artifact.
#[derive(Debug, Clone)]
pub struct Meta {
    pub version: &'static str,
    pub digest: String,
}

impl Meta {
    fn comment_header(&self) -> String {
        format!("# coneheat {}\n# config-sha256 {}\n", self.version, self.digest)
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents)
        .map_err(|err| Failure::Run(format!("cannot write `{}`: {err}", path.display())))
}

/// Shortest round-trip decimal form (`Display` for `f64`).
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// A JSON number, or its decimal form as a string when non-finite (JSON has
/// no literal for infinities).
pub fn json_f64(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::String(fmt_f64(x))
    }
}

/// Write a CSV table with the provenance header and one `name,...` line.
pub fn write_csv(
    path: &Path,
    meta: &Meta,
    columns: &[&str],
    rows: &[Vec<String>],
) -> Result<(), Failure> {
    let mut text = meta.comment_header();
    text.push_str(&columns.join(","));
    text.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), columns.len());
        text.push_str(&row.join(","));
        text.push('\n');
    }
    write_file(path, &text)
}

/// Write a JSON object, injecting `version` and `config_digest` fields.
pub fn write_json(path: &Path, meta: &Meta, payload: Value) -> Result<(), Failure> {
    let mut object = Map::new();
    object.insert("version".to_owned(), json!(meta.version));
    object.insert("config_digest".to_owned(), json!(meta.digest));
    match payload {
        Value::Object(map) => object.extend(map),
        other => {
            object.insert("data".to_owned(), other);
        }
    }
    let text = serde_json::to_string_pretty(&Value::Object(object))
        .map_err(|err| Failure::Run(format!("cannot serialize json: {err}")))?;
    write_file(path, &format!("{text}\n"))
}

/// Write a plain-text report with the provenance header.
pub fn write_text(path: &Path, meta: &Meta, body: &str) -> Result<(), Failure> {
    let mut text = meta.comment_header();
    text.push_str(body);
    if !body.ends_with('\n') {
        text.push('\n');
    }
    write_file(path, &text)
}

/// A grid result: named columns plus rows, writable as CSV or JSON.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    /// Write as `<stem>.csv` or `<stem>.json` per the configured format;
    /// returns the path written.
    pub fn write(&self, dir: &Path, stem: &str, format: &str, meta: &Meta) -> Result<PathBuf, Failure> {
        if format == "json" {
            let path = dir.join(format!("{stem}.json"));
            let rows: Vec<Value> = self
                .rows
                .iter()
                .map(|row| {
                    let mut object = Map::new();
                    for (name, x) in self.columns.iter().zip(row) {
                        object.insert((*name).to_owned(), json_f64(*x));
                    }
                    Value::Object(object)
                })
                .collect();
            write_json(&path, meta, json!({ "rows": rows }))?;
            Ok(path)
        } else {
            let path = dir.join(format!("{stem}.csv"));
            let rows: Vec<Vec<String>> = self
                .rows
                .iter()
                .map(|row| row.iter().map(|x| fmt_f64(*x)).collect())
                .collect();
            write_csv(&path, meta, &self.columns, &rows)?;
            Ok(path)
        }
    }
}

/// Cartesian product of the given axes, last axis fastest.
pub fn cartesian(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut rows = vec![Vec::new()];
    for axis in axes {
        let mut next = Vec::with_capacity(rows.len() * axis.len());
        for row in &rows {
            for &x in axis {
                let mut extended = row.clone();
                extended.push(x);
                next.push(extended);
            }
        }
        rows = next;
    }
    rows
}
