// Copyright 2026 The shallowpocket Authors
// SPDX-License-Identifier: Apache-2.0

//! Output documents: a config echo, an optional summary block and one
//! numeric table, rendered as CSV or TOML and written atomically.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    /// TOML document.
    #[value(alias = "structured-text")]
    #[serde(alias = "structured-text")]
    Toml,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Toml => "toml",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl Value {
    fn to_toml(&self) -> toml::Value {
        match self {
            Value::Float(v) => toml::Value::Float(*v),
            Value::Int(v) => toml::Value::Integer(*v),
            Value::Text(s) => toml::Value::String(s.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone)]
pub struct Document {
    pub title: String,
    pub config: toml::Table,
    pub summary: Vec<(String, Value)>,
    pub table: Table,
}

/// 17 significant digits, enough to recover every `f64` exactly.
pub fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

impl Document {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.render_csv(),
            Format::Toml => self.render_toml(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = format!("# shallowpocket {}\n", self.title);
        let echo = toml::to_string(&self.config).expect("config is serializable");
        for line in echo.lines().filter(|l| !l.is_empty()) {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        if !self.summary.is_empty() {
            out.push_str("# [summary]\n");
            for (k, v) in &self.summary {
                let v = match v {
                    Value::Float(x) => fmt_float(*x),
                    other => other.to_toml().to_string(),
                };
                out.push_str(&format!("# {k} = {v}\n"));
            }
        }
        out.push_str(&self.table.columns.join(","));
        out.push('\n');
        for row in &self.table.rows {
            let cells: Vec<String> = row.iter().map(|v| fmt_float(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn render_toml(&self) -> String {
        let mut doc = toml::Table::new();
        doc.insert("title".into(), toml::Value::String(self.title.clone()));
        doc.insert("config".into(), toml::Value::Table(self.config.clone()));
        if !self.summary.is_empty() {
            let summary: toml::Table = self
                .summary
                .iter()
                .map(|(k, v)| (k.clone(), v.to_toml()))
                .collect();
            doc.insert("summary".into(), toml::Value::Table(summary));
        }
        let mut table = toml::Table::new();
        table.insert(
            "columns".into(),
            toml::Value::Array(
                self.table
                    .columns
                    .iter()
                    .map(|c| toml::Value::String(c.clone()))
                    .collect(),
            ),
        );
        table.insert(
            "rows".into(),
            toml::Value::Array(
                self.table
                    .rows
                    .iter()
                    .map(|r| toml::Value::Array(r.iter().map(|v| toml::Value::Float(*v)).collect()))
                    .collect(),
            ),
        );
        doc.insert("table".into(), toml::Value::Table(table));
        toml::to_string(&doc).expect("document is serializable")
    }
}

/// Read the numeric table back from CSV output.
#[cfg(test)]
pub fn parse_csv(text: &str) -> Result<Table, String> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().ok_or("missing header line")?;
    let columns: Vec<String> = header.split(',').map(str::to_string).collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = line
            .split(',')
            .map(|c| c.parse::<f64>().map_err(|e| format!("row {}: {e}", i + 1)))
            .collect::<Result<Vec<f64>, String>>()?;
        if row.len() != columns.len() {
            return Err(format!(
                "row {} has {} cells, expected {}",
                i + 1,
                row.len(),
                columns.len()
            ));
        }
        rows.push(row);
    }
    Ok(Table { columns, rows })
}

/// Write `contents` to a temporary file next to `path`, then rename it
/// into place.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// `dir/stem-suffix.ext` for a sibling output of `path`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}-{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}-{suffix}"),
    };
    path.with_file_name(name)
}
