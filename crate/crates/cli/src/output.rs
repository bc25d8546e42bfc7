use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::config::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Real(v) => format_sig(*v, 12),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Real(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
        }
    }
}

/// `digits` significant digits, fixed notation for moderate magnitudes and
/// scientific otherwise, trailing zeros removed.
pub fn format_sig(v: f64, digits: usize) -> String {
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -5 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        return format!("{m}e{exp}");
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A named table with scalar metadata. Serialised as CSV (header row plus
/// data rows) or as a JSON object holding the metadata and a `rows` array.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub meta: Vec<(String, Cell)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra top-level JSON fields, for summary outputs.
    pub summary: Map<String, Value>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: Map::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<Cell>) -> Self {
        self.meta.push((key.to_string(), value.into()));
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        for (k, v) in &self.meta {
            obj.insert(k.clone(), v.json());
        }
        for (k, v) in &self.summary {
            obj.insert(k.clone(), v.clone());
        }
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut r = Map::new();
                for (c, v) in self.columns.iter().zip(row) {
                    r.insert(c.clone(), v.json());
                }
                Value::Object(r)
            })
            .collect();
        obj.insert("rows".into(), Value::Array(rows));
        Value::Object(obj)
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serialisable");
                s.push('\n');
                s
            }
        }
    }
}

fn extension(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

/// `out.csv` + `gamma0.5_T0` → `out_gamma0.5_T0.csv`.
fn sibling_path(base: &Path, name: &str, format: Format) -> PathBuf {
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = base
        .extension()
        .map(|e| e.to_string_lossy().into_owned())
        .unwrap_or_else(|| extension(format).to_string());
    base.with_file_name(format!("{stem}_{name}.{ext}"))
}

/// Writes the tables. With one table and a path, the path is the file. With
/// several tables and a path, each goes to `<stem>_<name>.<ext>` beside it.
/// Without a path, tables go to standard output: CSV tables separated by a
/// blank line and a `# name` line, JSON as one array.
pub fn emit(tables: &[Table], output: Option<&Path>, format: Format) -> io::Result<Vec<PathBuf>> {
    match output {
        Some(path) => {
            let mut written = Vec::new();
            for t in tables {
                let p = if tables.len() == 1 { path.to_path_buf() } else { sibling_path(path, &t.name, format) };
                if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(parent)?;
                }
                std::fs::write(&p, t.render(format))?;
                written.push(p);
            }
            Ok(written)
        }
        None => {
            let stdout = io::stdout();
            let mut out = stdout.lock();
            match format {
                Format::Csv if tables.len() == 1 => out.write_all(tables[0].to_csv().as_bytes())?,
                Format::Csv => {
                    for (i, t) in tables.iter().enumerate() {
                        if i > 0 {
                            writeln!(out)?;
                        }
                        writeln!(out, "# {}", t.name)?;
                        out.write_all(t.to_csv().as_bytes())?;
                    }
                }
                Format::Json if tables.len() == 1 => out.write_all(tables[0].render(format).as_bytes())?,
                Format::Json => {
                    let all = Value::Array(tables.iter().map(Table::to_json).collect());
                    writeln!(out, "{}", serde_json::to_string_pretty(&all).expect("serialisable"))?;
                }
            }
            Ok(Vec::new())
        }
    }
}

/// Writes each table into `dir` as `<name>.<ext>`.
pub fn emit_to_dir(tables: &[Table], dir: &Path, format: Format) -> io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    tables
        .iter()
        .map(|t| {
            let p = dir.join(format!("{}.{}", t.name, extension(format)));
            std::fs::write(&p, t.render(format)).map(|_| p)
        })
        .collect()
}
