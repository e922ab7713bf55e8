//! Shared output machinery: one float formatter feeds both the CSV and the
//! JSON writer, so the two formats can never drift apart numerically.

use serde_json::{Map, Number, Value};
use std::fs;
use std::io::Write;
use std::path::Path;

pub const SCHEMA_VERSION: &str = "1";

/// 17 significant digits, scientific, locale-independent. Negative zero is
/// folded into plain zero so equal values always print the same bytes.
pub fn fmt_float(x: f64) -> String {
    if !x.is_finite() {
        // unreachable for well-formed results; kept so a bug cannot panic the writer
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let x = if x == 0.0 { 0.0 } else { x };
    let s = format!("{x:.16e}");
    // {:.16e} leaves positive exponents unsigned; JSON number parsing
    // re-emits them signed. Normalize here so both formats agree byte for byte.
    match s.find('e') {
        Some(i) if !matches!(s.as_bytes()[i + 1], b'+' | b'-') => {
            format!("{}e+{}", &s[..i], &s[i + 1..])
        }
        _ => s,
    }
}

/// JSON number carrying exactly the bytes of [`fmt_float`].
pub fn json_num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    match fmt_float(x).parse::<Number>() {
        Ok(n) => Value::Number(n),
        // parse only fails if fmt_float emitted something non-numeric,
        // which the finite check above rules out
        Err(_) => Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null),
    }
}

#[derive(Clone)]
pub enum Cell {
    Float(f64),
    OptFloat(Option<f64>),
    Int(u64),
    Bool(bool),
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Float(x) => fmt_float(*x),
            Cell::OptFloat(Some(x)) => fmt_float(*x),
            Cell::OptFloat(None) => String::new(),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Float(x) => json_num(*x),
            Cell::OptFloat(Some(x)) => json_num(*x),
            Cell::OptFloat(None) => Value::Null,
            Cell::Int(n) => Value::Number((*n).into()),
            Cell::Bool(b) => Value::Bool(*b),
        }
    }
}

pub enum Payload {
    /// Homogeneous table; `header` names the columns in their fixed order.
    Rows { header: Vec<&'static str>, rows: Vec<Vec<Cell>> },
    /// Single record, written as a one-row table in CSV.
    Record(Vec<(&'static str, Cell)>),
    /// No result, e.g. a solve that collapsed. JSON gets `"result": null`,
    /// CSV ends after the preamble.
    Empty,
}

pub struct Envelope {
    pub command: &'static str,
    /// Echo of the computation-relevant inputs. Output routing flags
    /// (--output, --plot, --dump-psi) are deliberately not echoed so that
    /// requesting a plot can never change the data stream.
    pub parameters: Vec<(&'static str, Value)>,
    pub unit_system: &'static str,
    /// (quantity, unit label) pairs; empty for dimensionless commands.
    pub units: Vec<(&'static str, &'static str)>,
    /// Extra machine-readable state, e.g. solver status. Rendered ahead of
    /// the warnings in both formats.
    pub status: Option<&'static str>,
    pub warnings: Vec<String>,
    pub payload: Payload,
}

impl Envelope {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# gpsne {}\n", self.command));
        out.push_str(&format!("# schema_version: {SCHEMA_VERSION}\n"));
        out.push_str(&format!("# unit_system: {}\n", self.unit_system));
        if !self.units.is_empty() {
            let labels: Vec<String> =
                self.units.iter().map(|(q, u)| format!("{q}={u}")).collect();
            out.push_str(&format!("# units: {}\n", labels.join(" ")));
        }
        for (key, value) in &self.parameters {
            out.push_str(&format!("# parameter: {key}={}\n", csv_param(value)));
        }
        if let Some(status) = self.status {
            out.push_str(&format!("# status: {status}\n"));
        }
        for w in &self.warnings {
            out.push_str(&format!("# warning: {w}\n"));
        }
        match &self.payload {
            Payload::Rows { header, rows } => {
                out.push_str(&header.join(","));
                out.push('\n');
                for row in rows {
                    let cells: Vec<String> = row.iter().map(Cell::to_csv).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
            }
            Payload::Record(fields) => {
                let names: Vec<&str> = fields.iter().map(|(n, _)| *n).collect();
                out.push_str(&names.join(","));
                out.push('\n');
                let cells: Vec<String> = fields.iter().map(|(_, c)| c.to_csv()).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            Payload::Empty => {}
        }
        out
    }

    fn to_json(&self) -> String {
        let mut root = Map::new();
        root.insert("schema_version".into(), Value::String(SCHEMA_VERSION.into()));
        root.insert("command".into(), Value::String(self.command.into()));
        let mut params = Map::new();
        for (key, value) in &self.parameters {
            params.insert((*key).into(), value.clone());
        }
        root.insert("parameters".into(), Value::Object(params));
        root.insert("unit_system".into(), Value::String(self.unit_system.into()));
        let mut units = Map::new();
        for (q, u) in &self.units {
            units.insert((*q).into(), Value::String((*u).into()));
        }
        root.insert("units".into(), Value::Object(units));
        if let Some(status) = self.status {
            root.insert("status".into(), Value::String(status.into()));
        }
        root.insert(
            "warnings".into(),
            Value::Array(self.warnings.iter().map(|w| Value::String(w.clone())).collect()),
        );
        match &self.payload {
            Payload::Rows { header, rows } => {
                let arr: Vec<Value> = rows
                    .iter()
                    .map(|row| {
                        let mut obj = Map::new();
                        for (name, cell) in header.iter().zip(row) {
                            obj.insert((*name).into(), cell.to_json());
                        }
                        Value::Object(obj)
                    })
                    .collect();
                root.insert("rows".into(), Value::Array(arr));
            }
            Payload::Record(fields) => {
                let mut obj = Map::new();
                for (name, cell) in fields {
                    obj.insert((*name).into(), cell.to_json());
                }
                root.insert("result".into(), Value::Object(obj));
            }
            Payload::Empty => {
                root.insert("result".into(), Value::Null);
            }
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(root))
            .expect("envelope serialization cannot fail");
        text.push('\n');
        text
    }
}

/// Parameter values in the CSV preamble reuse the JSON rendering, minus the
/// quotes around plain strings.
fn csv_param(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// `--output stdout` (or `-`) writes to standard out, anything else to a file.
pub fn write_output(dest: &str, content: &str) -> Result<(), String> {
    if dest == "stdout" || dest == "-" {
        let mut handle = std::io::stdout().lock();
        handle
            .write_all(content.as_bytes())
            .map_err(|e| format!("failed writing to stdout: {e}"))
    } else {
        fs::write(Path::new(dest), content)
            .map_err(|e| format!("failed writing {dest}: {e}"))
    }
}

pub fn write_file(path: &Path, content: &str) -> Result<(), String> {
    fs::write(path, content).map_err(|e| format!("failed writing {}: {e}", path.display()))
}
