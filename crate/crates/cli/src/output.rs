use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::{Map, Value};

use crate::args::Format;

pub const SCHEMA_VERSION: u32 = 1;

/// Writes floats with 17 significant digits.
struct FixedDigits;

impl Formatter for FixedDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", float(value))
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Outcome of one subcommand.
pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub result: Value,
    /// Row-oriented data written as the CSV body when present.
    pub table: Option<Vec<Value>>,
    /// Whether the asserted inequality or certificate holds.
    pub passed: bool,
    pub diagnostic: Option<String>,
}

impl Report {
    pub fn new(command: &'static str, config: &impl Serialize, result: &impl Serialize) -> Self {
        Self {
            command,
            config: serde_json::to_value(config).expect("config serialises"),
            result: serde_json::to_value(result).expect("result serialises"),
            table: None,
            passed: true,
            diagnostic: None,
        }
    }

    pub fn with_table(mut self, rows: Vec<Value>) -> Self {
        self.table = Some(rows);
        self
    }

    pub fn check(mut self, passed: bool, diagnostic: impl Into<String>) -> Self {
        self.passed = passed;
        if !passed {
            self.diagnostic = Some(diagnostic.into());
        }
        self
    }

    pub fn document(&self, globals: Value) -> Value {
        let mut doc = Map::new();
        doc.insert("schema_version".into(), SCHEMA_VERSION.into());
        doc.insert("command".into(), self.command.into());
        let mut config = match &self.config {
            Value::Object(m) => m.clone(),
            other => {
                let mut m = Map::new();
                m.insert("args".into(), other.clone());
                m
            }
        };
        if let Value::Object(g) = globals {
            config.extend(g);
        }
        doc.insert("config".into(), Value::Object(config));
        doc.insert("passed".into(), self.passed.into());
        match &self.result {
            Value::Object(m) => {
                for (k, v) in m {
                    doc.insert(k.clone(), v.clone());
                }
            }
            other => {
                doc.insert("result".into(), other.clone());
            }
        }
        if let Some(rows) = &self.table {
            doc.insert("rows".into(), Value::Array(rows.clone()));
        }
        Value::Object(doc)
    }

    pub fn write<W: Write>(&self, mut w: W, format: Format, globals: Value) -> io::Result<()> {
        match format {
            Format::Json => {
                let doc = self.document(globals);
                let mut ser = serde_json::Serializer::with_formatter(&mut w, FixedDigits);
                doc.serialize(&mut ser).map_err(io::Error::other)?;
                writeln!(w)
            }
            Format::Csv => {
                let rows = match &self.table {
                    Some(rows) => rows.clone(),
                    None => vec![self.result.clone()],
                };
                write_csv(w, &rows)
            }
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&key(k), x, out);
            }
        }
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let cells: Vec<String> = a.iter().map(scalar).collect();
            out.push((prefix.to_string(), cells.join(";")));
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&key(&i.to_string()), x, out);
            }
        }
        _ => out.push((prefix.to_string(), scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
            (Some(i), _, _) => i.to_string(),
            (_, Some(u), _) => u.to_string(),
            (_, _, Some(f)) => float(f),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Header from the first row; later rows are matched by column name.
pub fn write_csv<W: Write>(mut w: W, rows: &[Value]) -> io::Result<()> {
    let flat: Vec<Vec<(String, String)>> = rows
        .iter()
        .map(|r| {
            let mut cells = Vec::new();
            flatten("", r, &mut cells);
            cells
        })
        .collect();
    let header: Vec<String> = flat
        .first()
        .map(|r| r.iter().map(|(k, _)| k.clone()).collect())
        .unwrap_or_default();
    let line: Vec<String> = header.iter().map(|h| csv_cell(h)).collect();
    writeln!(w, "{}", line.join(","))?;
    for row in &flat {
        let cells: Vec<String> = header
            .iter()
            .map(|h| {
                row.iter()
                    .find(|(k, _)| k == h)
                    .map(|(_, v)| csv_cell(v))
                    .unwrap_or_default()
            })
            .collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}
