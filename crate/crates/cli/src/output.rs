//! Tables with route-annotated columns, rendered as CSV or JSON.
//!
//! CSV: `#`-prefixed lines carrying the effective configuration as JSON,
//! then a header of `name[route]` cells, then rows. Complex cells split into
//! `name.re` and `name.im` columns.
//!
//! JSON: `{"command", "config", "columns", "notes", "records"}` where each record maps
//! column names to values and complex cells become `{"re", "im"}`.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::Format;

#[derive(Debug, Clone, Serialize)]
pub struct Column {
    pub name: String,
    /// Where the numbers come from: `closed_form`, `quadrature`, `fit`, ...
    pub route: String,
}

#[derive(Debug, Clone)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Complex(Complex64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<Complex64> for Cell {
    fn from(z: Complex64) -> Self {
        Cell::Complex(z)
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

fn real_json(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or_else(|| Value::String(x.to_string()))
}

impl Cell {
    fn to_json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Real(x) => real_json(*x),
            Cell::Complex(z) => json!({ "re": real_json(z.re), "im": real_json(z.im) }),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }

    fn csv_fields(&self) -> Vec<String> {
        match self {
            Cell::Int(i) => vec![i.to_string()],
            Cell::Real(x) => vec![real_text(*x)],
            Cell::Complex(z) => vec![real_text(z.re), real_text(z.im)],
            Cell::Text(s) => vec![csv_escape(s)],
            Cell::Bool(b) => vec![b.to_string()],
        }
    }
}

/// Shortest round-trip text, in exponent form outside `[1e-4, 1e16)`.
fn real_text(x: f64) -> String {
    let x = x + 0.0;
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e16).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub command: String,
    pub config: Value,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra provenance lines, echoed as CSV comments or a JSON `notes` array.
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(command: &str, config: Value, columns: &[(&str, &str)]) -> Self {
        Self {
            command: command.to_string(),
            config,
            columns: columns
                .iter()
                .map(|(n, r)| Column {
                    name: n.to_string(),
                    route: r.to_string(),
                })
                .collect(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# command: {}\n", self.command));
        out.push_str(&format!("# config: {}\n", self.config));
        for n in &self.notes {
            out.push_str(&format!("# {n}\n"));
        }
        let complex: Vec<bool> = (0..self.columns.len())
            .map(|j| self.rows.first().is_some_and(|r| matches!(r[j], Cell::Complex(_))))
            .collect();
        let header: Vec<String> = self
            .columns
            .iter()
            .zip(&complex)
            .flat_map(|(c, &cx)| {
                if cx {
                    vec![format!("{}.re[{}]", c.name, c.route), format!("{}.im[{}]", c.name, c.route)]
                } else {
                    vec![format!("{}[{}]", c.name, c.route)]
                }
            })
            .collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().flat_map(Cell::csv_fields).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    fn to_json(&self) -> String {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                for (c, cell) in self.columns.iter().zip(row) {
                    m.insert(c.name.clone(), cell.to_json());
                }
                Value::Object(m)
            })
            .collect();
        let doc = json!({
            "command": self.command,
            "config": self.config,
            "columns": self.columns,
            "notes": self.notes,
            "records": records,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
        s.push('\n');
        s
    }

    pub fn emit(&self, format: Format, dest: Option<&Path>) -> Result<()> {
        let text = self.render(format);
        match dest {
            Some(path) => {
                if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                }
                std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new("demo", json!({"seed": 1}), &[("k", "index"), ("z", "closed_form"), ("note", "label")]);
        t.push(vec![Cell::from(0usize), Cell::from(Complex64::new(1.0, -0.5)), Cell::from("a,b")]);
        t
    }

    #[test]
    fn csv_layout() {
        let s = sample().render(Format::Csv);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "# command: demo");
        assert_eq!(lines[1], "# config: {\"seed\":1}");
        assert_eq!(lines[2], "k[index],z.re[closed_form],z.im[closed_form],note[label]");
        assert_eq!(lines[3], "0,1,-0.5,\"a,b\"");
    }

    #[test]
    fn real_formatting() {
        assert_eq!(real_text(0.0), "0");
        assert_eq!(real_text(-4.5), "-4.5");
        assert_eq!(real_text(1.5e-20), "1.5e-20");
        assert_eq!(real_text(2e20), "2e20");
    }

    #[test]
    fn json_layout() {
        let v: Value = serde_json::from_str(&sample().render(Format::Json)).unwrap();
        assert_eq!(v["records"][0]["z"]["im"], json!(-0.5));
        assert_eq!(v["columns"][1]["route"], json!("closed_form"));
        assert_eq!(v["config"]["seed"], json!(1));
    }
}
