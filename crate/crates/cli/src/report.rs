//! Report model and its CSV / JSON renderings.

use serde_json::{json, Map, Value};

use crate::config::EMBED_PREFIX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    pub fn opt(value: Option<f64>) -> Cell {
        value.map_or(Cell::Empty, Cell::Num)
    }

    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_float(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => csv_escape(s),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => Value::from(*x),
            Cell::Int(i) => Value::from(*i),
            Cell::Bool(b) => Value::from(*b),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Empty => Value::Null,
        }
    }
}

/// 17 significant digits in scientific notation; identical on every platform.
/// Negative zero prints as zero.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        format!("{:.16e}", 0.0)
    } else if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    /// One named value per row.
    Quantities(Vec<(String, Cell)>),
    /// One row per grid point.
    Table {
        columns: Vec<String>,
        rows: Vec<Vec<Cell>>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub config: Vec<(&'static str, String)>,
    pub body: Body,
    pub checks: Vec<CheckRow>,
}

impl Report {
    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect()
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.config {
            out.push_str(&format!("{EMBED_PREFIX} {k} = {v}\n"));
        }
        match &self.body {
            Body::Quantities(values) => {
                out.push_str("quantity,value\n");
                for (name, cell) in values {
                    out.push_str(&format!("{},{}\n", csv_escape(name), cell.csv()));
                }
                for c in &self.checks {
                    let rows = [
                        ("passed", c.passed.to_string()),
                        ("residual", format_float(c.residual)),
                        ("tolerance", format_float(c.tolerance)),
                        ("detail", csv_escape(&c.detail)),
                    ];
                    for (field, value) in rows {
                        out.push_str(&format!("check.{}.{field},{value}\n", c.name));
                    }
                }
            }
            Body::Table { columns, rows } => {
                let header: Vec<String> = columns.iter().map(|c| csv_escape(c)).collect();
                out.push_str(&header.join(","));
                out.push('\n');
                for row in rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
            }
        }
        out
    }

    fn to_json(&self) -> String {
        let config: Map<String, Value> = self
            .config
            .iter()
            .map(|(k, v)| (k.to_string(), Value::from(v.as_str())))
            .collect();
        let results = match &self.body {
            Body::Quantities(values) => {
                Value::Object(values.iter().map(|(k, c)| (k.clone(), c.json())).collect())
            }
            Body::Table { columns, rows } => json!({
                "columns": columns,
                "rows": rows.iter().map(|r| r.iter().map(Cell::json).collect::<Vec<_>>()).collect::<Vec<_>>(),
            }),
        };
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "passed": c.passed,
                    "residual": c.residual,
                    "tolerance": c.tolerance,
                    "detail": c.detail,
                })
            })
            .collect();
        let doc = json!({ "config": config, "results": results, "checks": checks });
        let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
        text.push('\n');
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(format_float(1.0 / 3.0), "3.3333333333333331e-1");
        assert_eq!(format_float(-2.0), "-2.0000000000000000e0");
    }

    #[test]
    fn csv_quotes_only_when_needed() {
        assert_eq!(csv_escape("plain"), "plain");
        assert_eq!(csv_escape("a, \"b\""), "\"a, \"\"b\"\"\"");
    }
}
