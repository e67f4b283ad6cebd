use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::OutputFormat;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => render_float(*v),
            Cell::Text(v) => v.clone(),
            Cell::Bool(v) => v.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Text(v) => Value::from(v.as_str()),
            Cell::Bool(v) => Value::from(*v),
        }
    }
}

/// Shortest round-trip form; exponent notation for very small or large magnitudes.
fn render_float(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

macro_rules! cell_from {
    ($($t:ty => $variant:ident as $cast:ty),*) => {
        $(impl From<$t> for Cell {
            fn from(v: $t) -> Self {
                Cell::$variant(v as $cast)
            }
        })*
    };
}

cell_from!(i64 => Int as i64, u64 => Int as i64, usize => Int as i64, u32 => Int as i64, f64 => Float as f64);

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
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

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }

    fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> =
                        self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

/// A pass/fail comparison with the numbers behind it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub statistic: f64,
    pub threshold: f64,
    pub samples: u64,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, statistic: f64, threshold: f64, samples: u64, detail: String) -> Self {
        Self { name: name.into(), passed, statistic, threshold, samples, detail }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: statistic={} threshold={} samples={} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.statistic,
            self.threshold,
            self.samples,
            self.detail
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub command: String,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self { command: command.into(), ..Default::default() }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn checks_table(&self) -> Table {
        let mut t = Table::new("checks", &["check", "passed", "statistic", "threshold", "samples", "detail"]);
        for c in &self.checks {
            t.push(vec![
                c.name.as_str().into(),
                c.passed.into(),
                c.statistic.into(),
                c.threshold.into(),
                c.samples.into(),
                c.detail.as_str().into(),
            ]);
        }
        t
    }

    /// Tables as `# name` headed CSV blocks, or one JSON object keyed by
    /// table name with rows as arrays of objects.
    pub fn render(&self, format: OutputFormat) -> String {
        let mut tables = self.tables.clone();
        if !self.checks.is_empty() {
            tables.push(self.checks_table());
        }
        match format {
            OutputFormat::Csv => {
                let mut out = String::new();
                for (i, t) in tables.iter().enumerate() {
                    if i > 0 {
                        out.push('\n');
                    }
                    let _ = writeln!(out, "# {}", t.name);
                    out.push_str(&t.to_csv());
                }
                out
            }
            OutputFormat::Json => {
                let mut obj = Map::new();
                obj.insert("command".into(), Value::from(self.command.as_str()));
                obj.insert("passed".into(), Value::from(self.all_passed()));
                for t in &tables {
                    obj.insert(t.name.clone(), t.to_json());
                }
                let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("serializable");
                s.push('\n');
                s
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("demo");
        let mut t = Table::new("values", &["k", "mean", "label"]);
        t.push(vec![0usize.into(), 0.25.into(), "a,b".into()]);
        t.push(vec![1usize.into(), f64::NAN.into(), "c".into()]);
        r.tables.push(t);
        r.checks.push(Check::new("ok", true, 1.0, 2.0, 10, String::new()));
        r
    }

    #[test]
    fn csv_blocks() {
        let text = sample().render(OutputFormat::Csv);
        assert!(text.starts_with("# values\nk,mean,label\n0,0.25,\"a,b\"\n1,NaN,c\n\n# checks\n"));
        assert_eq!(render_float(7.5e-17), "7.5e-17");
        assert_eq!(render_float(0.0), "0");
        assert_eq!(render_float(1234.5), "1234.5");
    }

    #[test]
    fn json_mirrors_rows() {
        let text = sample().render(OutputFormat::Json);
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["values"][0]["label"], "a,b");
        assert_eq!(v["values"][1]["mean"], Value::Null);
        assert_eq!(v["checks"][0]["passed"], true);
        assert_eq!(v["passed"], true);
    }

    #[test]
    #[should_panic]
    fn rejects_ragged_rows() {
        Table::new("t", &["a", "b"]).push(vec![1usize.into()]);
    }
}
