//! CSV and JSON rendering. Floats use Rust's shortest round-trip formatting,
//! so parsing a written value recovers the same bits.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use super::config::{ExperimentConfig, Format, SCHEMA_VERSION};
use super::stats::TrialSummary;
use crate::error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const SUMMARY_COLUMNS: [&str; 10] =
    ["metric", "count", "mean", "variance", "stderr", "min", "max", "q05", "q50", "q95"];

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Empty,
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Float)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Int(u64::from(x))
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(x) => x.to_string(),
            Cell::Float(x) => format!("{x:?}"),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(x) => json!(x),
            Cell::Float(x) if x.is_finite() => json!(x),
            Cell::Text(s) => json!(s),
            Cell::Float(_) | Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

impl From<&TrialSummary> for Table {
    fn from(s: &TrialSummary) -> Self {
        let mut t = Table::new(&SUMMARY_COLUMNS);
        for r in &s.rows {
            t.push(vec![
                r.metric.as_str().into(),
                r.count.into(),
                r.mean.into(),
                r.variance.into(),
                r.stderr.into(),
                r.min.into(),
                r.max.into(),
                r.q05.into(),
                r.q50.into(),
                r.q95.into(),
            ]);
        }
        t
    }
}

fn config_json(cfg: &ExperimentConfig) -> Result<Value> {
    serde_json::to_value(cfg).map_err(|e| Error::Parse(e.to_string()))
}

pub fn render(cfg: &ExperimentConfig, table: &Table) -> Result<String> {
    match cfg.format {
        Format::Csv => render_csv(cfg, table),
        Format::Json => render_json(cfg, table),
    }
}

pub fn render_csv(cfg: &ExperimentConfig, table: &Table) -> Result<String> {
    let mut s = String::new();
    let _ = writeln!(s, "# schema_version={SCHEMA_VERSION}");
    let _ = writeln!(s, "# version={VERSION}");
    let _ = writeln!(s, "# seed={}", cfg.seed);
    let _ = writeln!(s, "# config={}", config_json(cfg)?);
    let _ = writeln!(s, "{}", table.columns.join(","));
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(Cell::csv).collect();
        let _ = writeln!(s, "{}", cells.join(","));
    }
    Ok(s)
}

pub fn render_json(cfg: &ExperimentConfig, table: &Table) -> Result<String> {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let obj: Map<String, Value> = table.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect();
            Value::Object(obj)
        })
        .collect();
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "version": VERSION,
        "seed": cfg.seed,
        "config": config_json(cfg)?,
        "columns": table.columns,
        "rows": rows,
    });
    let mut out = serde_json::to_string_pretty(&doc).map_err(|e| Error::Parse(e.to_string()))?;
    out.push('\n');
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout_and_round_trip_floats() {
        let cfg = ExperimentConfig { seed: 99, ..Default::default() };
        let mut t = Table::new(&["trial", "seed", "t_first", "length", "backsteps", "covering_time"]);
        let x = 0.1 + 0.2;
        t.push(vec![0u64.into(), 5u64.into(), x.into(), 10u64.into(), 0u64.into(), Cell::Empty]);
        let s = render_csv(&cfg, &t).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "# schema_version=1");
        assert_eq!(lines[2], "# seed=99");
        assert!(lines[3].starts_with("# config={"));
        assert_eq!(lines[4], "trial,seed,t_first,length,backsteps,covering_time");
        let field: f64 = lines[5].split(',').nth(2).unwrap().parse().unwrap();
        assert_eq!(field.to_bits(), x.to_bits());
        assert!(lines[5].ends_with(','));
    }

    #[test]
    fn json_mirrors_schema() {
        let cfg = ExperimentConfig { format: Format::Json, ..Default::default() };
        let mut t = Table::new(&["metric", "mean"]);
        t.push(vec!["a".into(), f64::NAN.into()]);
        let v: Value = serde_json::from_str(&render(&cfg, &t).unwrap()).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["config"]["seed"], 1);
        assert_eq!(v["rows"][0]["metric"], "a");
        assert!(v["rows"][0]["mean"].is_null());
    }
}
