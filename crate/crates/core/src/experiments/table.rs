use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Reals are written with 17 significant digits, enough to round-trip any `f64`.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Integer,
    Real,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
    pub kind: ColumnKind,
    pub description: String,
}

impl Column {
    pub fn integer(name: &str, description: &str) -> Self {
        Self {
            name: name.into(),
            unit: "1".into(),
            kind: ColumnKind::Integer,
            description: description.into(),
        }
    }

    pub fn real(name: &str, unit: &str, description: &str) -> Self {
        Self {
            name: name.into(),
            unit: unit.into(),
            kind: ColumnKind::Real,
            description: description.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Real(f64),
}

impl Cell {
    pub fn as_f64(&self) -> f64 {
        match *self {
            Cell::Int(i) => i as f64,
            Cell::Real(x) => x,
        }
    }

    fn render(&self) -> String {
        match *self {
            Cell::Int(i) => i.to_string(),
            Cell::Real(x) => format_real(x),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Int(b as i64)
    }
}

/// Rectangular table of experiment output with `key: value` metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    experiment: String,
    columns: Vec<Column>,
    rows: Vec<Vec<Cell>>,
    metadata: Vec<(String, String)>,
    failure: Option<String>,
}

impl ResultTable {
    pub fn new(experiment: &str, columns: Vec<Column>) -> Self {
        Self {
            experiment: experiment.into(),
            columns,
            rows: Vec::new(),
            metadata: Vec::new(),
            failure: None,
        }
    }

    pub fn experiment(&self) -> &str {
        &self.experiment
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn metadata(&self) -> &[(String, String)] {
        &self.metadata
    }

    /// Value of the first metadata entry named `key`.
    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn failure(&self) -> Option<&str> {
        self.failure.as_deref()
    }

    pub fn is_complete(&self) -> bool {
        self.failure.is_none()
    }

    /// Column `name` as reals.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c.name == name)?;
        Some(self.rows.iter().map(|r| r[idx].as_f64()).collect())
    }

    /// Panics if the row length differs from the schema.
    pub fn push_row(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width does not match the {} column schema",
            self.experiment
        );
        for (cell, col) in row.iter().zip(&self.columns) {
            debug_assert!(
                matches!(
                    (cell, col.kind),
                    (Cell::Int(_), ColumnKind::Integer) | (Cell::Real(_), ColumnKind::Real)
                ),
                "cell type does not match column {}",
                col.name
            );
        }
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl ToString) {
        let value = value.to_string().replace(['\n', '\r'], " ");
        self.metadata.push((key.into(), value));
    }

    pub fn meta_real(&mut self, key: impl Into<String>, value: f64) {
        self.meta(key, format_real(value));
    }

    /// Marks the run as failed; rows collected so far are kept.
    pub fn fail(&mut self, reason: impl ToString) {
        self.failure = Some(reason.to_string().replace(['\n', '\r'], " "));
    }

    /// Header and data lines only, without metadata.
    pub fn data_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<&str> = self.columns.iter().map(|c| c.name.as_str()).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// `#`-prefixed metadata lines (`extra` first), then header and rows.
    pub fn to_csv(&self, extra: &[(String, String)]) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# experiment: {}", self.experiment);
        for (k, v) in extra.iter().chain(&self.metadata) {
            let _ = writeln!(out, "# {k}: {v}");
        }
        for c in &self.columns {
            let _ = writeln!(out, "# column.{}: [{}] {}", c.name, c.unit, c.description);
        }
        match &self.failure {
            None => out.push_str("# status: complete\n"),
            Some(reason) => {
                out.push_str("# status: failed\n");
                let _ = writeln!(out, "# failure: {reason}");
            }
        }
        out.push_str(&self.data_csv());
        out
    }

    pub fn write_csv(&self, mut w: impl Write, extra: &[(String, String)]) -> std::io::Result<()> {
        w.write_all(self.to_csv(extra).as_bytes())
    }

    pub fn to_json(&self, extra: &[(String, String)]) -> Value {
        let metadata: serde_json::Map<String, Value> = extra
            .iter()
            .chain(&self.metadata)
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        json!({
            "experiment": self.experiment,
            "status": if self.failure.is_some() { "failed" } else { "complete" },
            "failure": self.failure,
            "metadata": metadata,
            "columns": self.columns,
            "rows": self.rows,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ResultTable {
        let mut t = ResultTable::new(
            "demo",
            vec![
                Column::integer("i", "index"),
                Column::real("x", "1", "value"),
            ],
        );
        t.push_row(vec![Cell::Int(1), Cell::Real(0.1)]);
        t.push_row(vec![Cell::Int(2), Cell::Real(-2.5e-300)]);
        t.meta("note", "two\nlines");
        t
    }

    #[test]
    fn reals_round_trip() {
        for x in [
            0.1,
            1.0 / 3.0,
            -2.5e-300,
            6.02214076e23,
            f64::MIN_POSITIVE,
            5e-324,
        ] {
            assert_eq!(format_real(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_real(f64::INFINITY), "inf");
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv(&[("seed".into(), "3".into())]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# experiment: demo");
        assert_eq!(lines[1], "# seed: 3");
        assert_eq!(lines[2], "# note: two lines");
        assert!(!csv.contains('\r'));
        let data: Vec<&str> = lines
            .iter()
            .copied()
            .filter(|l| !l.starts_with('#'))
            .collect();
        assert_eq!(data[0], "i,x");
        assert_eq!(data[1], "1,1.0000000000000001e-1");
        assert_eq!(data.len(), 3);
    }

    #[test]
    #[should_panic]
    fn ragged_rows_are_rejected() {
        let mut t = sample();
        t.push_row(vec![Cell::Int(3)]);
    }

    #[test]
    fn json_has_rows_and_status() {
        let mut t = sample();
        t.fail("solver diverged");
        let v = t.to_json(&[]);
        assert_eq!(v["status"], "failed");
        assert_eq!(v["rows"][0][0], 1);
        assert_eq!(v["columns"][1]["name"], "x");
    }
}
