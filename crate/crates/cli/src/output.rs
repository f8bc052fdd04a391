use std::fmt::Write as _;

use clap::ValueEnum;
use logmax::Rational;
use serde::Serialize;
use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Pretty,
    Json,
    Csv,
}

#[derive(Clone, Debug)]
pub enum Cell {
    Exact(Rational),
    Text(String),
    Int(i64),
    Float(f64),
    Missing,
}

impl Cell {
    fn text(&self, decimal: Option<usize>) -> String {
        match self {
            Cell::Exact(q) => match decimal {
                Some(d) => format!("{q} ≈ {}", q.to_decimal(d)),
                None => q.to_string(),
            },
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format!("{x:.8}"),
            Cell::Missing => "-".into(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Exact(q) => json!(q.to_string()),
            Cell::Text(s) => json!(s),
            Cell::Int(i) => json!(i),
            Cell::Float(x) => json!(x),
            Cell::Missing => Value::Null,
        }
    }

    fn csv(&self) -> String {
        match self {
            Cell::Exact(q) => format!("\"{q}\""),
            Cell::Text(s) if s.contains([',', '"']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Missing => String::new(),
            other => other.text(None),
        }
    }
}

impl From<Rational> for Cell {
    fn from(q: Rational) -> Self {
        Cell::Exact(q)
    }
}

impl From<Option<Rational>> for Cell {
    fn from(q: Option<Rational>) -> Self {
        q.map_or(Cell::Missing, Cell::Exact)
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

impl From<i64> for Cell {
    fn from(i: i64) -> Self {
        Cell::Int(i)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

/// Result of one subcommand: a table, scalar summary entries and free-form notes.
#[derive(Debug, Default)]
pub struct Report {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<(String, Cell)>,
    pub notes: Vec<String>,
    pub attachments: Vec<(String, Value)>,
}

impl Report {
    pub fn new(columns: &[&str]) -> Self {
        Report { columns: columns.iter().map(|c| c.to_string()).collect(), ..Default::default() }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn summary(&mut self, key: &str, v: impl Into<Cell>) {
        self.summary.push((key.to_string(), v.into()));
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn exact_columns(&self) -> Vec<bool> {
        (0..self.columns.len()).map(|i| self.rows.iter().any(|r| matches!(r[i], Cell::Exact(_)))).collect()
    }

    pub fn render(&self, format: Format, command: &str, config: &Value, decimal: Option<usize>) -> String {
        match format {
            Format::Json => self.render_json(command, config, decimal),
            Format::Csv => self.render_csv(command, config, decimal),
            Format::Pretty => self.render_pretty(command, config, decimal),
        }
    }

    fn render_json(&self, command: &str, config: &Value, decimal: Option<usize>) -> String {
        let with_decimal = |m: &mut Map<String, Value>, key: &str, c: &Cell| {
            m.insert(key.to_string(), c.json());
            if let (Some(d), Cell::Exact(q)) = (decimal, c) {
                m.insert(format!("{key}_decimal"), json!(q.to_decimal(d)));
            }
        };
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut m = Map::new();
                for (k, c) in self.columns.iter().zip(r) {
                    with_decimal(&mut m, k, c);
                }
                Value::Object(m)
            })
            .collect();
        let mut summary = Map::new();
        for (k, c) in &self.summary {
            with_decimal(&mut summary, k, c);
        }
        let mut top = Map::new();
        top.insert("command".into(), json!(command));
        top.insert("config".into(), config.clone());
        top.insert("rows".into(), Value::Array(rows));
        if !summary.is_empty() {
            top.insert("summary".into(), Value::Object(summary));
        }
        if !self.notes.is_empty() {
            top.insert("notes".into(), json!(self.notes));
        }
        for (k, v) in &self.attachments {
            top.insert(k.clone(), v.clone());
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("serializable");
        s.push('\n');
        s
    }

    fn render_csv(&self, command: &str, config: &Value, decimal: Option<usize>) -> String {
        let mut s = format!("# logmax {command} {config}\n");
        let exact = self.exact_columns();
        let mut header: Vec<String> = Vec::new();
        for (c, &e) in self.columns.iter().zip(&exact) {
            header.push(c.clone());
            if e && decimal.is_some() {
                header.push(format!("{c}_decimal"));
            }
        }
        s += &header.join(",");
        s.push('\n');
        for r in &self.rows {
            let mut cells = Vec::new();
            for (c, &e) in r.iter().zip(&exact) {
                cells.push(c.csv());
                if let (true, Some(d)) = (e, decimal) {
                    cells.push(match c {
                        Cell::Exact(q) => q.to_decimal(d),
                        _ => String::new(),
                    });
                }
            }
            s += &cells.join(",");
            s.push('\n');
        }
        for (k, c) in &self.summary {
            let _ = writeln!(s, "# {k} = {}", c.text(decimal));
        }
        for n in &self.notes {
            let _ = writeln!(s, "# {n}");
        }
        s
    }

    fn render_pretty(&self, command: &str, config: &Value, decimal: Option<usize>) -> String {
        let mut s = format!("# logmax {command} {config}\n");
        if !self.columns.is_empty() && !self.rows.is_empty() {
            let texts: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(|c| c.text(decimal)).collect()).collect();
            let widths: Vec<usize> = (0..self.columns.len())
                .map(|i| texts.iter().map(|r| r[i].chars().count()).chain([self.columns[i].len()]).max().unwrap_or(0))
                .collect();
            let line = |cells: &[String]| {
                let padded: Vec<String> = cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
                    .collect();
                padded.join("  ").trim_end().to_string()
            };
            s += &line(&self.columns);
            s.push('\n');
            for r in &texts {
                s += &line(r);
                s.push('\n');
            }
        }
        for (k, c) in &self.summary {
            let _ = writeln!(s, "{k}: {}", c.text(decimal));
        }
        for (k, v) in &self.attachments {
            let _ = writeln!(s, "{k}: {}", serde_json::to_string(v).expect("serializable"));
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        s
    }
}
