//! Report tables and their CSV / text renderings.

use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Cell {
        Cell::Text(s.into())
    }

    pub fn flag(b: bool) -> Cell {
        Cell::Text(if b { "true" } else { "false" }.to_string())
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            _ => None,
        }
    }

    fn csv(&self) -> String {
        match self {
            // 17 significant digits round-trip any f64
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => {
                format!("\"{}\"", s.replace('"', "\"\""))
            }
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn human(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:.4}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(title: &str, columns: &[&str]) -> Self {
        Table {
            title: title.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_columns(title: &str, columns: Vec<String>) -> Self {
        Table {
            title: title.to_string(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    fn render_human(&self, out: &mut String) {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(Cell::human).collect())
            .collect();
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|c| {
                cells
                    .iter()
                    .map(|r| r[c].len())
                    .chain([self.columns[c].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let _ = writeln!(out, "{}", self.title);
        let line = |out: &mut String, items: &[String]| {
            let padded: Vec<String> = items
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:>w$}"))
                .collect();
            let _ = writeln!(out, "  {}", padded.join("  "));
        };
        line(out, &self.columns);
        for row in &cells {
            line(out, row);
        }
    }
}

/// Output of one command: a primary data table, metadata, and extra tables
/// for the text summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub metadata: Vec<(String, Cell)>,
    pub data: Table,
    pub summary: Vec<Table>,
    /// Set when the command completed but a check it performs failed.
    pub failure: Option<String>,
}

impl Report {
    pub fn new(data: Table) -> Self {
        Report {
            metadata: Vec::new(),
            data,
            summary: Vec::new(),
            failure: None,
        }
    }

    pub fn meta(&mut self, key: &str, value: Cell) {
        self.metadata.push((key.to_string(), value));
    }

    pub fn metadata_value(&self, key: &str) -> Option<&Cell> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    /// Metadata as `# key=value` lines, then the data table.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.metadata {
            let _ = writeln!(out, "# {key}={}", value.csv());
        }
        let _ = writeln!(out, "{}", self.data.columns.join(","));
        for row in &self.data.rows {
            let fields: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", fields.join(","));
        }
        out
    }

    /// Four-decimal text tables.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        self.data.render_human(&mut out);
        for table in &self.summary {
            out.push('\n');
            table.render_human(&mut out);
        }
        if !self.metadata.is_empty() {
            out.push('\n');
            let width = self
                .metadata
                .iter()
                .map(|(k, _)| k.len())
                .max()
                .unwrap_or(0);
            for (key, value) in &self.metadata {
                let _ = writeln!(out, "  {key:<width$}  {}", value.human());
            }
        }
        if let Some(msg) = &self.failure {
            let _ = writeln!(out, "\nFAILED: {msg}");
        }
        out
    }
}
