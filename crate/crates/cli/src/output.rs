use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Both,
    Json,
    Table,
}

/// The machine-readable envelope around every command result.
#[derive(Serialize)]
pub struct Report<T: Serialize> {
    pub schema_version: u32,
    pub command: &'static str,
    pub input: String,
    pub flags: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub result: T,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<f64>,
}

/// A plain text table: a title, a header row and aligned body rows.
pub struct Table {
    title: String,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    footer: Vec<String>,
}

impl Table {
    pub fn new(title: impl Into<String>, header: &[&str]) -> Self {
        Table {
            title: title.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
            footer: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.footer.push(line.into());
    }

    pub fn render(&self) -> String {
        let cols = self.header.len();
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let mut s = String::new();
            for (i, c) in cells.iter().enumerate().take(cols) {
                if i > 0 {
                    s.push_str("  ");
                }
                s.push_str(&format!("{c:<w$}", w = widths[i]));
            }
            s.trim_end().to_string()
        };
        let mut out = format!("{}\n", self.title);
        if !self.header.is_empty() {
            out.push_str(&line(&self.header));
            out.push('\n');
            let total: usize = widths.iter().sum::<usize>() + 2 * cols.saturating_sub(1);
            out.push_str(&"-".repeat(total));
            out.push('\n');
        }
        for r in &self.rows {
            out.push_str(&line(r));
            out.push('\n');
        }
        for f in &self.footer {
            out.push_str(f);
            out.push('\n');
        }
        out
    }
}

pub fn emit<T: Serialize>(format: Format, report: &Report<T>, table: &Table) {
    if format != Format::Table {
        let mut out = std::io::stdout().lock();
        let text = serde_json::to_string_pretty(report).expect("reports serialize");
        let _ = writeln!(out, "{text}");
    }
    if format != Format::Json {
        let _ = std::io::stderr().lock().write_all(table.render().as_bytes());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_aligns_columns() {
        let mut t = Table::new("demo", &["degree", "dim"]);
        t.row(vec!["1".into(), "10".into()]);
        t.row(vec!["-12".into(), "0".into()]);
        t.note("done");
        assert_eq!(t.render(), "demo\ndegree  dim\n-----------\n1       10\n-12     0\ndone\n");
    }
}
