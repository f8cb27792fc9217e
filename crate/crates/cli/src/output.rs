use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde_json::Value;

use crate::cli::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl Cell {
    /// Compact form for the terminal.
    fn display(&self) -> String {
        match self {
            Cell::Num(x) if *x == 0.0 => "0".into(),
            Cell::Num(x) if (1e-3..1e5).contains(&x.abs()) => {
                let s = format!("{x:.6}");
                s.trim_end_matches('0').trim_end_matches('.').to_string()
            }
            Cell::Num(x) => format!("{x:.4e}"),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    /// Exact form for CSV.
    fn exact(&self) -> String {
        match self {
            Cell::Num(x) => num(*x),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.into())
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Text(n.to_string())
    }
}

/// Rows shown compactly on the terminal and written exactly to CSV.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Table {
            headers: headers.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(Cell::display).collect())
            .collect();
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.len()).collect();
        for row in &cells {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect();
            padded.join("  ").trim_end().to_string()
        };
        let mut out = line(&self.headers);
        out.push('\n');
        for row in &cells {
            out.push_str(&line(row));
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w =
            csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::exact))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Shortest representation that parses back to the same bits.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

pub struct Report {
    pub title: String,
    pub table: Table,
    pub summary: Value,
    /// Extra lines printed under the table.
    pub notes: Vec<String>,
}

/// Table to stdout; the JSON summary to `--out` or, without one, to stdout.
/// With `--format csv` the table goes to `--out` and the summary next to it.
pub fn emit(report: &Report, out: Option<&Path>, format: Format) -> Result<()> {
    let stdout = std::io::stdout();
    let mut s = stdout.lock();
    writeln!(s, "{}", report.title)?;
    write!(s, "{}", report.table.render())?;
    for n in &report.notes {
        writeln!(s, "{n}")?;
    }
    let json = serde_json::to_string_pretty(&report.summary)? + "\n";
    match (out, format) {
        (None, _) => write!(s, "{json}")?,
        (Some(path), Format::Json) => write_file(path, &json)?,
        (Some(path), Format::Csv) => {
            report.table.write_csv(path)?;
            write_file(&summary_path(path), &json)?;
        }
    }
    Ok(())
}

pub fn summary_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_aligns_right() {
        let mut t = Table::new(["k", "value"]);
        t.push(vec![1usize.into(), (-0.5).into()]);
        t.push(vec![10usize.into(), 2e-9.into()]);
        assert_eq!(t.render(), " k      value\n 1       -0.5\n10  2.0000e-9\n");
    }

    #[test]
    fn numbers_round_trip() {
        for x in [0.1 + 0.2, -1.0 / 3.0, 1e-300, 6.02e23, -0.0, 6.3e-17] {
            assert_eq!(num(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
        assert_eq!(Cell::from(None::<f64>).exact(), "");
        assert_eq!(Cell::from(-0.30735735660559).display(), "-0.307357");
    }
}
