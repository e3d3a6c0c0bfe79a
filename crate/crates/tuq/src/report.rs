//! CSV and structured-text export of a [`StudyReport`].
//!
//! Every number is written with six significant digits (`{:.5e}`). Column
//! order is fixed per table. Timing rows carry a hardware disclaimer.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::ReportFormat;
use crate::error::{Result, TuqError};
use crate::study::StudyReport;

pub const TIMING_NOTE: &str =
    "wall-clock seconds on the machine that produced this file; compare ratios, not absolute values";

pub const TIMING_HEADER: [&str; 4] = ["section", "label", "evaluations", "seconds"];
pub const MOMENTS_HEADER: [&str; 5] = ["label", "quantity", "row", "col", "value"];
pub const ERRORS_HEADER: [&str; 4] = ["label", "reference", "mean_error", "covariance_error"];
pub const COVERAGE_HEADER: [&str; 5] = ["label", "contour", "k", "samples", "coverage_percent"];

/// Six significant digits.
pub fn sig6(v: f64) -> String {
    format!("{v:.5e}")
}

/// A parsed CSV table; lines starting with `#` are comments.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub comments: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        CsvTable { comments: Vec::new(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        out.push_str(&self.header.join(","));
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut comments = Vec::new();
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = loop {
            match lines.next() {
                Some(l) if l.starts_with('#') => comments.push(l.trim_start_matches('#').trim().to_string()),
                Some(l) => break l.split(',').map(str::to_string).collect::<Vec<_>>(),
                None => return Err(TuqError::config("csv table has no header")),
            }
        };
        let mut rows = Vec::new();
        for (i, l) in lines.enumerate() {
            let row: Vec<String> = l.split(',').map(str::to_string).collect();
            if row.len() != header.len() {
                return Err(TuqError::config(format!("csv row {} has {} fields, expected {}", i + 1, row.len(), header.len())));
            }
            rows.push(row);
        }
        Ok(CsvTable { comments, header, rows })
    }

    /// Column `name` parsed as numbers.
    pub fn column_f64(&self, name: &str) -> Result<Vec<f64>> {
        let j = self
            .header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| TuqError::config(format!("csv has no column {name}")))?;
        self.rows
            .iter()
            .map(|r| r[j].parse::<f64>().map_err(|e| TuqError::config(format!("column {name}: {e}"))))
            .collect()
    }
}

pub fn timing_table(r: &StudyReport) -> CsvTable {
    let mut t = CsvTable::new(&TIMING_HEADER);
    t.comments.push(format!("{TIMING_NOTE}; threads={}", r.threads));
    for c in &r.construction {
        t.push(vec!["construction".into(), c.label.clone(), "1".into(), sig6(c.seconds)]);
    }
    for m in &r.methods {
        let section = if m.propagator == crate::config::PropagatorKind::Direct { "direct" } else { "mapped" };
        t.push(vec![section.into(), m.label.clone(), m.evaluations.to_string(), sig6(m.eval_seconds)]);
    }
    t
}

pub fn moments_table(r: &StudyReport) -> CsvTable {
    let mut t = CsvTable::new(&MOMENTS_HEADER);
    for m in &r.methods {
        for (i, v) in m.moments.mean.iter().enumerate() {
            t.push(vec![m.label.clone(), "mean".into(), i.to_string(), "0".into(), sig6(*v)]);
        }
        let n = m.moments.cov.rows();
        for i in 0..n {
            for j in i..n {
                t.push(vec![m.label.clone(), "covariance".into(), i.to_string(), j.to_string(), sig6(m.moments.cov[(i, j)])]);
            }
        }
    }
    t
}

pub fn errors_table(r: &StudyReport) -> CsvTable {
    let mut t = CsvTable::new(&ERRORS_HEADER);
    if let Some(reference) = &r.reference_method {
        for m in r.methods.iter().filter(|m| &m.label != reference) {
            if let Some(e) = m.errors {
                t.push(vec![m.label.clone(), reference.clone(), sig6(e.mean), sig6(e.covariance)]);
            }
        }
    }
    t
}

pub fn coverage_table(r: &StudyReport) -> CsvTable {
    let mut t = CsvTable::new(&COVERAGE_HEADER);
    for m in &r.methods {
        for c in &m.coverage {
            t.push(vec![
                m.label.clone(),
                c.kind.label().into(),
                sig6(c.k),
                r.truth_points.len().to_string(),
                sig6(100.0 * c.coverage),
            ]);
        }
    }
    t
}

fn write(path: PathBuf, text: &str) -> Result<PathBuf> {
    std::fs::write(&path, text).map_err(|e| TuqError::io(&path, e))?;
    Ok(path)
}

/// Structured text: `[section]` headers, `key = value` pairs and aligned tables.
pub fn structured_text(r: &StudyReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario = {}", r.scenario);
    let _ = writeln!(out, "seed = {}", r.seed);
    let _ = writeln!(out, "threads = {}", r.threads);
    let _ = writeln!(out, "timing_note = {TIMING_NOTE}");
    if !r.diagnostics.is_empty() {
        out.push_str("\n[reference]\n");
        for (k, v) in &r.diagnostics {
            let _ = writeln!(out, "{k} = {}", sig6(*v));
        }
    }
    if !r.setup.is_empty() {
        out.push_str("\n[setup]\n");
        for s in &r.setup {
            let _ = writeln!(out, "{} = {}", s.label, sig6(s.seconds));
        }
    }
    for (name, table) in [
        ("timing", timing_table(r)),
        ("errors", errors_table(r)),
        ("coverage", coverage_table(r)),
    ] {
        let _ = writeln!(out, "\n[{name}]");
        let widths: Vec<usize> = (0..table.header.len())
            .map(|j| table.rows.iter().map(|row| row[j].len()).chain([table.header[j].len()]).max().unwrap_or(0))
            .collect();
        for row in std::iter::once(&table.header).chain(&table.rows) {
            let cells: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            let _ = writeln!(out, "{}", cells.join("  ").trim_end());
        }
    }
    out
}

/// Writes the report tables into `dir`, prefixed with the scenario name.
pub fn emit_report(r: &StudyReport, format: ReportFormat, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| TuqError::io(dir, e))?;
    let stem = &r.scenario;
    match format {
        ReportFormat::Csv => [
            ("timing", timing_table(r)),
            ("moments", moments_table(r)),
            ("errors", errors_table(r)),
            ("coverage", coverage_table(r)),
        ]
        .into_iter()
        .map(|(name, t)| write(dir.join(format!("{stem}_{name}.csv")), &t.to_csv()))
        .collect(),
        ReportFormat::Text => Ok(vec![write(dir.join(format!("{stem}_report.txt")), &structured_text(r))?]),
    }
}
