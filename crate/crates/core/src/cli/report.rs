use std::collections::BTreeMap;
use std::fs::File;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::leapfrog::ConservationRecord;

/// One pass/fail assertion of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// `<=`, `>=`, `between` or `holds`.
    pub relation: &'static str,
    pub limit: f64,
    /// Lower end for `between` checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: "<=",
            limit,
            lower: None,
            passed: value <= limit,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: ">=",
            limit,
            lower: None,
            passed: value >= limit,
        }
    }

    /// `lo <= value <= hi`.
    pub fn between(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: "between",
            limit: hi,
            lower: Some(lo),
            passed: (lo..=hi).contains(&value),
        }
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            value: f64::from(u8::from(ok)),
            relation: "holds",
            limit: 1.0,
            lower: None,
            passed: ok,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesPoint {
    pub step: usize,
    pub t: f64,
    pub c_n: f64,
    pub c_half: f64,
}

impl From<&ConservationRecord> for SeriesPoint {
    fn from(r: &ConservationRecord) -> Self {
        Self {
            step: r.step,
            t: r.t,
            c_n: r.c_n,
            c_half: r.c_half,
        }
    }
}

/// Everything a run reports. Apart from `wall_time_s` the content depends only
/// on the resolved configuration.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub config: serde_json::Value,
    /// Conserved quantities at the recorded steps.
    pub series: Vec<SeriesPoint>,
    /// Relative drift of `C_n` and `C_{n+1/2}` where a single run is involved.
    pub drift: Option<[f64; 2]>,
    /// Final errors, audits and other scalar results.
    pub metrics: BTreeMap<String, f64>,
    /// Estimated convergence orders, finest last.
    pub orders: Vec<f64>,
    pub checks: Vec<Check>,
    /// Files written by the run.
    pub artifacts: Vec<PathBuf>,
    pub passed: bool,
    pub wall_time_s: f64,
}

impl RunReport {
    pub fn new(command: &str, config: &impl Serialize) -> Result<Self> {
        let config = serde_json::to_value(config).map_err(|e| Error::Config(e.to_string()))?;
        Ok(Self {
            command: command.to_string(),
            config,
            series: Vec::new(),
            drift: None,
            metrics: BTreeMap::new(),
            orders: Vec::new(),
            checks: Vec::new(),
            artifacts: Vec::new(),
            passed: true,
            wall_time_s: 0.0,
        })
    }

    pub fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.to_string(), value);
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn finish(&mut self) {
        self.passed = self.checks.iter().all(|c| c.passed);
    }
}

/// Where a run writes its files.
#[derive(Debug, Clone)]
pub struct Output {
    pub dir: PathBuf,
    pub tag: String,
}

impl Output {
    pub fn path(&self, suffix: &str, ext: &str) -> PathBuf {
        if suffix.is_empty() {
            self.dir.join(format!("{}.{ext}", self.tag))
        } else {
            self.dir.join(format!("{}_{suffix}.{ext}", self.tag))
        }
    }

    /// Relative paths are taken inside the output directory.
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.dir.join(p)
        }
    }

    pub fn csv(&self, suffix: &str, header: &[&str], report: &mut RunReport) -> Result<Table> {
        let path = self.path(suffix, "csv");
        let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
        w.write_record(header).map_err(csv_err)?;
        report.artifacts.push(path);
        Ok(Table {
            w,
            width: header.len(),
        })
    }
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Config(format!("csv: {other:?}")),
    }
}

/// A CSV file being written row by row. Floats use the shortest round-trip
/// representation, so equal runs give identical bytes.
pub struct Table {
    w: csv::Writer<File>,
    width: usize,
}

/// A CSV cell.
pub enum Cell {
    I(u64),
    F(f64),
    S(String),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::I(v as u64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::I(u64::from(v))
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::S(String::new()), Cell::F)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::S(v)
    }
}

impl Table {
    pub fn row(&mut self, cells: Vec<Cell>) -> Result<()> {
        debug_assert_eq!(cells.len(), self.width);
        let rec: Vec<String> = cells
            .into_iter()
            .map(|c| match c {
                Cell::I(v) => v.to_string(),
                Cell::F(v) => format!("{v:e}"),
                Cell::S(s) => s,
            })
            .collect();
        self.w.write_record(&rec).map_err(csv_err)
    }

    pub fn finish(mut self) -> Result<()> {
        self.w.flush().map_err(Error::Io)
    }
}

/// Writes conservation records as `step,t,C_n,C_half,<terms>,<audits>`.
pub fn write_series(
    out: &Output,
    records: &[ConservationRecord],
    term_names: [&str; 3],
    audit_names: &[&str],
    report: &mut RunReport,
) -> Result<()> {
    let mut header = vec!["step", "t", "C_n", "C_half"];
    header.extend(term_names);
    header.extend(audit_names);
    let mut t = out.csv("", &header, report)?;
    for r in records {
        let mut row: Vec<Cell> = vec![r.step.into(), r.t.into(), r.c_n.into(), r.c_half.into()];
        row.extend(r.terms.iter().map(|&x| Cell::from(x)));
        row.extend(r.audits.iter().map(|&x| Cell::from(x)));
        t.row(row)?;
    }
    t.finish()?;
    report.series = records.iter().map(SeriesPoint::from).collect();
    Ok(())
}
