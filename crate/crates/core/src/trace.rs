//! Convergence traces and their CSV representation.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "prox_evals,time_s,F,grad_map_sq,gap,stage,mu_s";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    /// Cumulative proximal-gradient mappings charged to the solver.
    pub prox_evals: usize,
    pub time_s: f64,
    #[serde(rename = "F")]
    pub f: f64,
    pub grad_map_sq: f64,
    /// Primal–dual gap, when the problem carries a gap oracle.
    pub gap: Option<f64>,
    pub stage: usize,
    /// Current error-bound estimate; 0 for solvers that do not use one.
    pub mu_s: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub solver_id: String,
    pub config: serde_json::Value,
    pub records: Vec<TraceRecord>,
}

impl RunTrace {
    pub fn new(solver_id: impl Into<String>) -> Self {
        RunTrace {
            solver_id: solver_id.into(),
            config: serde_json::Value::Null,
            records: Vec::new(),
        }
    }

    pub fn with_config(mut self, config: serde_json::Value) -> Self {
        self.config = config;
        self
    }

    /// Appends a record. A record at an evaluation count not beyond the
    /// last one replaces nothing and is dropped, keeping counts strictly
    /// increasing.
    pub fn push(&mut self, rec: TraceRecord) {
        if self.records.last().is_some_and(|last| rec.prox_evals <= last.prox_evals) {
            return;
        }
        self.records.push(rec);
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// First evaluation count at which the recorded gap is `<= target`.
    pub fn evals_to_gap(&self, target: f64) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.gap.is_some_and(|g| g <= target))
            .map(|r| r.prox_evals)
    }

    pub fn to_csv_string(&self) -> String {
        let mut s = String::with_capacity(64 * (self.records.len() + 1));
        s.push_str(CSV_HEADER);
        s.push('\n');
        for r in &self.records {
            let gap = r.gap.map(fmt_f64).unwrap_or_default();
            s.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.prox_evals,
                fmt_f64(r.time_s),
                fmt_f64(r.f),
                fmt_f64(r.grad_map_sq),
                gap,
                r.stage,
                fmt_f64(r.mu_s)
            ));
        }
        s
    }
}

/// 17 significant digits, `.` decimal separator.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `trace` as CSV with [`CSV_HEADER`] and `\n` line endings.
pub fn emit_csv(trace: &RunTrace, path: &Path) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(trace.to_csv_string().as_bytes())
        .map_err(|e| Error::io(path, e))
}

pub fn parse_csv_str(text: &str, origin: &str) -> Result<Vec<TraceRecord>> {
    let perr = |line: usize, msg: String| Error::Parse {
        path: origin.to_string(),
        line,
        msg,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == CSV_HEADER => {}
        _ => return Err(perr(1, "missing or unexpected header".into())),
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        let ln = i + 1;
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 7 {
            return Err(perr(ln, format!("expected 7 columns, got {}", cols.len())));
        }
        let f = |s: &str| s.parse::<f64>().map_err(|e| perr(ln, format!("{s:?}: {e}")));
        let u = |s: &str| s.parse::<usize>().map_err(|e| perr(ln, format!("{s:?}: {e}")));
        out.push(TraceRecord {
            prox_evals: u(cols[0])?,
            time_s: f(cols[1])?,
            f: f(cols[2])?,
            grad_map_sq: f(cols[3])?,
            gap: if cols[4].is_empty() { None } else { Some(f(cols[4])?) },
            stage: u(cols[5])?,
            mu_s: f(cols[6])?,
        });
    }
    Ok(out)
}

pub fn parse_csv(path: &Path) -> Result<Vec<TraceRecord>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv_str(&text, &path.display().to_string())
}

/// Wall clock started when a solver run begins.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Stopwatch(Instant);

impl Stopwatch {
    pub(crate) fn start() -> Self {
        Stopwatch(Instant::now())
    }

    pub(crate) fn secs(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}
