//! Experiment grid: λ1 values × solvers (AdaRES expanded over μ0), one
//! trace CSV per cell plus `summary.tsv` and `summary.jsonl`.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data_io::{load_libsvm, synth_logistic, Dataset, SyntheticLasso};
use crate::error::{Error, Result};
use crate::problem::CompositeProblem;
use crate::restart::{ada_res, AdaResConfig};
use crate::schemes::{run_baseline, RunStatus, SchemeKind, StopRule};
use crate::trace::{emit_csv, RunTrace};

/// Environment variable holding the number of concurrent grid cells.
pub const WORKERS_ENV: &str = "ADARES_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Lasso,
    Logistic,
}

impl ProblemKind {
    /// Decade sweep used when no μ0 list is given.
    pub fn default_mu0(self) -> Vec<f64> {
        match self {
            ProblemKind::Lasso => vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5],
            ProblemKind::Logistic => vec![1e-2, 1e-3, 1e-4, 1e-5, 1e-6],
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            ProblemKind::Lasso => "lasso",
            ProblemKind::Logistic => "logistic",
        })
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lasso" => Ok(ProblemKind::Lasso),
            "logistic" => Ok(ProblemKind::Logistic),
            other => Err(Error::domain(format!("unknown problem {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Gd,
    Fista,
    Adares,
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            SolverKind::Gd => "gd",
            SolverKind::Fista => "fista",
            SolverKind::Adares => "adares",
        })
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gd" => Ok(SolverKind::Gd),
            "fista" => Ok(SolverKind::Fista),
            "adares" => Ok(SolverKind::Adares),
            other => Err(Error::domain(format!("unknown solver {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DataSource {
    Libsvm(PathBuf),
    SyntheticLasso(SyntheticLassoParams),
    SyntheticLogistic { m: usize, n: usize, density: f64 },
}

/// Serializable mirror of [`SyntheticLasso`] without the seed, which comes
/// from [`BenchConfig::seed`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticLassoParams {
    pub m: usize,
    pub n: usize,
    pub col_scale: f64,
    pub correlation: f64,
    pub support: usize,
    pub noise: f64,
}

impl Default for SyntheticLassoParams {
    fn default() -> Self {
        let d = SyntheticLasso::default();
        SyntheticLassoParams {
            m: d.m,
            n: d.n,
            col_scale: d.col_scale,
            correlation: d.correlation,
            support: d.support,
            noise: d.noise,
        }
    }
}

impl DataSource {
    pub fn load(&self, seed: u64) -> Result<Dataset> {
        match self {
            DataSource::Libsvm(path) => load_libsvm(path, None),
            DataSource::SyntheticLasso(s) => SyntheticLasso {
                m: s.m,
                n: s.n,
                col_scale: s.col_scale,
                correlation: s.correlation,
                support: s.support,
                noise: s.noise,
                seed,
            }
            .generate(),
            DataSource::SyntheticLogistic { m, n, density } => synth_logistic(*m, *n, *density, seed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub problem: ProblemKind,
    pub data: DataSource,
    pub lambda1: Vec<f64>,
    /// `None` selects `L / (10 n)`; ignored for Lasso.
    pub lambda2: Option<f64>,
    pub solvers: Vec<SolverKind>,
    pub mu0: Vec<f64>,
    pub eps: f64,
    pub max_prox_evals: usize,
    pub max_time_s: Option<f64>,
    /// Stop a cell once its recorded gap reaches this value.
    pub target_gap: Option<f64>,
    pub strict_test: bool,
    pub pretest: bool,
    /// Inner scheme for AdaRES and the accelerated baseline.
    pub scheme: SchemeKind,
    pub seed: u64,
    pub out: PathBuf,
    /// Baselines record every this many iterations.
    pub record_every: usize,
    /// AdaRES records every inner iterate instead of restart points only.
    pub trace_inner: bool,
    /// Concurrent cells; `None` reads [`WORKERS_ENV`], falling back to the
    /// number of CPUs.
    pub workers: Option<usize>,
}

impl BenchConfig {
    pub fn new(problem: ProblemKind, data: DataSource, out: impl Into<PathBuf>) -> Self {
        BenchConfig {
            problem,
            data,
            lambda1: Vec::new(),
            lambda2: None,
            solvers: vec![SolverKind::Gd, SolverKind::Fista, SolverKind::Adares],
            mu0: problem.default_mu0(),
            eps: 1e-10,
            max_prox_evals: 100_000,
            max_time_s: None,
            target_gap: None,
            strict_test: false,
            pretest: false,
            scheme: SchemeKind::Fista,
            seed: 0,
            out: out.into(),
            record_every: 10,
            trace_inner: false,
            workers: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.solvers.is_empty() {
            return Err(Error::domain("at least one solver is required"));
        }
        if self.lambda1.is_empty() || !self.lambda1.iter().all(|&l| l > 0.0 && l.is_finite()) {
            return Err(Error::domain("lambda1 values must be given and positive"));
        }
        if self.solvers.contains(&SolverKind::Adares) {
            if self.mu0.is_empty() {
                return Err(Error::domain("adares needs a nonempty mu0 list"));
            }
            if !self.mu0.iter().all(|&m| m > 0.0 && m.is_finite()) {
                return Err(Error::domain("mu0 values must be positive"));
            }
        }
        if !(self.eps > 0.0) {
            return Err(Error::domain("eps must be positive"));
        }
        if self.scheme == SchemeKind::ProxGrad {
            return Err(Error::domain("scheme must be fista or apg"));
        }
        if self.lambda2.is_some_and(|l| !(l > 0.0)) {
            return Err(Error::domain("lambda2 must be positive"));
        }
        Ok(())
    }

    /// Grid cells in output order.
    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for &lambda1 in &self.lambda1 {
            for &solver in &self.solvers {
                match solver {
                    SolverKind::Adares => cells.extend(self.mu0.iter().map(|&mu0| Cell {
                        lambda1,
                        solver,
                        mu0: Some(mu0),
                    })),
                    _ => cells.push(Cell {
                        lambda1,
                        solver,
                        mu0: None,
                    }),
                }
            }
        }
        cells
    }

    fn worker_count(&self) -> usize {
        self.workers
            .or_else(|| std::env::var(WORKERS_ENV).ok().and_then(|v| v.parse().ok()))
            .filter(|&w| w > 0)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub lambda1: f64,
    pub solver: SolverKind,
    pub mu0: Option<f64>,
}

impl Cell {
    pub fn file_stem(&self, problem: ProblemKind) -> String {
        match self.mu0 {
            Some(mu) => format!("{problem}_l{:e}_{}_mu{mu:e}", self.lambda1, self.solver),
            None => format!("{problem}_l{:e}_{}", self.lambda1, self.solver),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub problem: ProblemKind,
    pub lambda1: f64,
    pub solver: SolverKind,
    pub mu0: Option<f64>,
    /// `converged`, `target_gap`, `budget`, `time_limit` or `failed`.
    pub status: String,
    pub prox_evals: usize,
    pub s_hat: Option<usize>,
    pub halvings: Option<usize>,
    pub final_f: Option<f64>,
    pub final_gap: Option<f64>,
    pub final_grad_map_sq: Option<f64>,
    pub time_s: f64,
    pub csv: PathBuf,
    pub error: Option<String>,
}

impl CellResult {
    pub fn failed(&self) -> bool {
        self.status == "failed"
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSummary {
    pub cells: Vec<CellResult>,
    pub tsv: PathBuf,
    pub jsonl: PathBuf,
}

impl BenchSummary {
    pub fn failures(&self) -> usize {
        self.cells.iter().filter(|c| c.failed()).count()
    }
}

pub const SUMMARY_HEADER: &str =
    "problem\tlambda1\tsolver\tmu0\tstatus\tprox_evals\ts_hat\thalvings\tF\tgap\tgrad_map_sq\ttime_s\tcsv";

fn status_name(s: RunStatus) -> &'static str {
    match s {
        RunStatus::Converged => "converged",
        RunStatus::TargetGap => "target_gap",
        RunStatus::Budget => "budget",
        RunStatus::TimeLimit => "time_limit",
    }
}

/// Builds the problem for one λ1 value.
pub fn build_problem(cfg: &BenchConfig, ds: &Dataset, lambda1: f64) -> Result<CompositeProblem> {
    match cfg.problem {
        ProblemKind::Lasso => CompositeProblem::lasso(Arc::clone(&ds.a), ds.b.clone(), lambda1),
        ProblemKind::Logistic => {
            CompositeProblem::logistic(Arc::clone(&ds.a), ds.b.clone(), lambda1, cfg.lambda2)
        }
    }
}

struct Outcome {
    trace: RunTrace,
    status: Option<RunStatus>,
    s_hat: Option<usize>,
    halvings: Option<usize>,
    error: Option<String>,
}

fn run_cell(cfg: &BenchConfig, p: &CompositeProblem, cell: Cell) -> Outcome {
    let x0 = vec![0.0; p.dim()];
    let stop = StopRule {
        eps: Some(cfg.eps),
        target_gap: cfg.target_gap,
        max_prox_evals: cfg.max_prox_evals,
        max_time_s: cfg.max_time_s,
    };
    let baseline = |scheme, stop: &StopRule| match run_baseline(p, &x0, scheme, stop, cfg.record_every) {
        Ok(out) => Outcome {
            trace: out.trace,
            status: Some(out.status),
            s_hat: None,
            halvings: None,
            error: None,
        },
        Err(e) => failed(e),
    };
    match cell.solver {
        SolverKind::Gd => baseline(SchemeKind::ProxGrad, &stop),
        SolverKind::Fista => baseline(cfg.scheme, &stop),
        SolverKind::Adares => {
            let mut ac = AdaResConfig::new(cell.mu0.unwrap_or(1e-1), cfg.eps);
            ac.strict_test = cfg.strict_test;
            ac.pretest = cfg.pretest;
            ac.scheme = cfg.scheme;
            ac.max_prox_evals = Some(cfg.max_prox_evals);
            ac.max_time_s = cfg.max_time_s;
            ac.target_gap = cfg.target_gap;
            ac.trace_inner = cfg.trace_inner;
            match ada_res(p, &x0, &ac) {
                Ok(out) => Outcome {
                    s_hat: Some(out.s_hat),
                    halvings: Some(out.halvings),
                    trace: out.trace,
                    status: Some(out.status),
                    error: None,
                },
                Err(Error::BudgetExceeded { trace, .. }) => Outcome {
                    trace: *trace,
                    status: Some(RunStatus::Budget),
                    s_hat: None,
                    halvings: None,
                    error: None,
                },
                Err(e) => failed(e),
            }
        }
    }
}

fn failed(e: Error) -> Outcome {
    Outcome {
        trace: e.trace().cloned().unwrap_or_default(),
        status: None,
        s_hat: None,
        halvings: None,
        error: Some(e.to_string()),
    }
}

fn fmt_opt<T: fmt::Display>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn write_summary(cells: &[CellResult], tsv: &Path, jsonl: &Path) -> Result<()> {
    let mut t = String::new();
    t.push_str(SUMMARY_HEADER);
    t.push('\n');
    let mut j = String::new();
    for c in cells {
        t.push_str(&format!(
            "{}\t{:e}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.3}\t{}\n",
            c.problem,
            c.lambda1,
            c.solver,
            fmt_opt(c.mu0.map(|m| format!("{m:e}"))),
            c.status,
            c.prox_evals,
            fmt_opt(c.s_hat),
            fmt_opt(c.halvings),
            fmt_opt(c.final_f.map(|v| format!("{v:.10e}"))),
            fmt_opt(c.final_gap.map(|v| format!("{v:.3e}"))),
            fmt_opt(c.final_grad_map_sq.map(|v| format!("{v:.3e}"))),
            c.time_s,
            c.csv.display(),
        ));
        j.push_str(&serde_json::to_string(c).map_err(|e| Error::domain(e.to_string()))?);
        j.push('\n');
    }
    fs::write(tsv, t).map_err(|e| Error::io(tsv, e))?;
    fs::write(jsonl, j).map_err(|e| Error::io(jsonl, e))
}

/// Runs every cell of the grid. Individual cell failures are reported in
/// the summary; only configuration, data and output errors abort the run.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchSummary> {
    cfg.validate()?;
    let ds = cfg.data.load(cfg.seed)?;
    fs::create_dir_all(&cfg.out).map_err(|e| Error::io(&cfg.out, e))?;
    let config_path = cfg.out.join("config.json");
    let snapshot = serde_json::to_string_pretty(cfg).map_err(|e| Error::domain(e.to_string()))?;
    fs::File::create(&config_path)
        .and_then(|mut f| writeln!(f, "{snapshot}"))
        .map_err(|e| Error::io(&config_path, e))?;

    let problems = cfg
        .lambda1
        .iter()
        .map(|&l| build_problem(cfg, &ds, l))
        .collect::<Result<Vec<_>>>()?;
    let cells = cfg.cells();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.worker_count())
        .build()
        .map_err(|e| Error::domain(e.to_string()))?;

    let results: Vec<CellResult> = pool.install(|| {
        cells
            .par_iter()
            .map(|&cell| {
                let idx = cfg.lambda1.iter().position(|&l| l == cell.lambda1).unwrap_or(0);
                let p = &problems[idx];
                let mut out = run_cell(cfg, p, cell);
                let snapshot = serde_json::json!({
                    "problem": cfg.problem,
                    "cell": cell,
                    "eps": cfg.eps,
                    "seed": cfg.seed,
                    "scheme": cfg.scheme,
                });
                out.trace.config = snapshot;
                let csv = cfg.out.join(format!("{}.csv", cell.file_stem(cfg.problem)));
                let mut error = out.error;
                if let Err(e) = emit_csv(&out.trace, &csv) {
                    error.get_or_insert(e.to_string());
                }
                let last = out.trace.last().copied();
                CellResult {
                    problem: cfg.problem,
                    lambda1: cell.lambda1,
                    solver: cell.solver,
                    mu0: cell.mu0,
                    status: match (&error, out.status) {
                        (None, Some(s)) => status_name(s).to_string(),
                        _ => "failed".to_string(),
                    },
                    prox_evals: last.map_or(0, |r| r.prox_evals),
                    s_hat: out.s_hat,
                    halvings: out.halvings,
                    final_f: last.map(|r| r.f),
                    final_gap: last.and_then(|r| r.gap),
                    final_grad_map_sq: last.map(|r| r.grad_map_sq),
                    time_s: last.map_or(0.0, |r| r.time_s),
                    csv,
                    error,
                }
            })
            .collect()
    });

    let tsv = cfg.out.join("summary.tsv");
    let jsonl = cfg.out.join("summary.jsonl");
    write_summary(&results, &tsv, &jsonl)?;
    Ok(BenchSummary {
        cells: results,
        tsv,
        jsonl,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(out: &Path) -> BenchConfig {
        let data = DataSource::SyntheticLasso(SyntheticLassoParams {
            m: 30,
            n: 10,
            support: 3,
            ..Default::default()
        });
        let mut cfg = BenchConfig::new(ProblemKind::Lasso, data, out);
        cfg.lambda1 = vec![10.0];
        cfg.eps = 1e-6;
        cfg.workers = Some(1);
        cfg
    }

    #[test]
    fn grid_shape() {
        let mut cfg = tiny(Path::new("unused"));
        cfg.lambda1 = vec![1e4, 1e5, 1e6];
        cfg.solvers = vec![SolverKind::Adares];
        assert_eq!(cfg.cells().len(), 15);
        cfg.solvers = vec![SolverKind::Gd, SolverKind::Fista, SolverKind::Adares];
        assert_eq!(cfg.cells().len(), 21);
        assert_eq!(ProblemKind::Logistic.default_mu0().len(), 5);
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = tiny(Path::new("unused"));
        cfg.solvers.clear();
        assert!(cfg.validate().is_err());
        let mut cfg = tiny(Path::new("unused"));
        cfg.mu0.clear();
        assert!(cfg.validate().is_err());
        cfg.solvers = vec![SolverKind::Gd];
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn gd_only_run_has_descending_objective() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = tiny(dir.path());
        cfg.solvers = vec![SolverKind::Gd];
        let summary = run_bench(&cfg).unwrap();
        assert_eq!(summary.cells.len(), 1);
        assert_eq!(summary.failures(), 0);
        let recs = crate::trace::parse_csv(&summary.cells[0].csv).unwrap();
        assert!(!recs.is_empty());
        assert!(recs.windows(2).all(|w| w[1].f <= w[0].f + 1e-12));
        assert!(summary.tsv.exists() && summary.jsonl.exists());
    }

    #[test]
    fn unreadable_dataset() {
        let mut cfg = tiny(Path::new("unused"));
        cfg.data = DataSource::Libsvm("/nonexistent/data.svm".into());
        assert!(matches!(run_bench(&cfg), Err(Error::Io { .. })));
    }
}
