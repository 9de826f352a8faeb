//! Runs a grid of solvers over λ1 values and μ0 guesses and writes one
//! trace CSV per cell plus summary tables.

use std::path::PathBuf;
use std::process::ExitCode;

use adares::bench::{run_bench, BenchConfig, DataSource, ProblemKind, SolverKind, SyntheticLassoParams};
use adares::SchemeKind;
use clap::Parser;

#[derive(Parser, Debug)]
#[command(name = "adares-bench", version, about)]
struct Cli {
    /// lasso or logistic
    #[arg(long, default_value = "lasso")]
    problem: ProblemKind,
    /// LIBSVM file (.gz accepted). Without it a synthetic instance is generated.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Repeatable.
    #[arg(long = "lambda1", required = true)]
    lambda1: Vec<f64>,
    /// Ridge weight for logistic; defaults to L/(10n).
    #[arg(long)]
    lambda2: Option<f64>,
    /// Comma-separated subset of gd,fista,adares.
    #[arg(long, value_delimiter = ',', default_value = "gd,fista,adares")]
    solvers: Vec<SolverKind>,
    /// Repeatable; defaults to a decade sweep for the chosen problem.
    #[arg(long = "mu0")]
    mu0: Vec<f64>,
    /// Tolerance on the squared gradient-mapping norm.
    #[arg(long, default_value_t = 1e-10)]
    eps: f64,
    #[arg(long, default_value_t = 100_000)]
    max_prox_evals: usize,
    /// Seconds per cell.
    #[arg(long)]
    max_time: Option<f64>,
    /// Stop a cell once its primal-dual gap reaches this value.
    #[arg(long)]
    target_gap: Option<f64>,
    /// Use the smallest anchor bound over completed stages in C_s
    #[arg(long)]
    strict_test: bool,
    /// Check a halved μ against the current iterate before starting each stage
    #[arg(long)]
    pretest: bool,
    /// Inner accelerated scheme: fista or apg.
    #[arg(long, default_value = "fista")]
    scheme: SchemeKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "bench-out")]
    out: PathBuf,
    /// Record every inner AdaRES iterate.
    #[arg(long)]
    trace_inner: bool,
    #[arg(long, default_value_t = 10)]
    record_every: usize,
    /// Synthetic instance size (rows, columns) when --data is absent.
    #[arg(long, default_value_t = 500)]
    synth_m: usize,
    #[arg(long, default_value_t = 100)]
    synth_n: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let data = match (&cli.data, cli.problem) {
        (Some(path), _) => DataSource::Libsvm(path.clone()),
        (None, ProblemKind::Lasso) => DataSource::SyntheticLasso(SyntheticLassoParams {
            m: cli.synth_m,
            n: cli.synth_n,
            ..Default::default()
        }),
        (None, ProblemKind::Logistic) => DataSource::SyntheticLogistic {
            m: cli.synth_m,
            n: cli.synth_n,
            density: 0.1,
        },
    };
    let mut cfg = BenchConfig::new(cli.problem, data, cli.out);
    cfg.lambda1 = cli.lambda1;
    cfg.lambda2 = cli.lambda2;
    cfg.solvers = cli.solvers;
    if !cli.mu0.is_empty() {
        cfg.mu0 = cli.mu0;
    }
    cfg.eps = cli.eps;
    cfg.max_prox_evals = cli.max_prox_evals;
    cfg.max_time_s = cli.max_time;
    cfg.target_gap = cli.target_gap;
    cfg.strict_test = cli.strict_test;
    cfg.pretest = cli.pretest;
    cfg.scheme = cli.scheme;
    cfg.seed = cli.seed;
    cfg.trace_inner = cli.trace_inner;
    cfg.record_every = cli.record_every;

    match run_bench(&cfg) {
        Ok(summary) => {
            for c in &summary.cells {
                let mu = c.mu0.map(|m| format!(" mu0={m:e}")).unwrap_or_default();
                let gap = c.final_gap.map(|g| format!("{g:.3e}")).unwrap_or_else(|| "-".into());
                println!(
                    "{} lambda1={:e}{mu}: {} after {} prox evals, gap {gap}",
                    c.solver, c.lambda1, c.status, c.prox_evals
                );
                if let Some(e) = &c.error {
                    eprintln!("  error: {e}");
                }
            }
            println!("summary: {}", summary.tsv.display());
            if summary.failures() > 0 {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("adares-bench: {e}");
            ExitCode::FAILURE
        }
    }
}
