// A small experiment grid written to a directory of CSV traces.

use adares::bench::{run_bench, BenchConfig, DataSource, ProblemKind, SyntheticLassoParams};

pub fn run() -> adares::Result<()> {
    let out = std::env::temp_dir().join(format!("adares-grid-{}", std::process::id()));
    let data = DataSource::SyntheticLasso(SyntheticLassoParams { m: 100, n: 20, ..Default::default() });
    let mut cfg = BenchConfig::new(ProblemKind::Lasso, data, &out);
    cfg.lambda1 = vec![10.0, 1000.0];
    cfg.mu0 = vec![1e-1, 1e-3];
    cfg.eps = 1e-9;
    cfg.target_gap = Some(1e-8);
    let summary = run_bench(&cfg)?;
    for c in &summary.cells {
        println!(
            "{:<7} lambda1={:<6} mu0={:<6} {:<10} {:>6} evals",
            c.solver,
            c.lambda1,
            c.mu0.map(|m| m.to_string()).unwrap_or_default(),
            c.status,
            c.prox_evals
        );
    }
    println!("{} cells, {} failed; summary in {}", summary.cells.len(), summary.failures(), summary.tsv.display());
    std::fs::remove_dir_all(&out).ok();
    Ok(())
}

fn main() -> adares::Result<()> {
    run()
}
