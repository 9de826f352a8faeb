// Lasso on a random regression instance: adaptive restart from several
// initial guesses of μ against plain FISTA.

use adares::data_io::SyntheticLasso;
use adares::restart::{ada_res, AdaResConfig};
use adares::schemes::{run_baseline, SchemeKind, StopRule};
use adares::CompositeProblem;

pub fn run() -> adares::Result<()> {
    let ds = SyntheticLasso { m: 200, n: 50, seed: 7, ..Default::default() }.generate()?;
    let p = CompositeProblem::lasso(ds.a.clone(), ds.b.clone(), 100.0)?;
    let x0 = vec![0.0; p.dim()];
    let eps = 1e-14;

    let stop = StopRule { eps: Some(eps), ..Default::default() };
    let fista = run_baseline(&p, &x0, SchemeKind::Fista, &stop, 1)?;
    let last = fista.trace.last().expect("at least one record");
    println!("fista: {} prox evals, F = {:.10}, gap = {:.2e}", last.prox_evals, last.f, last.gap.unwrap_or(f64::NAN));

    for mu0 in [1e-1, 1e-2, 1e-3, 1e-4] {
        let out = ada_res(&p, &x0, &AdaResConfig::new(mu0, eps))?;
        let gap = p.gap_oracle().map_or(f64::NAN, |g| g.gap(&out.x_hat));
        println!(
            "adares mu0 = {mu0:e}: {} prox evals, {} stages, final mu = {:e}, gap = {gap:.2e}",
            out.n_hat,
            out.stages.len(),
            out.stages.last().map_or(mu0, |s| s.mu),
        );
    }
    Ok(())
}

fn main() -> adares::Result<()> {
    run()
}
