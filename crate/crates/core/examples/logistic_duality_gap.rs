// Sparse logistic regression with an elastic-net penalty, certified by the
// primal-dual gap.

use adares::data_io::synth_logistic;
use adares::restart::{ada_res, AdaResConfig};
use adares::CompositeProblem;

pub fn run() -> adares::Result<()> {
    let ds = synth_logistic(300, 80, 0.2, 5)?;
    for lambda1 in [10.0, 100.0] {
        let p = CompositeProblem::logistic(ds.a.clone(), ds.b.clone(), lambda1, None)?;
        let x0 = vec![0.0; p.dim()];
        let mut cfg = AdaResConfig::new(1e-2, 1e-12);
        cfg.target_gap = Some(1e-9);
        let out = ada_res(&p, &x0, &cfg)?;
        let rep = p.gap_oracle().expect("logistic problems carry a gap oracle").report(&out.x_hat);
        let nnz = out.x_hat.iter().filter(|v| **v != 0.0).count();
        println!(
            "lambda1 = {lambda1}: {:?} after {} prox evals, primal {:.8}, dual {:.8}, gap {:.2e}, {nnz}/{} nonzeros",
            out.status,
            out.n_hat,
            rep.primal,
            rep.dual,
            rep.gap,
            p.dim()
        );
    }
    Ok(())
}

fn main() -> adares::Result<()> {
    run()
}
