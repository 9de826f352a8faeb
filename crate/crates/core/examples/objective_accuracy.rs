// Asking for F(x) - F* <= eps' instead of a small gradient mapping.

use adares::data_io::synth_strongly_convex;
use adares::restart::{eps_prime_mode, AdaResConfig};

pub fn run() -> adares::Result<()> {
    let fx = synth_strongly_convex(40, 500.0, 4)?;
    let x0 = vec![1.0; 40];
    for eps_prime in [1e-4, 1e-8] {
        let mut cfg = AdaResConfig::new(fx.mu_true / 2.0, 0.0);
        cfg.eps_prime = Some(eps_prime);
        let out = eps_prime_mode(&fx.problem, &x0, &cfg)?;
        let err = fx.problem.value(&out.x_hat) - fx.f_star();
        println!("eps' = {eps_prime:e}: F - F* = {err:.3e} after {} prox evals", out.n_hat);
    }
    Ok(())
}

fn main() -> adares::Result<()> {
    run()
}
