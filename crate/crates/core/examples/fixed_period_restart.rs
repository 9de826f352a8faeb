// Restarting FISTA every K iterations contracts the distance to the
// solution for every K, fast or slow.

use adares::data_io::synth_strongly_convex;
use adares::restart::{contraction_factor, fixed_restart_observed};
use adares::SchemeKind;

pub fn run() -> adares::Result<()> {
    let fx = synth_strongly_convex(30, 1e3, 1)?;
    let x0 = vec![0.0; 30];
    let d0 = fx.dist_sq(&x0);
    println!("mu_F = {:.3e}", fx.mu_true);
    for k in [1, 10, 50, 200] {
        let mut last = d0;
        fixed_restart_observed(&fx.problem, &x0, k, 5, SchemeKind::Fista, |_, x| last = fx.dist_sq(x))?;
        let bound = contraction_factor(k, fx.mu_true).powi(5);
        println!("K = {k:>3}: dist^2 ratio after 5 restarts {:.3e} (bound {bound:.3e})", last / d0);
    }
    Ok(())
}

fn main() -> adares::Result<()> {
    run()
}
