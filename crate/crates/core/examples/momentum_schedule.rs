// The momentum sequence θ_k and the restart period K(μ).

use adares::restart::{k_of_mu, theta_sq_at_period};
use adares::theta::{theta_next, ThetaState};

pub fn run() -> adares::Result<()> {
    for (k, th) in ThetaState::new().take(6).enumerate() {
        println!("theta_{k} = {th:.12}");
    }
    println!("theta after 0.5 = {:.12}", theta_next(0.5)?);
    for mu in [1.0, 1e-1, 1e-2, 1e-4, 1e-6] {
        let k = k_of_mu(mu)?;
        println!("mu = {mu:e}: K = {k}, theta_(K-1)^2 / mu = {:.4}", theta_sq_at_period(k) / mu);
    }
    Ok(())
}

fn main() -> adares::Result<()> {
    run()
}
