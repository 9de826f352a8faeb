// Plugging a user-defined smooth term into the solvers: a separable
// Huber-type loss with an l1 penalty.

use std::sync::Arc;

use adares::restart::{ada_res, AdaResConfig};
use adares::{CompositeProblem, Regularizer, SmoothOracle};

/// `Σ_i w_i · sqrt(1 + (x_i − c_i)²)`, curvature at most `w_i`.
#[derive(Debug)]
struct PseudoHuber {
    w: Vec<f64>,
    c: Vec<f64>,
}

impl SmoothOracle for PseudoHuber {
    fn dim(&self) -> usize {
        self.w.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        (0..x.len()).map(|i| self.w[i] * (1.0 + (x[i] - self.c[i]).powi(2)).sqrt()).sum()
    }

    fn value_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let mut v = 0.0;
        for i in 0..x.len() {
            let d = x[i] - self.c[i];
            let s = (1.0 + d * d).sqrt();
            v += self.w[i] * s;
            grad[i] = self.w[i] * d / s;
        }
        v
    }
}

pub fn run() -> adares::Result<()> {
    let n = 8;
    let w: Vec<f64> = (1..=n).map(|i| i as f64).collect();
    let c: Vec<f64> = (0..n).map(|i| (i as f64 - 3.5) * 0.7).collect();
    let smooth = Arc::new(PseudoHuber { w: w.clone(), c });
    let p = CompositeProblem::new(smooth, Regularizer::l1(0.5)?, w)?;
    let out = ada_res(&p, &vec![0.0; n], &AdaResConfig::new(0.5, 1e-14))?;
    println!("x = {:.4?}", out.x_hat);
    println!("{} prox evals, {} stages", out.n_hat, out.stages.len());
    Ok(())
}

fn main() -> adares::Result<()> {
    run()
}
