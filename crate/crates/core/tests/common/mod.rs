#![allow(dead_code)]

use std::sync::{Arc, OnceLock};

use adares::problem::LeastSquares;
use adares::{CompositeProblem, DesignMatrix, Regularizer};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    // Box–Muller, kept local so the oracle does not share code with the crate
    let u: f64 = rng.random_range(f64::EPSILON..1.0);
    let v: f64 = rng.random();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

pub fn gauss_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| gauss(rng)).collect()
}

/// Dense row-major matrix kept alongside the crate object for independent
/// evaluation.
pub struct Dense {
    pub m: usize,
    pub n: usize,
    pub rows: Vec<Vec<f64>>,
}

impl Dense {
    pub fn random(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Self {
        let rows = (0..m).map(|_| gauss_vec(rng, n)).collect();
        Dense { m, n, rows }
    }

    pub fn design(&self) -> Arc<DesignMatrix> {
        Arc::new(DesignMatrix::from_rows(&self.rows).unwrap())
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn mul_t(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (r, yi) in self.rows.iter().zip(y) {
            for (o, a) in out.iter_mut().zip(r) {
                *o += a * yi;
            }
        }
        out
    }

    pub fn frob_sq(&self) -> f64 {
        self.rows.iter().flatten().map(|a| a * a).sum()
    }
}

pub fn sq(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum()
}

pub fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, a| m.max(a.abs()))
}

/// `½‖Ax − b‖² + w‖x‖₁`
pub fn lasso_value(a: &Dense, b: &[f64], w: f64, x: &[f64]) -> f64 {
    let r: Vec<f64> = a.mul(x).iter().zip(b).map(|(p, q)| p - q).collect();
    0.5 * sq(&r) + w * x.iter().map(|v| v.abs()).sum::<f64>()
}

pub struct LassoCase {
    pub a: Dense,
    pub b: Vec<f64>,
    pub weight: f64,
    pub problem: CompositeProblem,
}

/// Random Lasso instance with the regularization weight a fraction of
/// `‖Aᵀb‖∞` so that the solution is neither zero nor dense.
pub fn random_lasso(seed: u64, m: usize, n: usize) -> LassoCase {
    let mut r = rng(seed);
    let a = Dense::random(&mut r, m, n);
    let b = gauss_vec(&mut r, m);
    let frac: f64 = r.random_range(0.01..0.5);
    let weight = frac * inf_norm(&a.mul_t(&b));
    let problem = CompositeProblem::lasso_with_weight(a.design(), b.clone(), weight).unwrap();
    LassoCase { a, b, weight, problem }
}

/// `½‖Ax − b‖²` with `ψ = 0` and `L = ‖A‖_F²`.
pub fn random_quadratic(seed: u64, m: usize, n: usize) -> (Dense, CompositeProblem) {
    let mut r = rng(seed);
    let a = Dense::random(&mut r, m, n);
    let b = gauss_vec(&mut r, m);
    let l = a.frob_sq();
    let smooth = LeastSquares::new(a.design(), b).unwrap();
    let p = CompositeProblem::with_scalar_l(Arc::new(smooth), Regularizer::Zero, l).unwrap();
    (a, p)
}

/// Root of `(1 − X)/X² = 1/θ²` on `(0, 1]` by bisection.
pub fn theta_oracle(theta: f64) -> f64 {
    let target = 1.0 / (theta * theta);
    let (mut lo, mut hi) = (f64::MIN_POSITIVE, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (1.0 - mid) / (mid * mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Smallest `K >= 1` with `(K + 1)² >= 4e/μ`, i.e. `K >= 2√(e/μ) − 1`.
pub fn k_oracle(mu: f64) -> usize {
    let need = 4.0 * std::f64::consts::E / mu;
    let mut k = ((need.sqrt() - 1.0).floor() as usize).max(1);
    while k > 1 && ((k as f64).powi(2)) >= need {
        k -= 1;
    }
    while ((k + 1) as f64).powi(2) < need {
        k += 1;
    }
    k
}

/// `θ_k` by iterating the bisection oracle, tabulated once.
pub fn theta_k_oracle(k: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = vec![1.0];
        for i in 0..THETA_TABLE_LEN {
            t.push(theta_oracle(t[i]));
        }
        t
    });
    table[k]
}

const THETA_TABLE_LEN: usize = 50_000;

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}
