//! Computable optimality certificates: the gradient-mapping norm and the
//! primal–dual gap for `min g(Ax) + ψ(x)`.
//!
//! With dual `G(y) = −ψ*(Aᵀy) − g*(−y)`, the gap at `x` is evaluated at
//! `y = −α(x)∇g(Ax)`, where `α(x) ∈ [0, 1]` is the largest scaling that keeps
//! `G` finite.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, norm1, norm_inf, norm_sq, sigmoid, softplus, weighted_dist_sq};
use crate::matrix::DesignMatrix;
use crate::problem::{soft_threshold, CompositeProblem, Regularizer};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    /// `F(x)`
    pub primal: f64,
    /// `G(y)` at the scaled dual candidate
    pub dual: f64,
    pub alpha: f64,
    pub gap: f64,
    /// `‖T(x) − x‖²_L`
    pub grad_map_sq: f64,
}

/// Problem-specific primal–dual gap evaluation.
pub trait DualGap: Send + Sync + fmt::Debug {
    fn report(&self, x: &[f64]) -> GapReport;

    fn gap(&self, x: &[f64]) -> f64 {
        self.report(x).gap
    }
}

/// `‖T(x) − x‖²_L`. Costs one proximal-gradient mapping.
pub fn grad_map_norm_sq(p: &CompositeProblem, x: &[f64]) -> Result<f64> {
    p.check_point(x)?;
    Ok(p.dist_sq(&p.t_map(x), x))
}

/// `g*(u) = ½‖u‖² + ⟨b, u⟩` for `g(z) = ½‖z − b‖²`.
pub fn least_squares_conjugate(b: &[f64], u: &[f64]) -> f64 {
    0.5 * norm_sq(u) + dot(b, u)
}

fn xlogx(q: f64) -> f64 {
    if q == 0.0 {
        0.0
    } else {
        q * q.ln()
    }
}

/// Conjugate of `g(z) = c Σ_j log(1 + exp(b_j z_j))`.
///
/// Per coordinate, with `q = u_j / (c b_j)`: `c (q ln q + (1 − q) ln(1 − q))`
/// on `q ∈ [0, 1]`, `+∞` outside, using `0 ln 0 = 0` at the boundary.
pub fn logistic_conjugate(b: &[f64], c: f64, u: &[f64]) -> f64 {
    let mut s = 0.0;
    for (&bj, &uj) in b.iter().zip(u) {
        if bj == 0.0 {
            if uj != 0.0 {
                return f64::INFINITY;
            }
            s -= c * std::f64::consts::LN_2;
            continue;
        }
        let q = uj / (c * bj);
        if !(0.0..=1.0).contains(&q) {
            return f64::INFINITY;
        }
        s += c * (xlogx(q) + xlogx(1.0 - q));
    }
    s
}

/// `ψ*(u)` for the built-in regularizers (`+∞` off the domain).
pub fn regularizer_conjugate(reg: Regularizer, u: &[f64]) -> f64 {
    let indicator = |ok: bool| if ok { 0.0 } else { f64::INFINITY };
    match reg {
        Regularizer::Zero => indicator(u.iter().all(|v| *v == 0.0)),
        Regularizer::L1 { lambda } => indicator(norm_inf(u) <= lambda),
        Regularizer::ElasticNet { l1, l2 } if l2 > 0.0 => u
            .iter()
            .map(|v| {
                let e = (v.abs() - l1).max(0.0);
                e * e / (2.0 * l2)
            })
            .sum(),
        Regularizer::ElasticNet { l1, .. } => indicator(norm_inf(u) <= l1),
    }
}

/// Gap oracle for `½‖Ax − b‖² + λ‖x‖₁` with `L = trace(AᵀA)`.
#[derive(Debug, Clone)]
pub struct LassoGap {
    a: Arc<DesignMatrix>,
    b: Vec<f64>,
    lambda: f64,
    l: f64,
}

impl LassoGap {
    pub fn new(a: Arc<DesignMatrix>, b: Vec<f64>, lambda: f64) -> Result<Self> {
        check_dim("lasso targets", a.rows(), b.len())?;
        if !(lambda >= 0.0) {
            return Err(Error::domain("lasso weight must be >= 0"));
        }
        let l = crate::problem::lipschitz_scalar_lasso(&a)?;
        Ok(LassoGap { a, b, lambda, l })
    }
}

impl DualGap for LassoGap {
    fn report(&self, x: &[f64]) -> GapReport {
        let mut r = self.a.matvec(x);
        r.iter_mut().zip(&self.b).for_each(|(ri, bi)| *ri -= bi);
        let atr = self.a.matvec_t(&r);
        let primal = 0.5 * norm_sq(&r) + self.lambda * norm1(x);

        let s = norm_inf(&atr);
        let alpha = if s == 0.0 { 1.0 } else { (self.lambda / s).min(1.0) };
        // −y = α r, ψ*(Aᵀy) = 0 on the feasible set
        let dual = -(0.5 * alpha * alpha * norm_sq(&r) + alpha * dot(&self.b, &r));

        let grad_map_sq = x
            .iter()
            .zip(&atr)
            .map(|(&xi, &gi)| {
                let d = soft_threshold(xi - gi / self.l, self.lambda / self.l) - xi;
                self.l * d * d
            })
            .sum();

        GapReport {
            primal,
            dual,
            alpha,
            gap: primal - dual,
            grad_map_sq,
        }
    }
}

/// Gap oracle for `c Σ log(1 + exp(b_j a_jᵀx)) + w‖x‖₁ + (λ2/2)‖x‖²`.
///
/// `λ2 > 0` makes `ψ*` finite everywhere, so `α(x) = 1`.
#[derive(Debug, Clone)]
pub struct LogisticGap {
    a: Arc<DesignMatrix>,
    b: Vec<f64>,
    c: f64,
    l1: f64,
    l2: f64,
    l: f64,
}

impl LogisticGap {
    pub fn new(a: Arc<DesignMatrix>, b: Vec<f64>, c: f64, l1: f64, l2: f64) -> Result<Self> {
        check_dim("logistic labels", a.rows(), b.len())?;
        if l2 <= 0.0 {
            return Err(Error::Unsupported(
                "logistic gap needs lambda2 > 0 (the conjugate domain changes at 0)".into(),
            ));
        }
        if !(c > 0.0 && l1 >= 0.0) {
            return Err(Error::domain("logistic scale must be > 0 and l1 weight >= 0"));
        }
        let mut s = 0.0;
        for (j, &bj) in b.iter().enumerate() {
            let row_sq: f64 = a.row_entries(j).iter().map(|(_, v)| v * v).sum();
            s += bj * bj * row_sq;
        }
        let l = 0.25 * c * s;
        if l <= 0.0 {
            return Err(Error::domain("logistic smoothness bound is zero"));
        }
        Ok(LogisticGap { a, b, c, l1, l2, l })
    }
}

impl DualGap for LogisticGap {
    fn report(&self, x: &[f64]) -> GapReport {
        let mut t = self.a.matvec(x);
        t.iter_mut().zip(&self.b).for_each(|(tj, bj)| *tj *= bj);
        // ∇g(Ax)_j = c b_j σ(t_j)
        let grad_g: Vec<f64> = t.iter().zip(&self.b).map(|(tj, bj)| self.c * bj * sigmoid(*tj)).collect();
        let grad_f = self.a.matvec_t(&grad_g);

        let primal = self.c * t.iter().map(|&tj| softplus(tj)).sum::<f64>()
            + self.l1 * norm1(x)
            + 0.5 * self.l2 * norm_sq(x);

        // g*(∇g(z)) with q = σ(t): q ln q + (1 − q) ln(1 − q) = −q sp(−t) − (1 − q) sp(t)
        let g_conj: f64 = t
            .iter()
            .map(|&tj| {
                let q = sigmoid(tj);
                -self.c * (q * softplus(-tj) + (1.0 - q) * softplus(tj))
            })
            .sum();
        // Aᵀy = −∇f(x); ψ* is even
        let psi_conj = regularizer_conjugate(Regularizer::ElasticNet { l1: self.l1, l2: self.l2 }, &grad_f);
        let dual = -psi_conj - g_conj;

        let reg = Regularizer::ElasticNet { l1: self.l1, l2: self.l2 };
        let grad_map_sq = x
            .iter()
            .zip(&grad_f)
            .map(|(&xi, &gi)| {
                let d = reg.prox_coord(xi - gi / self.l, self.l) - xi;
                self.l * d * d
            })
            .sum();

        GapReport {
            primal,
            dual,
            alpha: 1.0,
            gap: primal - dual,
            grad_map_sq,
        }
    }
}

/// Lasso gap report at `x` for `½‖Ax − b‖² + λ‖x‖₁`.
pub fn dual_gap_lasso(a: &DesignMatrix, b: &[f64], lambda: f64, x: &[f64]) -> Result<GapReport> {
    check_dim("lasso point", a.cols(), x.len())?;
    Ok(LassoGap::new(Arc::new(a.clone()), b.to_vec(), lambda)?.report(x))
}

/// Logistic gap report at `x` for `c Σ log(1 + exp(b_j a_jᵀx)) + w‖x‖₁ + (λ2/2)‖x‖²`.
pub fn dual_gap_logistic(
    a: &DesignMatrix,
    b: &[f64],
    c: f64,
    l1_weight: f64,
    lambda2: f64,
    x: &[f64],
) -> Result<GapReport> {
    check_dim("logistic point", a.cols(), x.len())?;
    Ok(LogisticGap::new(Arc::new(a.clone()), b.to_vec(), c, l1_weight, lambda2)?.report(x))
}

/// Distance-weighted helper used by tests and examples: `‖x − y‖²_L`.
pub fn dist_sq_l(p: &CompositeProblem, x: &[f64], y: &[f64]) -> f64 {
    weighted_dist_sq(x, y, p.weights())
}
