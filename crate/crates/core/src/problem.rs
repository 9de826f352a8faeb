//! Composite problems `F = f + ψ`: smooth oracles, separable regularizers
//! with weighted proximal operators, and per-coordinate smoothness weights.

use std::fmt;
use std::sync::Arc;

use crate::certificates::{DualGap, LassoGap, LogisticGap};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, norm1, norm_inf, norm_sq, sigmoid, softplus};
use crate::matrix::DesignMatrix;

/// Differentiable convex part `f` of the objective.
pub trait SmoothOracle: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    /// Writes `∇f(x)` into `grad` and returns `f(x)`.
    fn value_grad(&self, x: &[f64], grad: &mut [f64]) -> f64;

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim()];
        self.value_grad(x, &mut g);
        g
    }
}

/// `f(x) = ½‖Ax − b‖²`.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub a: Arc<DesignMatrix>,
    pub b: Vec<f64>,
}

impl LeastSquares {
    pub fn new(a: Arc<DesignMatrix>, b: Vec<f64>) -> Result<Self> {
        check_dim("least squares targets", a.rows(), b.len())?;
        Ok(LeastSquares { a, b })
    }

    fn residual(&self, x: &[f64]) -> Vec<f64> {
        let mut r = self.a.matvec(x);
        r.iter_mut().zip(&self.b).for_each(|(ri, bi)| *ri -= bi);
        r
    }
}

impl SmoothOracle for LeastSquares {
    fn dim(&self) -> usize {
        self.a.cols()
    }

    fn value(&self, x: &[f64]) -> f64 {
        0.5 * norm_sq(&self.residual(x))
    }

    fn value_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let r = self.residual(x);
        self.a.matvec_t_into(&r, grad);
        0.5 * norm_sq(&r)
    }
}

/// `f(x) = c Σ_j log(1 + exp(b_j a_jᵀx))`.
///
/// The sign inside the exponential is `+b_j`; labels are used as given.
#[derive(Debug, Clone)]
pub struct Logistic {
    pub a: Arc<DesignMatrix>,
    pub b: Vec<f64>,
    pub c: f64,
}

impl Logistic {
    pub fn new(a: Arc<DesignMatrix>, b: Vec<f64>, c: f64) -> Result<Self> {
        check_dim("logistic labels", a.rows(), b.len())?;
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::domain(format!("logistic scale must be positive, got {c}")));
        }
        Ok(Logistic { a, b, c })
    }

    /// Margins `t_j = b_j a_jᵀx`.
    pub fn margins(&self, x: &[f64]) -> Vec<f64> {
        let mut t = self.a.matvec(x);
        t.iter_mut().zip(&self.b).for_each(|(tj, bj)| *tj *= bj);
        t
    }
}

impl SmoothOracle for Logistic {
    fn dim(&self) -> usize {
        self.a.cols()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.c * self.margins(x).into_iter().map(softplus).sum::<f64>()
    }

    fn value_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let t = self.margins(x);
        let w: Vec<f64> = t.iter().zip(&self.b).map(|(tj, bj)| self.c * sigmoid(*tj) * bj).collect();
        self.a.matvec_t_into(&w, grad);
        self.c * t.into_iter().map(softplus).sum::<f64>()
    }
}

/// Separable regularizers with closed-form weighted proximal operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularizer {
    Zero,
    /// `λ‖x‖₁`
    L1 { lambda: f64 },
    /// `λ1‖x‖₁ + (λ2/2)‖x‖²`
    ElasticNet { l1: f64, l2: f64 },
}

impl Regularizer {
    pub fn l1(lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::domain(format!("l1 weight must be >= 0, got {lambda}")));
        }
        Ok(Regularizer::L1 { lambda })
    }

    pub fn elastic_net(l1: f64, l2: f64) -> Result<Self> {
        if !(l1 >= 0.0 && l2 >= 0.0 && l1.is_finite() && l2.is_finite()) {
            return Err(Error::domain(format!(
                "elastic net weights must be >= 0, got ({l1}, {l2})"
            )));
        }
        Ok(Regularizer::ElasticNet { l1, l2 })
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match *self {
            Regularizer::Zero => 0.0,
            Regularizer::L1 { lambda } => lambda * norm1(x),
            Regularizer::ElasticNet { l1, l2 } => l1 * norm1(x) + 0.5 * l2 * norm_sq(x),
        }
    }

    /// One coordinate of `argmin_y ½ v (x − y)² + ψ_i(y)`.
    #[inline]
    pub fn prox_coord(&self, x: f64, v: f64) -> f64 {
        match *self {
            Regularizer::Zero => x,
            Regularizer::L1 { lambda } => soft_threshold(x, lambda / v),
            Regularizer::ElasticNet { l1, l2 } => soft_threshold(x, l1 / v) * (v / (v + l2)),
        }
    }

    /// `prox_{v,ψ}(x) = argmin_y ½‖x − y‖²_v + ψ(y)`.
    pub fn prox(&self, v: &[f64], x: &[f64]) -> Result<Vec<f64>> {
        check_dim("prox weights", x.len(), v.len())?;
        check_weights(v)?;
        Ok(x.iter().zip(v).map(|(&xi, &vi)| self.prox_coord(xi, vi)).collect())
    }
}

#[inline]
pub fn soft_threshold(x: f64, tau: f64) -> f64 {
    if x > tau {
        x - tau
    } else if x < -tau {
        x + tau
    } else {
        0.0
    }
}

fn check_weights(v: &[f64]) -> Result<()> {
    if let Some(bad) = v.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
        return Err(Error::domain(format!("weights must be positive and finite, got {bad}")));
    }
    Ok(())
}

/// `F = f + ψ` with smoothness weights `L` (one per coordinate).
#[derive(Clone)]
pub struct CompositeProblem {
    smooth: Arc<dyn SmoothOracle>,
    reg: Regularizer,
    l: Vec<f64>,
    gap: Option<Arc<dyn DualGap>>,
}

impl fmt::Debug for CompositeProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CompositeProblem")
            .field("smooth", &self.smooth)
            .field("reg", &self.reg)
            .field("dim", &self.l.len())
            .field("has_gap", &self.gap.is_some())
            .finish()
    }
}

impl CompositeProblem {
    pub fn new(smooth: Arc<dyn SmoothOracle>, reg: Regularizer, l: Vec<f64>) -> Result<Self> {
        check_dim("smoothness weights", smooth.dim(), l.len())?;
        check_weights(&l)?;
        Ok(CompositeProblem {
            smooth,
            reg,
            l,
            gap: None,
        })
    }

    /// Same as [`CompositeProblem::new`] with a scalar `L` broadcast to every
    /// coordinate.
    pub fn with_scalar_l(smooth: Arc<dyn SmoothOracle>, reg: Regularizer, l: f64) -> Result<Self> {
        let n = smooth.dim();
        Self::new(smooth, reg, vec![l; n])
    }

    /// Attach a primal–dual gap oracle used when recording traces.
    pub fn with_gap(mut self, gap: Arc<dyn DualGap>) -> Self {
        self.gap = Some(gap);
        self
    }

    /// `½‖Ax − b‖² + (‖Aᵀb‖∞ / λ1)‖x‖₁` with `L = trace(AᵀA)`.
    pub fn lasso(a: Arc<DesignMatrix>, b: Vec<f64>, lambda1: f64) -> Result<Self> {
        if !(lambda1 > 0.0) {
            return Err(Error::domain("lambda1 must be positive"));
        }
        let weight = norm_inf(&a.matvec_t(&b)) / lambda1;
        Self::lasso_with_weight(a, b, weight)
    }

    /// `½‖Ax − b‖² + weight·‖x‖₁` with `L = trace(AᵀA)`.
    pub fn lasso_with_weight(a: Arc<DesignMatrix>, b: Vec<f64>, weight: f64) -> Result<Self> {
        let l = lipschitz_scalar_lasso(&a)?;
        let gap = LassoGap::new(a.clone(), b.clone(), weight)?;
        let smooth = LeastSquares::new(a, b)?;
        Ok(Self::with_scalar_l(Arc::new(smooth), Regularizer::l1(weight)?, l)?.with_gap(Arc::new(gap)))
    }

    /// `c Σ log(1 + exp(b_j a_jᵀx)) + ‖x‖₁ + (λ2/2)‖x‖²` with
    /// `c = λ1 / (2‖Aᵀb‖∞)` and `L` from [`lipschitz_scalar_logistic`].
    /// `lambda2 = None` selects `L / (10 n)`.
    pub fn logistic(
        a: Arc<DesignMatrix>,
        b: Vec<f64>,
        lambda1: f64,
        lambda2: Option<f64>,
    ) -> Result<Self> {
        let l = lipschitz_scalar_logistic(&a, &b, lambda1)?;
        let c = lambda1 / (2.0 * norm_inf(&a.matvec_t(&b)));
        let n = a.cols();
        let lambda2 = lambda2.unwrap_or(l / (10.0 * n as f64));
        let gap = LogisticGap::new(a.clone(), b.clone(), c, 1.0, lambda2)?;
        let smooth = Logistic::new(a, b, c)?;
        Ok(Self::with_scalar_l(Arc::new(smooth), Regularizer::elastic_net(1.0, lambda2)?, l)?
            .with_gap(Arc::new(gap)))
    }

    pub fn dim(&self) -> usize {
        self.l.len()
    }

    pub fn smooth(&self) -> &dyn SmoothOracle {
        self.smooth.as_ref()
    }

    pub fn regularizer(&self) -> Regularizer {
        self.reg
    }

    pub fn weights(&self) -> &[f64] {
        &self.l
    }

    pub fn gap_oracle(&self) -> Option<&dyn DualGap> {
        self.gap.as_deref()
    }

    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        check_dim("point", self.dim(), x.len())
    }

    /// `F(x) = f(x) + ψ(x)`.
    pub fn value(&self, x: &[f64]) -> f64 {
        self.smooth.value(x) + self.reg.value(x)
    }

    pub fn f_value(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        Ok(self.value(x))
    }

    /// `‖a − b‖²_L`.
    pub fn dist_sq(&self, a: &[f64], b: &[f64]) -> f64 {
        linalg::weighted_dist_sq(a, b, &self.l)
    }

    /// Proximal-gradient step from `x` given `grad = ∇f(x)`, with the
    /// quadratic term scaled by `scale` (1 for `T`, `θ_k` for APG's z-step
    /// anchored at `anchor`).
    pub(crate) fn prox_step_into(
        &self,
        anchor: &[f64],
        grad: &[f64],
        scale: f64,
        out: &mut [f64],
    ) {
        for i in 0..out.len() {
            let v = scale * self.l[i];
            out[i] = self.reg.prox_coord(anchor[i] - grad[i] / v, v);
        }
    }

    /// `T(x) = prox_{L,ψ}(x − ∇f(x)/L)`. Does not touch any evaluation
    /// counter; solvers do their own accounting.
    pub fn t_map(&self, x: &[f64]) -> Vec<f64> {
        let g = self.smooth.gradient(x);
        let mut out = vec![0.0; x.len()];
        self.prox_step_into(x, &g, 1.0, &mut out);
        out
    }
}

/// `(½‖Ax − b‖², Aᵀ(Ax − b))`.
pub fn least_squares_value_grad(a: &DesignMatrix, b: &[f64], x: &[f64]) -> Result<(f64, Vec<f64>)> {
    check_dim("least squares targets", a.rows(), b.len())?;
    check_dim("least squares point", a.cols(), x.len())?;
    let mut r = a.matvec(x);
    r.iter_mut().zip(b).for_each(|(ri, bi)| *ri -= bi);
    Ok((0.5 * norm_sq(&r), a.matvec_t(&r)))
}

/// Value and gradient of `c Σ log(1 + exp(b_j a_jᵀx))`.
pub fn logistic_value_grad(
    a: &DesignMatrix,
    b: &[f64],
    c: f64,
    x: &[f64],
) -> Result<(f64, Vec<f64>)> {
    check_dim("logistic point", a.cols(), x.len())?;
    let oracle = Logistic::new(Arc::new(a.clone()), b.to_vec(), c)?;
    let mut g = vec![0.0; x.len()];
    let v = oracle.value_grad(x, &mut g);
    Ok((v, g))
}

/// `trace(AᵀA)`, used as a uniform smoothness weight for least squares.
pub fn lipschitz_scalar_lasso(a: &DesignMatrix) -> Result<f64> {
    let t = a.frobenius_sq();
    if t <= 0.0 {
        return Err(Error::domain("design matrix is identically zero"));
    }
    Ok(t)
}

/// `λ1 / (8‖Aᵀb‖∞) · Σ_j Σ_i (b_j A_ji)²`, an upper bound on the gradient
/// Lipschitz constant of the scaled logistic loss.
pub fn lipschitz_scalar_logistic(a: &DesignMatrix, b: &[f64], lambda1: f64) -> Result<f64> {
    check_dim("logistic labels", a.rows(), b.len())?;
    if !(lambda1 > 0.0) {
        return Err(Error::domain("lambda1 must be positive"));
    }
    let atb = norm_inf(&a.matvec_t(b));
    if atb <= 0.0 {
        return Err(Error::domain("‖Aᵀb‖∞ is zero"));
    }
    let mut s = 0.0;
    for (j, &bj) in b.iter().enumerate() {
        let row_sq: f64 = a.row_entries(j).iter().map(|(_, v)| v * v).sum();
        s += bj * bj * row_sq;
    }
    Ok(lambda1 / (8.0 * atb) * s)
}
