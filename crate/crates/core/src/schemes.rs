//! Inner accelerated loops (FISTA, APG), the proximal-gradient mapping `T`,
//! and plain proximal gradient descent.
//!
//! Both accelerated schemes keep the three sequences `x_k`, `y_k`, `z_k`
//! explicitly:
//!
//! ```text
//! y_k     = (1 − θ_k) x_k + θ_k z_k
//! FISTA:  x_{k+1} = T-step at y_k,      z_{k+1} = z_k + (x_{k+1} − y_k) / θ_k
//! APG:    z_{k+1} = θ_k L-weighted prox step from z_k with ∇f(y_k),
//!         x_{k+1} = y_k + θ_k (z_{k+1} − z_k)
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{all_finite, lincomb_into};
use crate::problem::CompositeProblem;
use crate::theta::ThetaState;
use crate::trace::{RunTrace, Stopwatch, TraceRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Fista,
    Apg,
    ProxGrad,
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            SchemeKind::Fista => "fista",
            SchemeKind::Apg => "apg",
            SchemeKind::ProxGrad => "gd",
        })
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fista" => Ok(SchemeKind::Fista),
            "apg" => Ok(SchemeKind::Apg),
            "gd" | "proxgrad" | "prox_grad" => Ok(SchemeKind::ProxGrad),
            other => Err(Error::domain(format!("unknown scheme {other:?}"))),
        }
    }
}

/// `T(x)`: one `L`-weighted proximal-gradient step from `x`.
pub fn t_map(p: &CompositeProblem, x: &[f64]) -> Result<Vec<f64>> {
    p.check_point(x)?;
    Ok(p.t_map(x))
}

/// Iterate bundle of an accelerated inner loop.
#[derive(Debug, Clone)]
pub struct AccelState {
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    /// `y_k` from the most recent step.
    pub y: Vec<f64>,
    /// `θ_k` for the next step.
    pub theta: ThetaState,
    /// `θ` used by the most recent step, i.e. `θ_{k−1}` for the current `x_k`.
    pub last_theta: f64,
    /// Number of completed steps.
    pub k: usize,
    /// Proximal-gradient mappings evaluated by this state.
    pub prox_evals: usize,
    grad: Vec<f64>,
    next: Vec<f64>,
}

impl AccelState {
    pub fn new(x0: &[f64]) -> Self {
        AccelState {
            x: x0.to_vec(),
            z: x0.to_vec(),
            y: x0.to_vec(),
            theta: ThetaState::new(),
            last_theta: 1.0,
            k: 0,
            prox_evals: 0,
            grad: vec![0.0; x0.len()],
            next: vec![0.0; x0.len()],
        }
    }

    /// One inner iteration. On the very first step both schemes reduce to
    /// `x_1 = z_1 = T(x_0)`; if that value is already known it can be passed
    /// as `first` and no evaluation is charged.
    pub fn step(&mut self, p: &CompositeProblem, scheme: SchemeKind, first: Option<Vec<f64>>) {
        let th = self.theta.theta;
        if self.k == 0 {
            let x1 = match first {
                Some(x1) => x1,
                None => {
                    p.smooth().value_grad(&self.x, &mut self.grad);
                    let mut x1 = vec![0.0; self.x.len()];
                    p.prox_step_into(&self.x, &self.grad, 1.0, &mut x1);
                    self.prox_evals += 1;
                    x1
                }
            };
            self.y.copy_from_slice(&self.x);
            self.z.copy_from_slice(&x1);
            self.x = x1;
            if scheme != SchemeKind::ProxGrad {
                self.theta.advance();
            }
            self.last_theta = th;
            self.k = 1;
            return;
        }

        match scheme {
            SchemeKind::ProxGrad => {
                p.smooth().value_grad(&self.x, &mut self.grad);
                p.prox_step_into(&self.x, &self.grad, 1.0, &mut self.next);
                self.y.copy_from_slice(&self.x);
                std::mem::swap(&mut self.x, &mut self.next);
                self.z.copy_from_slice(&self.x);
            }
            SchemeKind::Fista => {
                lincomb_into(&mut self.y, 1.0 - th, &self.x, th, &self.z);
                p.smooth().value_grad(&self.y, &mut self.grad);
                p.prox_step_into(&self.y, &self.grad, 1.0, &mut self.next);
                std::mem::swap(&mut self.x, &mut self.next);
                for i in 0..self.z.len() {
                    self.z[i] += (self.x[i] - self.y[i]) / th;
                }
            }
            SchemeKind::Apg => {
                lincomb_into(&mut self.y, 1.0 - th, &self.x, th, &self.z);
                p.smooth().value_grad(&self.y, &mut self.grad);
                // argmin ⟨∇f(y), u⟩ + (θ/2)‖u − z‖²_L + ψ(u) = prox_{θL,ψ}(z − ∇f(y)/(θL))
                p.prox_step_into(&self.z, &self.grad, th, &mut self.next);
                for i in 0..self.x.len() {
                    self.x[i] = self.y[i] + th * (self.next[i] - self.z[i]);
                }
                std::mem::swap(&mut self.z, &mut self.next);
            }
        }
        self.prox_evals += 1;
        self.last_theta = th;
        if scheme != SchemeKind::ProxGrad {
            self.theta.advance();
        }
        self.k += 1;
    }
}

/// Runs `k_max` inner iterations from `x0`, calling `observer` after each
/// one. The observer can stop the loop early by returning `false`.
pub fn run_inner(
    p: &CompositeProblem,
    x0: &[f64],
    k_max: usize,
    scheme: SchemeKind,
    first: Option<Vec<f64>>,
    mut observer: impl FnMut(&AccelState) -> bool,
) -> AccelState {
    let mut st = AccelState::new(x0);
    let mut first = first;
    for _ in 0..k_max {
        st.step(p, scheme, first.take());
        if !observer(&st) {
            break;
        }
    }
    st
}

fn final_record(p: &CompositeProblem, x: &[f64], prox_evals: usize, watch: &Stopwatch) -> TraceRecord {
    let tx = p.t_map(x);
    TraceRecord {
        prox_evals,
        time_s: watch.secs(),
        f: p.value(x),
        grad_map_sq: p.dist_sq(&tx, x),
        gap: p.gap_oracle().map(|g| g.gap(x)),
        stage: 0,
        mu_s: 0.0,
    }
}

fn fixed_budget(
    p: &CompositeProblem,
    x0: &[f64],
    k: usize,
    scheme: SchemeKind,
) -> Result<(Vec<f64>, RunTrace)> {
    p.check_point(x0)?;
    if k == 0 {
        return Err(Error::domain("iteration budget must be >= 1"));
    }
    let watch = Stopwatch::start();
    let st = run_inner(p, x0, k, scheme, None, |_| true);
    let mut trace = RunTrace::new(scheme.to_string());
    let rec = final_record(p, &st.x, st.prox_evals, &watch);
    if !rec.f.is_finite() || !all_finite(&st.x) {
        trace.push(rec);
        return Err(Error::NumericalFailure {
            msg: format!("{scheme} produced a non-finite iterate"),
            trace: Box::new(trace),
        });
    }
    trace.push(rec);
    Ok((st.x, trace))
}

/// `K` iterations of FISTA from `x0` with `θ_0 = 1`, `z_0 = x_0`.
pub fn fista(p: &CompositeProblem, x0: &[f64], k: usize) -> Result<(Vec<f64>, RunTrace)> {
    fixed_budget(p, x0, k, SchemeKind::Fista)
}

/// `K` iterations of APG from `x0` with `θ_0 = 1`, `z_0 = x_0`.
pub fn apg(p: &CompositeProblem, x0: &[f64], k: usize) -> Result<(Vec<f64>, RunTrace)> {
    fixed_budget(p, x0, k, SchemeKind::Apg)
}

/// `K` repeated applications of `T`.
pub fn prox_grad(p: &CompositeProblem, x0: &[f64], k: usize) -> Result<(Vec<f64>, RunTrace)> {
    fixed_budget(p, x0, k, SchemeKind::ProxGrad)
}

/// Termination rule for open-ended runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopRule {
    /// Stop once `‖T(x) − x‖²_L <= eps`.
    pub eps: Option<f64>,
    /// Stop once the recorded primal–dual gap is `<= target_gap`.
    pub target_gap: Option<f64>,
    pub max_prox_evals: usize,
    pub max_time_s: Option<f64>,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            eps: Some(1e-10),
            target_gap: None,
            max_prox_evals: 1_000_000,
            max_time_s: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Converged,
    TargetGap,
    Budget,
    TimeLimit,
}

#[derive(Debug, Clone)]
pub struct BaselineOutput {
    pub x: Vec<f64>,
    pub trace: RunTrace,
    pub status: RunStatus,
}

/// Unrestarted FISTA/APG or proximal gradient run until `stop` fires.
///
/// Every `record_every` iterations the current iterate is recorded with its
/// objective, gradient-mapping norm and gap. Those diagnostic evaluations
/// are not charged to `prox_evals`.
pub fn run_baseline(
    p: &CompositeProblem,
    x0: &[f64],
    scheme: SchemeKind,
    stop: &StopRule,
    record_every: usize,
) -> Result<BaselineOutput> {
    p.check_point(x0)?;
    let record_every = record_every.max(1);
    let watch = Stopwatch::start();
    let mut trace = RunTrace::new(scheme.to_string());
    let mut status = RunStatus::Budget;
    let mut failure = None;

    let st = run_inner(p, x0, stop.max_prox_evals, scheme, None, |st| {
        let due = st.k % record_every == 0 || st.prox_evals >= stop.max_prox_evals;
        if !due {
            return true;
        }
        let rec = final_record(p, &st.x, st.prox_evals, &watch);
        trace.push(rec);
        if !rec.f.is_finite() || !rec.grad_map_sq.is_finite() {
            failure = Some(format!("non-finite objective at {} evaluations", st.prox_evals));
            return false;
        }
        if stop.eps.is_some_and(|e| rec.grad_map_sq <= e) {
            status = RunStatus::Converged;
            return false;
        }
        if let (Some(t), Some(g)) = (stop.target_gap, rec.gap) {
            if g <= t {
                status = RunStatus::TargetGap;
                return false;
            }
        }
        if stop.max_time_s.is_some_and(|t| rec.time_s >= t) {
            status = RunStatus::TimeLimit;
            return false;
        }
        true
    });
    if let Some(msg) = failure {
        return Err(Error::NumericalFailure {
            msg,
            trace: Box::new(trace),
        });
    }
    Ok(BaselineOutput {
        x: st.x,
        trace,
        status,
    })
}
