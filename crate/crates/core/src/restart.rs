//! Restart strategies: fixed-period restart and the adaptive scheme that
//! estimates the quadratic error bound `μ` online.
//!
//! The adaptive scheme runs stages `s = 0, 1, …`. Stage `s` restarts the
//! inner accelerated loop every `K_s = K(μ_s)` iterations from
//! `x_{s,0} = T(x_{s−1,t_{s−1}})` and, after each inner call, checks
//!
//! ```text
//! ‖T(x_{s,t}) − x_{s,t}‖²_L > C_s (θ²_{K_s−1} / μ_s)^t,
//! C_s = 16 ‖x_{s,0} − x_{s−1,t_{s−1}}‖²_L / μ_s.
//! ```
//!
//! The inequality cannot hold when `μ_s` is a valid lower bound on the
//! error-bound constant, so when it does the estimate is halved and a new
//! stage begins. `T(x_{s,t})` is the first step of the next inner call and
//! is reused, so the total number of proximal-gradient mappings is exactly
//! `1 + Σ_s (t_s K_s + 1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::all_finite;
use crate::problem::CompositeProblem;
use crate::schemes::{run_inner, RunStatus, SchemeKind};
use crate::theta::theta_at;
use crate::trace::{RunTrace, Stopwatch, TraceRecord};

/// Default smallest error-bound estimate the adaptive scheme will try.
pub const MU_FLOOR: f64 = 1e-15;

/// Restart period `K(μ) = ⌈2√(e/μ) − 1⌉`, at least 1.
pub fn k_of_mu(mu: f64) -> Result<usize> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::domain(format!("mu must be positive, got {mu}")));
    }
    let k = (2.0 * (std::f64::consts::E / mu).sqrt() - 1.0).ceil();
    Ok(if k < 1.0 { 1 } else { k as usize })
}

/// `θ²_{K−1}`.
pub fn theta_sq_at_period(k: usize) -> f64 {
    let th = theta_at(k.saturating_sub(1));
    th * th
}

/// Per-restart contraction factor on `dist²_L` for period `k`:
/// `min(θ²_{K−1}/μ, 1/(1 + μ/(2θ²_{K−1})))`.
pub fn contraction_factor(k: usize, mu: f64) -> f64 {
    let th2 = theta_sq_at_period(k);
    (th2 / mu).min(1.0 / (1.0 + mu / (2.0 * th2)))
}

/// `true` when `grad_map_sq > c_s · theta_ratio^t`, i.e. the current
/// estimate is refuted. Ties do not refute.
pub fn certificate_test(grad_map_sq: f64, c_s: f64, theta_ratio: f64, t: usize) -> bool {
    grad_map_sq > c_s * theta_ratio.powi(t as i32)
}

/// What a completed (or current) stage contributes to the stricter bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageSummary {
    /// Restart period `K_j`.
    pub k: usize,
    /// Inner calls `t_j`.
    pub t: usize,
    /// `‖x_{j,0} − x_{j−1,t_{j−1}}‖²_L`.
    pub anchor_disp: f64,
}

/// `min_{0≤s'≤s} Π_{j=s'}^{s−1} α_j(μ)^{t_j} · D_{s'}` where `D_s` is
/// `current_disp` and earlier stages come from `completed`.
fn min_anchor_bound(completed: &[StageSummary], current_disp: f64, mu: f64) -> f64 {
    let mut best = current_disp;
    let mut prod = 1.0;
    for st in completed.iter().rev() {
        prod *= contraction_factor(st.k, mu).powi(st.t as i32);
        best = best.min(prod * st.anchor_disp);
    }
    best
}

/// Stricter certificate constant: the plain `16 D_s / μ` with the anchor
/// replaced by the best contracted earlier anchor. Never exceeds the plain
/// constant.
pub fn strict_cs(completed: &[StageSummary], current_disp: f64, mu: f64) -> f64 {
    16.0 * min_anchor_bound(completed, current_disp, mu) / mu
}

/// Checks whether `mu_next` survives the observation that refuted the
/// current stage, without running any inner iterations. `current.t` is the
/// inner-call index at which the refutation happened.
pub fn mu_pretest(
    completed: &[StageSummary],
    current: StageSummary,
    grad_map_sq: f64,
    mu_next: f64,
) -> bool {
    if grad_map_sq == 0.0 {
        return true;
    }
    let th2 = theta_sq_at_period(current.k);
    let alpha_s = contraction_factor(current.k, mu_next);
    let bound = 16.0 / mu_next
        * (th2 / mu_next)
        * alpha_s.powi(current.t as i32 - 1)
        * min_anchor_bound(completed, current.anchor_disp, mu_next);
    // overflow to +inf for tiny mu_next means the test passes
    grad_map_sq <= bound || bound.is_nan()
}

/// `x_{(t+1)K} ← scheme(x_{tK}, K)` for `outer` rounds.
///
/// After every round `T(x_{tK})` is evaluated for the trace and reused as the
/// first step of the next round, so the run costs `outer·K + 1` mappings.
pub fn fixed_restart(
    p: &CompositeProblem,
    x0: &[f64],
    k: usize,
    outer: usize,
    scheme: SchemeKind,
) -> Result<(Vec<f64>, RunTrace)> {
    fixed_restart_observed(p, x0, k, outer, scheme, |_, _| {})
}

/// [`fixed_restart`] with a callback receiving `(t, x_{tK})` after each round.
pub fn fixed_restart_observed(
    p: &CompositeProblem,
    x0: &[f64],
    k: usize,
    outer: usize,
    scheme: SchemeKind,
    mut on_round: impl FnMut(usize, &[f64]),
) -> Result<(Vec<f64>, RunTrace)> {
    p.check_point(x0)?;
    if k == 0 || outer == 0 {
        return Err(Error::domain("restart period and round count must be >= 1"));
    }
    let watch = Stopwatch::start();
    let mut trace = RunTrace::new(format!("fixed_restart_{scheme}_k{k}"));
    let mut x = x0.to_vec();
    let mut cached = None;
    let mut evals = 0;
    for t in 1..=outer {
        let st = run_inner(p, &x, k, scheme, cached.take(), |_| true);
        evals += st.prox_evals;
        x = st.x;
        let tx = p.t_map(&x);
        evals += 1;
        let rec = TraceRecord {
            prox_evals: evals,
            time_s: watch.secs(),
            f: p.value(&x),
            grad_map_sq: p.dist_sq(&tx, &x),
            gap: p.gap_oracle().map(|g| g.gap(&x)),
            stage: 0,
            mu_s: 0.0,
        };
        trace.push(rec);
        if !rec.f.is_finite() || !all_finite(&x) {
            return Err(Error::NumericalFailure {
                msg: format!("non-finite iterate after restart round {t}"),
                trace: Box::new(trace),
            });
        }
        on_round(t, &x);
        cached = Some(tx);
    }
    Ok((x, trace))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaResConfig {
    /// Initial error-bound estimate `μ_0`.
    pub mu0: f64,
    /// Gradient-mapping tolerance on `‖T(x) − x‖²_L`.
    pub eps: f64,
    /// Use the minimum over earlier anchors when forming `C_s`.
    pub strict_test: bool,
    /// After a refutation, keep halving while the next estimate is already
    /// refuted by the same observation.
    pub pretest: bool,
    pub scheme: SchemeKind,
    /// Target objective accuracy. When set, the stage tolerance becomes
    /// `eps_prime · μ_s / 8` and `eps` is ignored.
    pub eps_prime: Option<f64>,
    /// Hard cap on proximal-gradient mappings. May overshoot by at most one
    /// restart period.
    pub max_prox_evals: Option<usize>,
    /// Stop once a recorded primal–dual gap is at or below this value.
    pub target_gap: Option<f64>,
    pub max_time_s: Option<f64>,
    /// Record every inner iterate (diagnostic evaluations are not charged).
    pub trace_inner: bool,
    /// Halving below this estimate aborts with [`Error::MuFloor`].
    pub mu_floor: f64,
}

impl AdaResConfig {
    pub fn new(mu0: f64, eps: f64) -> Self {
        AdaResConfig {
            mu0,
            eps,
            strict_test: false,
            pretest: false,
            scheme: SchemeKind::Fista,
            eps_prime: None,
            max_prox_evals: None,
            target_gap: None,
            max_time_s: None,
            trace_inner: false,
            mu_floor: MU_FLOOR,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu0 > 0.0 && self.mu0.is_finite()) {
            return Err(Error::domain(format!("mu0 must be positive, got {}", self.mu0)));
        }
        match self.eps_prime {
            Some(e) if !(e > 0.0) => return Err(Error::domain("eps_prime must be positive")),
            None if !(self.eps > 0.0) => return Err(Error::domain("eps must be positive")),
            _ => {}
        }
        if !(self.mu_floor > 0.0) {
            return Err(Error::domain("mu_floor must be positive"));
        }
        if self.scheme == SchemeKind::ProxGrad {
            return Err(Error::Unsupported(
                "adaptive restart needs an accelerated inner scheme".into(),
            ));
        }
        Ok(())
    }
}

/// One recorded test point `x_{s,t}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestPoint {
    pub t: usize,
    pub f: f64,
    /// `F(T(x_{s,t}))`
    pub f_next: f64,
    pub grad_map_sq: f64,
    /// Right-hand side `C_s (θ²/μ_s)^t` of the certificate test.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: usize,
    pub mu: f64,
    pub k: usize,
    /// Certificate constant actually used.
    pub c_s: f64,
    /// `16 D_s / μ_s`.
    pub c_plain: f64,
    pub anchor_disp: f64,
    pub t: usize,
    pub refuted: bool,
    /// Extra halvings decided by the pretest after this stage's refutation.
    pub pretest_halvings: usize,
    pub points: Vec<TestPoint>,
}

#[derive(Debug, Clone)]
pub struct AdaResOutput {
    /// `T(x_{ŝ,t_ŝ})`, or the best iterate when stopped early.
    pub x_hat: Vec<f64>,
    pub s_hat: usize,
    /// Proximal-gradient mappings charged.
    pub n_hat: usize,
    pub stages: Vec<StageRecord>,
    pub trace: RunTrace,
    pub status: RunStatus,
    /// Total number of times `μ` was halved.
    pub halvings: usize,
    /// `F(x_0)`.
    pub f0: f64,
}

impl AdaResOutput {
    pub fn refutations(&self) -> usize {
        self.stages.iter().filter(|s| s.refuted).count()
    }

    /// `1 + Σ_s (t_s K_s + 1)` over completed stages.
    pub fn n_hat_formula(&self) -> usize {
        1 + self.stages.iter().map(|s| s.t * s.k + 1).sum::<usize>()
    }
}

/// Adaptive restart. With `cfg.eps_prime` set this is the `ε′`-solution
/// mode, see [`eps_prime_mode`].
pub fn ada_res(p: &CompositeProblem, x0: &[f64], cfg: &AdaResConfig) -> Result<AdaResOutput> {
    cfg.validate()?;
    p.check_point(x0)?;
    Engine::new(p, cfg).run(x0)
}

/// Default safety budget for [`eps_prime_mode`] when none is configured.
pub const EPS_PRIME_DEFAULT_BUDGET: usize = 10_000_000;

/// Looks for `x` with `F(x) − F* <= eps_prime`.
///
/// Stage `s` stops on `‖T(x) − x‖²_L <= eps_prime · μ_s / 8` and returns
/// `T(x)`. The certificate is only valid when `μ_s` does not exceed the true
/// error-bound constant, so termination relies on the inner success test
/// alone and a budget (default [`EPS_PRIME_DEFAULT_BUDGET`]) caps the run.
pub fn eps_prime_mode(p: &CompositeProblem, x0: &[f64], cfg: &AdaResConfig) -> Result<AdaResOutput> {
    if cfg.eps_prime.is_none() {
        return Err(Error::domain("eps_prime_mode requires cfg.eps_prime"));
    }
    let mut cfg = *cfg;
    cfg.max_prox_evals.get_or_insert(EPS_PRIME_DEFAULT_BUDGET);
    ada_res(p, x0, &cfg)
}

struct Engine<'a> {
    p: &'a CompositeProblem,
    cfg: &'a AdaResConfig,
    watch: Stopwatch,
    trace: RunTrace,
    evals: usize,
}

enum Halt {
    Gap(Vec<f64>),
    Time(Vec<f64>),
    Budget(Vec<f64>),
    Failure(String),
}

impl<'a> Engine<'a> {
    fn new(p: &'a CompositeProblem, cfg: &'a AdaResConfig) -> Self {
        let id = if cfg.eps_prime.is_some() { "adares_eps_prime" } else { "adares" };
        let trace = RunTrace::new(id).with_config(serde_json::to_value(cfg).unwrap_or_default());
        Engine {
            p,
            cfg,
            watch: Stopwatch::start(),
            trace,
            evals: 0,
        }
    }

    fn stage_eps(&self, mu: f64) -> f64 {
        match self.cfg.eps_prime {
            Some(e) => e * mu / 8.0,
            None => self.cfg.eps,
        }
    }

    fn gap(&self, x: &[f64]) -> Option<f64> {
        self.p.gap_oracle().map(|g| g.gap(x))
    }

    /// Records a point and evaluates the early-stop conditions.
    fn record(&mut self, x: &[f64], f: f64, grad_map_sq: f64, stage: usize, mu: f64) -> Option<Halt> {
        let gap = self.gap(x);
        let rec = TraceRecord {
            prox_evals: self.evals,
            time_s: self.watch.secs(),
            f,
            grad_map_sq,
            gap,
            stage,
            mu_s: mu,
        };
        self.trace.push(rec);
        if !f.is_finite() || !grad_map_sq.is_finite() || !all_finite(x) {
            return Some(Halt::Failure(format!(
                "non-finite objective at stage {stage} after {} evaluations",
                self.evals
            )));
        }
        if let (Some(target), Some(g)) = (self.cfg.target_gap, gap) {
            if g <= target {
                return Some(Halt::Gap(x.to_vec()));
            }
        }
        if self.cfg.max_time_s.is_some_and(|t| rec.time_s >= t) {
            return Some(Halt::Time(x.to_vec()));
        }
        None
    }

    fn finish(
        self,
        x_hat: Vec<f64>,
        stages: Vec<StageRecord>,
        status: RunStatus,
        halvings: usize,
        f0: f64,
    ) -> AdaResOutput {
        AdaResOutput {
            x_hat,
            s_hat: stages.len().saturating_sub(1),
            n_hat: self.evals,
            stages,
            trace: self.trace,
            status,
            halvings,
            f0,
        }
    }

    fn halt(self, halt: Halt, stages: Vec<StageRecord>, halvings: usize, f0: f64) -> Result<AdaResOutput> {
        match halt {
            Halt::Gap(x) => Ok(self.finish(x, stages, RunStatus::TargetGap, halvings, f0)),
            Halt::Time(x) => Ok(self.finish(x, stages, RunStatus::TimeLimit, halvings, f0)),
            Halt::Budget(best) => Err(Error::BudgetExceeded {
                budget: self.cfg.max_prox_evals.unwrap_or(0),
                best,
                trace: Box::new(self.trace),
            }),
            Halt::Failure(msg) => Err(Error::NumericalFailure {
                msg,
                trace: Box::new(self.trace),
            }),
        }
    }

    fn run(mut self, x0: &[f64]) -> Result<AdaResOutput> {
        let p = self.p;
        let cfg = self.cfg;
        let mut mu = cfg.mu0;
        let f0 = p.value(x0);

        // x_{0,0} = T(x_{−1,0}) with x_{−1,0} = x0
        let mut anchor = p.t_map(x0);
        self.evals = 1;
        let mut anchor_disp = p.dist_sq(&anchor, x0);
        if let Some(h) = self.record(x0, f0, anchor_disp, 0, mu) {
            return self.halt(h, Vec::new(), 0, f0);
        }
        if anchor_disp <= self.stage_eps(mu) {
            return Ok(self.finish(anchor, Vec::new(), RunStatus::Converged, 0, f0));
        }

        let mut stages: Vec<StageRecord> = Vec::new();
        let mut summaries: Vec<StageSummary> = Vec::new();
        let mut halvings = 0;

        loop {
            let s = stages.len();
            let k = k_of_mu(mu)?;
            let ratio = theta_sq_at_period(k) / mu;
            let c_plain = 16.0 * anchor_disp / mu;
            let c_s = if cfg.strict_test {
                strict_cs(&summaries, anchor_disp, mu)
            } else {
                c_plain
            };
            let eps_s = self.stage_eps(mu);

            let mut stage = StageRecord {
                stage: s,
                mu,
                k,
                c_s,
                c_plain,
                anchor_disp,
                t: 0,
                refuted: false,
                pretest_halvings: 0,
                points: Vec::new(),
            };

            let mut x = anchor.clone();
            let mut cached: Option<Vec<f64>> = None;
            let success;
            let (tx, grad_map_sq) = loop {
                let mut inner_halt = None;
                let base = self.evals;
                let st = if cfg.trace_inner {
                    let mut recorder = std::mem::take(&mut self.trace);
                    let watch = self.watch;
                    let st = run_inner(p, &x, k, cfg.scheme, cached.take(), |st| {
                        let xi = &st.x;
                        let gap = p.gap_oracle().map(|g| g.gap(xi));
                        let rec = TraceRecord {
                            prox_evals: base + st.prox_evals,
                            time_s: watch.secs(),
                            f: p.value(xi),
                            grad_map_sq: p.dist_sq(&p.t_map(xi), xi),
                            gap,
                            stage: s,
                            mu_s: mu,
                        };
                        recorder.push(rec);
                        if let (Some(target), Some(g)) = (cfg.target_gap, gap) {
                            if g <= target {
                                inner_halt = Some(Halt::Gap(xi.clone()));
                                return false;
                            }
                        }
                        true
                    });
                    self.trace = recorder;
                    st
                } else {
                    run_inner(p, &x, k, cfg.scheme, cached.take(), |_| true)
                };
                self.evals += st.prox_evals;
                if let Some(h) = inner_halt {
                    stages.push(stage);
                    return self.halt(h, stages, halvings, f0);
                }
                x = st.x;
                stage.t += 1;

                let tx = p.t_map(&x);
                self.evals += 1;
                let gm = p.dist_sq(&tx, &x);
                let fx = p.value(&x);
                let bound = c_s * ratio.powi(stage.t as i32);
                stage.points.push(TestPoint {
                    t: stage.t,
                    f: fx,
                    f_next: p.value(&tx),
                    grad_map_sq: gm,
                    bound,
                });
                if !cfg.trace_inner {
                    if let Some(h) = self.record(&x, fx, gm, s, mu) {
                        stages.push(stage);
                        return self.halt(h, stages, halvings, f0);
                    }
                } else if !fx.is_finite() || !gm.is_finite() {
                    stages.push(stage);
                    let msg = format!("non-finite objective at stage {s}");
                    return self.halt(Halt::Failure(msg), stages, halvings, f0);
                }

                let refuted = certificate_test(gm, c_s, ratio, stage.t);
                if refuted || gm <= eps_s {
                    // with a relative tolerance a refuted estimate certifies nothing
                    success = gm <= eps_s && !(refuted && cfg.eps_prime.is_some());
                    stage.refuted = refuted;
                    break (tx, gm);
                }
                if cfg.max_prox_evals.is_some_and(|b| self.evals >= b) {
                    stages.push(stage);
                    return self.halt(Halt::Budget(tx), stages, halvings, f0);
                }
                cached = Some(tx);
            };

            let summary = StageSummary {
                k,
                t: stage.t,
                anchor_disp,
            };

            // stop test: ‖x_{s+1,0} − x_{s,t_s}‖²_L = ‖T(x_{s,t_s}) − x_{s,t_s}‖²_L
            if success {
                stages.push(stage);
                if cfg.trace_inner {
                    let f = p.value(&tx);
                    let gm = p.dist_sq(&p.t_map(&tx), &tx);
                    self.trace.push(TraceRecord {
                        prox_evals: self.evals,
                        time_s: self.watch.secs(),
                        f,
                        grad_map_sq: gm,
                        gap: self.gap(&tx),
                        stage: s,
                        mu_s: mu,
                    });
                }
                return Ok(self.finish(tx, stages, RunStatus::Converged, halvings, f0));
            }

            let mut mu_next = mu / 2.0;
            halvings += 1;
            if cfg.pretest {
                while !mu_pretest(&summaries, summary, grad_map_sq, mu_next) && mu_next >= cfg.mu_floor {
                    mu_next /= 2.0;
                    halvings += 1;
                    stage.pretest_halvings += 1;
                }
            }
            stages.push(stage);
            summaries.push(summary);
            if mu_next < cfg.mu_floor {
                return Err(Error::MuFloor {
                    stage: s + 1,
                    floor: cfg.mu_floor,
                    trace: Box::new(self.trace),
                });
            }
            if cfg.max_prox_evals.is_some_and(|b| self.evals >= b) {
                return self.halt(Halt::Budget(tx), stages, halvings, f0);
            }
            mu = mu_next;
            anchor_disp = grad_map_sq;
            anchor = tx;
        }
    }
}
