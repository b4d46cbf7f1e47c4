//! The online receive-scaling controller.
//!
//! Each round the server minimizes a convex scalar objective in `x`
//!
//! ```text
//! J(x) = V Σ_m ρ_m(x) + Q c (1/x − 1/x_max) + ½ c² (1/x − 1/x_max)²
//! ```
//!
//! by bisection on its analytic derivative, then advances the virtual queue
//! `Q ← max(Q + c (1/x − 1/x_max) − ν, 0)` and sets `η = x h_min²`.

use crate::accountant::PrivacyLedger;
use crate::channel::ChannelTrace;
use crate::error::{ensure_nonnegative, ensure_positive, Error, Result};
use crate::system::SystemModel;

/// Gains of the online controller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerConfig {
    /// Weight on leakage relative to the queue terms.
    pub v: f64,
    /// Per-round constraint budget.
    pub nu: f64,
    /// Absolute solver tolerance on `x`.
    pub tau: f64,
}

/// Default solver tolerance relative to `x_max`.
pub const DEFAULT_TAU_REL: f64 = 1e-10;

impl ControllerConfig {
    pub fn new(v: f64, nu: f64, tau: f64) -> Result<Self> {
        ensure_positive("V", v)?;
        ensure_nonnegative("nu", nu)?;
        ensure_positive("tau", tau)?;
        Ok(ControllerConfig { v, nu, tau })
    }

    /// `tau = 1e-10 · x_max`.
    pub fn with_default_tau(model: &SystemModel, v: f64, nu: f64) -> Result<Self> {
        Self::new(v, nu, DEFAULT_TAU_REL * model.x_max())
    }
}

/// `w L(x) + a u(x) + ½ b u(x)²` with `u(x) = c (1/x − 1/x_max)`.
///
/// The online controller uses `(w, a, b) = (V, Q, 1)`; the Lagrangian
/// relaxation of the offline problem uses `(w, a, b) = (weight, μ, 0)`.
#[derive(Debug, Clone, Copy)]
pub struct RoundObjective<'a> {
    model: &'a SystemModel,
    h_min_sq: f64,
    c: f64,
    leakage_weight: f64,
    linear: f64,
    quadratic: f64,
}

impl<'a> RoundObjective<'a> {
    pub fn new(
        model: &'a SystemModel,
        h_min_sq: f64,
        leakage_weight: f64,
        linear: f64,
        quadratic: f64,
    ) -> Result<Self> {
        ensure_positive("minimum channel gain", h_min_sq)?;
        ensure_nonnegative("leakage weight", leakage_weight)?;
        ensure_nonnegative("linear penalty", linear)?;
        ensure_nonnegative("quadratic penalty", quadratic)?;
        Ok(RoundObjective {
            model,
            h_min_sq,
            c: model.constraint_coefficient(h_min_sq),
            leakage_weight,
            linear,
            quadratic,
        })
    }

    /// The per-round problem of the online controller.
    pub fn online(model: &'a SystemModel, h_min_sq: f64, v: f64, queue: f64) -> Result<Self> {
        Self::new(model, h_min_sq, v, queue, 1.0)
    }

    /// `weight · L(x) + μ u(x)`.
    pub fn lagrangian(model: &'a SystemModel, h_min_sq: f64, weight: f64, mu: f64) -> Result<Self> {
        Self::new(model, h_min_sq, weight, mu, 0.0)
    }

    pub fn model(&self) -> &SystemModel {
        self.model
    }

    pub fn constraint_coefficient(&self) -> f64 {
        self.c
    }

    fn check(&self, x: f64) -> Result<()> {
        if x > 0.0 && x <= self.model.x_max() {
            Ok(())
        } else {
            Err(Error::invalid(
                "x",
                format!("must lie in (0, {}], got {x}", self.model.x_max()),
            ))
        }
    }

    fn u(&self, x: f64) -> f64 {
        self.c * (1.0 / x - 1.0 / self.model.x_max())
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        Ok(self.value_unchecked(x))
    }

    pub fn derivative(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        Ok(self.derivative_unchecked(x))
    }

    pub(crate) fn value_unchecked(&self, x: f64) -> f64 {
        let u = self.u(x);
        let leak = if self.leakage_weight > 0.0 {
            self.leakage_weight * self.model.leakage(x, self.h_min_sq)
        } else {
            0.0
        };
        leak + self.linear * u + 0.5 * self.quadratic * u * u
    }

    pub(crate) fn derivative_unchecked(&self, x: f64) -> f64 {
        let slope = if self.leakage_weight > 0.0 {
            self.leakage_weight * self.model.leakage_with_slope(x, self.h_min_sq).1
        } else {
            0.0
        };
        let u = self.u(x);
        slope - (self.linear + self.quadratic * u) * self.c / (x * x)
    }
}

/// Stopping rule for the bisection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    /// Stop once the bracket is at most this wide.
    Absolute(f64),
    /// Stop once the bracket width is at most this fraction of its lower end.
    Relative(f64),
}

const MAX_HALVINGS: u32 = 128;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundSolution {
    pub x: f64,
    /// Final bracket; the derivative is negative at `lo` and nonnegative at `hi`.
    pub bracket: (f64, f64),
    pub iterations: u32,
    pub halvings: u32,
    /// The derivative was nonpositive at `x_max`.
    pub at_upper_bound: bool,
    /// No sign change was found with a zero linear penalty; `x` is the
    /// last lower bracket end tried.
    pub degenerate: bool,
}

/// Minimizes `objective` over `(0, x_max]`.
pub fn solve_round(objective: &RoundObjective<'_>, tol: Tolerance) -> Result<RoundSolution> {
    let x_max = objective.model.x_max();
    if objective.derivative_unchecked(x_max) <= 0.0 {
        return Ok(RoundSolution {
            x: x_max,
            bracket: (x_max, x_max),
            iterations: 0,
            halvings: 0,
            at_upper_bound: true,
            degenerate: false,
        });
    }
    let mut hi = x_max;
    let mut lo = 0.5 * x_max;
    let mut halvings = 1;
    while objective.derivative_unchecked(lo) >= 0.0 {
        if halvings >= MAX_HALVINGS {
            if objective.linear == 0.0 {
                return Ok(RoundSolution {
                    x: lo,
                    bracket: (lo, lo),
                    iterations: 0,
                    halvings,
                    at_upper_bound: false,
                    degenerate: true,
                });
            }
            return Err(Error::BracketFailure { halvings });
        }
        hi = lo;
        lo *= 0.5;
        halvings += 1;
    }
    let width_limit = match tol {
        Tolerance::Absolute(tau) => tau,
        Tolerance::Relative(r) => r * lo,
    };
    let mut iterations = 0;
    while hi - lo > width_limit {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if objective.derivative_unchecked(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    Ok(RoundSolution {
        x: 0.5 * (lo + hi),
        bracket: (lo, hi),
        iterations,
        halvings,
        at_upper_bound: false,
        degenerate: false,
    })
}

/// Virtual queue carried across rounds.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControllerState {
    pub queue: f64,
    pub round: usize,
}

impl ControllerState {
    /// `Q ← max(Q + term − ν, 0)`, `t ← t + 1`.
    pub fn update(self, constraint_term: f64, nu: f64) -> Result<Self> {
        ensure_nonnegative("constraint term", constraint_term)?;
        Ok(ControllerState {
            queue: (self.queue + constraint_term - nu).max(0.0),
            round: self.round + 1,
        })
    }
}

/// What a method decided in one round and what it cost.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundDecision {
    pub round: usize,
    pub x: f64,
    pub eta: f64,
    pub h_min_sq: f64,
    /// `d σ_n² / h_min²`.
    pub c: f64,
    /// `c (1/x − 1/x_max)`.
    pub constraint_term: f64,
    /// Queue value when the decision was taken; zero for methods without one.
    pub queue: f64,
    pub sigma_per_device: Vec<f64>,
    pub rho_per_device: Vec<f64>,
}

impl RoundDecision {
    /// Evaluates the consequences of choosing `x` in a round.
    pub fn evaluate(model: &SystemModel, round: usize, h_min_sq: f64, x: f64, queue: f64) -> Self {
        RoundDecision {
            round,
            x,
            eta: model.eta(x, h_min_sq),
            h_min_sq,
            c: model.constraint_coefficient(h_min_sq),
            constraint_term: model.constraint_term(x, h_min_sq).max(0.0),
            queue,
            sigma_per_device: model.sigma_per_device(x, h_min_sq),
            rho_per_device: model.rho_per_device(x, h_min_sq),
        }
    }

    pub fn leakage(&self) -> f64 {
        self.rho_per_device.iter().sum()
    }
}

/// A full run of one method over a trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub decisions: Vec<RoundDecision>,
    pub ledger: PrivacyLedger,
    /// Queue values `Q_0 .. Q_T`; all zero for methods without a queue.
    pub queue: Vec<f64>,
}

impl Trajectory {
    /// Builds a trajectory from chosen `x` values with no queue.
    pub fn from_schedule(model: &SystemModel, trace: &ChannelTrace, xs: &[f64]) -> Result<Self> {
        if xs.len() != trace.rounds() {
            return Err(Error::DimensionMismatch {
                what: "schedule",
                expected: trace.rounds(),
                actual: xs.len(),
            });
        }
        let decisions: Vec<RoundDecision> = xs
            .iter()
            .enumerate()
            .map(|(t, &x)| RoundDecision::evaluate(model, t, trace.h_min_sq()[t], x, 0.0))
            .collect();
        Self::assemble(model, decisions, vec![0.0; xs.len() + 1])
    }

    fn assemble(model: &SystemModel, decisions: Vec<RoundDecision>, queue: Vec<f64>) -> Result<Self> {
        let ledger = decisions
            .iter()
            .try_fold(PrivacyLedger::new(model.devices(), model.order()), |l, d| {
                l.compose(&d.rho_per_device)
            })?;
        Ok(Trajectory {
            decisions,
            ledger,
            queue,
        })
    }

    pub fn rounds(&self) -> usize {
        self.decisions.len()
    }

    /// `(1/T) Σ_t c_t (1/x_t − 1/x_max)`.
    pub fn constraint_lhs(&self) -> f64 {
        self.decisions.iter().map(|d| d.constraint_term).sum::<f64>() / self.rounds() as f64
    }

    /// `Σ_t Σ_m ρ_{m,t}`.
    pub fn total_leakage(&self) -> f64 {
        self.decisions.iter().map(RoundDecision::leakage).sum()
    }

    pub fn max_queue(&self) -> f64 {
        self.queue.iter().copied().fold(0.0, f64::max)
    }

    pub fn xs(&self) -> Vec<f64> {
        self.decisions.iter().map(|d| d.x).collect()
    }

    pub fn summary(&self) -> RunSummary {
        RunSummary {
            constraint_sum: self.decisions.iter().map(|d| d.constraint_term).sum(),
            leakage_sum: self.total_leakage(),
            max_queue: self.max_queue(),
            rounds: self.rounds(),
        }
    }
}

/// Totals of an online run without per-device detail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    pub constraint_sum: f64,
    pub leakage_sum: f64,
    pub max_queue: f64,
    pub rounds: usize,
}

impl RunSummary {
    pub fn constraint_lhs(&self) -> f64 {
        self.constraint_sum / self.rounds as f64
    }
}

fn online_steps(
    model: &SystemModel,
    h_min_sq: &[f64],
    config: &ControllerConfig,
    mut visit: impl FnMut(usize, f64, f64, f64) -> Result<()>,
) -> Result<ControllerState> {
    let mut state = ControllerState::default();
    for (t, &h) in h_min_sq.iter().enumerate() {
        let objective = RoundObjective::online(model, h, config.v, state.queue)?;
        let solution = solve_round(&objective, Tolerance::Absolute(config.tau))?;
        let term = model.constraint_term(solution.x, h).max(0.0);
        visit(t, solution.x, state.queue, term)?;
        state = state.update(term, config.nu)?;
    }
    Ok(state)
}

/// Runs the online controller over every round of `trace`.
pub fn run_adascale(trace: &ChannelTrace, model: &SystemModel, config: &ControllerConfig) -> Result<Trajectory> {
    check_devices(trace, model)?;
    let mut decisions = Vec::with_capacity(trace.rounds());
    let mut queue = Vec::with_capacity(trace.rounds() + 1);
    let last = online_steps(model, trace.h_min_sq(), config, |t, x, q, _| {
        decisions.push(RoundDecision::evaluate(model, t, trace.h_min_sq()[t], x, q));
        queue.push(q);
        Ok(())
    })?;
    queue.push(last.queue);
    Trajectory::assemble(model, decisions, queue)
}

/// Same decisions as [`run_adascale`], reduced to totals.
pub fn summarize_adascale(h_min_sq: &[f64], model: &SystemModel, config: &ControllerConfig) -> Result<RunSummary> {
    let mut summary = RunSummary {
        constraint_sum: 0.0,
        leakage_sum: 0.0,
        max_queue: 0.0,
        rounds: h_min_sq.len(),
    };
    let last = online_steps(model, h_min_sq, config, |t, x, q, term| {
        summary.constraint_sum += term;
        summary.leakage_sum += model.leakage(x, h_min_sq[t]);
        summary.max_queue = summary.max_queue.max(q);
        Ok(())
    })?;
    summary.max_queue = summary.max_queue.max(last.queue);
    Ok(summary)
}

pub(crate) fn check_devices(trace: &ChannelTrace, model: &SystemModel) -> Result<()> {
    if trace.devices() != model.devices() {
        return Err(Error::DimensionMismatch {
            what: "trace devices",
            expected: model.devices(),
            actual: trace.devices(),
        });
    }
    Ok(())
}
