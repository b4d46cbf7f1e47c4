//! Comparison methods: equal per-round budget, re-planning with predicted
//! future channels, and the offline optimum with full channel knowledge.
//!
//! The offline problem
//!
//! ```text
//! min Σ_t Σ_m ρ_m(x_t)   s.t.   Σ_t c_t (1/x_t − 1/x_max) ≤ T ν,   0 < x_t ≤ x_max
//! ```
//!
//! has one coupling constraint, so it is solved through its Lagrangian: for
//! a multiplier μ every round is an independent convex scalar problem, and
//! the constraint total is nonincreasing in μ. The multiplier is located by
//! a bracketed search in `ln μ`.

use crate::channel::ChannelTrace;
use crate::controller::{check_devices, solve_round, RoundObjective, Tolerance, Trajectory};
use crate::error::{ensure_nonnegative, ensure_positive, Error, Result};
use crate::roots::{illinois, Probe};
use crate::system::SystemModel;

/// `x = x_max / (1 + x_max ν / c)`, which spends exactly `ν` in the round.
pub fn equal_alloc(c: f64, nu: f64, x_max: f64) -> f64 {
    x_max / (1.0 + x_max * nu / c)
}

pub fn run_equal_alloc(trace: &ChannelTrace, model: &SystemModel, nu: f64) -> Result<Trajectory> {
    check_devices(trace, model)?;
    ensure_nonnegative("nu", nu)?;
    let xs: Vec<f64> = trace
        .h_min_sq()
        .iter()
        .map(|&h| equal_alloc(model.constraint_coefficient(h), nu, model.x_max()))
        .collect();
    Trajectory::from_schedule(model, trace, &xs)
}

/// A round of the offline problem standing for `weight` identical rounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedRound {
    pub h_min_sq: f64,
    pub weight: f64,
}

/// Relative tolerance on the constraint total at the returned multiplier.
pub const BUDGET_REL_TOL: f64 = 1e-9;
const INNER_REL_TOL: f64 = 1e-13;
const MAX_OUTER_STEPS: u32 = 200;
const MAX_BRACKET_STEPS: u32 = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct OfflineSolution {
    pub x_star: Vec<f64>,
    pub mu_star: f64,
    /// `Σ_t w_t Σ_m ρ_m(x*_t)`.
    pub primal_value: f64,
    /// Lagrange dual function at `mu_star`.
    pub dual_value: f64,
    /// `budget − Σ_t w_t c_t (1/x*_t − 1/x_max)`; nonnegative.
    pub constraint_slack: f64,
    pub budget: f64,
    /// `(μ, constraint total)` at every multiplier evaluated, in order.
    pub iterates: Vec<(f64, f64)>,
    /// The search reached the budget tolerance.
    pub converged: bool,
}

impl OfflineSolution {
    /// `primal − dual`; the duality gap certificate.
    pub fn duality_gap(&self) -> f64 {
        self.primal_value - self.dual_value
    }

    /// Multiplier iterates whose constraint total rises with μ.
    pub fn monotonicity_violations(&self) -> usize {
        let mut sorted = self.iterates.clone();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        sorted.windows(2).filter(|w| w[1].1 > w[0].1).count()
    }
}

struct Relaxation<'a> {
    model: &'a SystemModel,
    rounds: &'a [WeightedRound],
}

struct RelaxedPoint {
    xs: Vec<f64>,
    constraint_total: f64,
    leakage_total: f64,
}

impl Relaxation<'_> {
    fn minimize(&self, mu: f64) -> Result<RelaxedPoint> {
        let mut xs = Vec::with_capacity(self.rounds.len());
        let mut constraint_total = 0.0;
        let mut leakage_total = 0.0;
        for r in self.rounds {
            let objective = RoundObjective::lagrangian(self.model, r.h_min_sq, 1.0, mu)?;
            let x = solve_round(&objective, Tolerance::Relative(INNER_REL_TOL))?.x;
            constraint_total += r.weight * self.model.constraint_term(x, r.h_min_sq).max(0.0);
            leakage_total += r.weight * self.model.leakage(x, r.h_min_sq);
            xs.push(x);
        }
        Ok(RelaxedPoint {
            xs,
            constraint_total,
            leakage_total,
        })
    }
}

/// Minimizes weighted total leakage subject to a weighted constraint total
/// of at most `budget`. `mu_guess` seeds the multiplier bracket.
pub fn solve_weighted(
    model: &SystemModel,
    rounds: &[WeightedRound],
    budget: f64,
    mu_guess: Option<f64>,
) -> Result<OfflineSolution> {
    ensure_nonnegative("constraint budget", budget)?;
    for r in rounds {
        ensure_positive("minimum channel gain", r.h_min_sq)?;
        ensure_positive("round weight", r.weight)?;
    }
    if rounds.is_empty() {
        return Err(Error::invalid("rounds", "at least one round is required"));
    }
    if budget == 0.0 {
        let x_max = model.x_max();
        let primal = rounds.iter().map(|r| r.weight * model.leakage(x_max, r.h_min_sq)).sum();
        return Ok(OfflineSolution {
            x_star: vec![x_max; rounds.len()],
            mu_star: 0.0,
            primal_value: primal,
            dual_value: primal,
            constraint_slack: 0.0,
            budget,
            iterates: Vec::new(),
            converged: true,
        });
    }

    let relaxation = Relaxation { model, rounds };
    let mut iterates = Vec::new();
    let mut points: Vec<(f64, RelaxedPoint)> = Vec::new();
    // f(ln μ) = total(μ)/budget − 1 is nonincreasing; positive means over budget.
    let mut eval = |ln_mu: f64| -> Result<f64> {
        let mu = ln_mu.exp();
        let p = relaxation.minimize(mu)?;
        iterates.push((mu, p.constraint_total));
        let value = p.constraint_total / budget - 1.0;
        points.push((ln_mu, p));
        Ok(value)
    };

    let start = mu_guess.filter(|m| m.is_finite() && *m > 0.0).unwrap_or(1.0).ln();
    let first = Probe {
        arg: start,
        value: eval(start)?,
    };
    let step = 4f64.ln();
    let (mut over, mut under) = if first.value > 0.0 {
        (Some(first), None)
    } else {
        (None, Some(first))
    };
    let mut steps = 0;
    while over.is_none() || under.is_none() {
        if steps >= MAX_BRACKET_STEPS {
            return Err(Error::invalid(
                "constraint budget",
                format!("no multiplier brackets the budget {budget}"),
            ));
        }
        let arg = match (over, under) {
            (Some(p), None) => p.arg + step,
            (None, Some(p)) => p.arg - step,
            _ => unreachable!(),
        };
        let probe = Probe { arg, value: eval(arg)? };
        if probe.value > 0.0 {
            over = Some(probe);
        } else {
            under = Some(probe);
            if over.is_none() && probe.value >= -BUDGET_REL_TOL {
                break;
            }
        }
        steps += 1;
    }

    let accept = |p: &Probe| p.value <= 0.0 && p.value >= -BUDGET_REL_TOL;
    let chosen = match (over, under) {
        (_, Some(u)) if accept(&u) => u,
        (Some(o), Some(u)) => {
            let search = illinois(&mut eval, o, u, accept, MAX_OUTER_STEPS)?;
            search.accepted.unwrap_or(search.nonpositive)
        }
        _ => unreachable!(),
    };
    let converged = accept(&chosen);
    let point = points
        .into_iter()
        .find(|(arg, _)| *arg == chosen.arg)
        .map(|(_, p)| p)
        .expect("every probe is recorded");
    let mu = chosen.arg.exp();
    let slack = (budget - point.constraint_total).max(0.0);
    let dual = point.leakage_total + mu * (point.constraint_total - budget);
    Ok(OfflineSolution {
        x_star: point.xs,
        mu_star: mu,
        primal_value: point.leakage_total,
        dual_value: dual,
        constraint_slack: slack,
        budget,
        iterates,
        converged,
    })
}

/// The offline optimum over a whole trace with budget `T ν`.
pub fn offline_optimal(trace: &ChannelTrace, model: &SystemModel, nu: f64) -> Result<OfflineSolution> {
    check_devices(trace, model)?;
    offline_optimal_gains(trace.h_min_sq(), model, nu)
}

/// [`offline_optimal`] on a bare sequence of minimum normalized gains.
pub fn offline_optimal_gains(h_min_sq: &[f64], model: &SystemModel, nu: f64) -> Result<OfflineSolution> {
    if nu < 0.0 || nu.is_nan() {
        return Err(Error::invalid("nu", format!("budget must be nonnegative, got {nu}")));
    }
    let rounds: Vec<WeightedRound> = h_min_sq
        .iter()
        .map(|&h| WeightedRound {
            h_min_sq: h,
            weight: 1.0,
        })
        .collect();
    solve_weighted(model, &rounds, nu * h_min_sq.len() as f64, None)
}

/// Remaining constraint budget of a re-planning method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetTracker {
    pub total_budget: f64,
    pub spent: f64,
    pub rounds_left: usize,
}

impl BudgetTracker {
    pub fn new(rounds: usize, nu: f64) -> Self {
        BudgetTracker {
            total_budget: rounds as f64 * nu,
            spent: 0.0,
            rounds_left: rounds,
        }
    }

    /// `max(total − spent, 0)`.
    pub fn remaining(&self) -> f64 {
        (self.total_budget - self.spent).max(0.0)
    }

    pub fn record(&mut self, constraint_term: f64) {
        self.spent += constraint_term.max(0.0);
        self.rounds_left = self.rounds_left.saturating_sub(1);
    }
}

/// Estimate of a future round's minimum normalized gain.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelPredictor {
    /// Mean under the known fading law.
    KnownLaw(f64),
    /// Running mean of the gains observed so far, the current round included.
    Empirical { sum: f64, count: usize },
}

impl ChannelPredictor {
    pub fn empirical() -> Self {
        ChannelPredictor::Empirical { sum: 0.0, count: 0 }
    }

    pub fn observe(&mut self, h_min_sq: f64) {
        if let ChannelPredictor::Empirical { sum, count } = self {
            *sum += h_min_sq;
            *count += 1;
        }
    }

    pub fn predict(&self) -> Option<f64> {
        match *self {
            ChannelPredictor::KnownLaw(mean) => Some(mean),
            ChannelPredictor::Empirical { count: 0, .. } => None,
            ChannelPredictor::Empirical { sum, count } => Some(sum / count as f64),
        }
    }
}

/// One re-planning decision: the current round's coordinate of the offline
/// problem in which every remaining future round has the predicted gain.
/// Returns `x` and the multiplier used, which seeds the next round's search.
pub fn estim_future(
    model: &SystemModel,
    h_min_sq: f64,
    predicted_h_min_sq: f64,
    tracker: &BudgetTracker,
    mu_guess: Option<f64>,
) -> Result<(f64, Option<f64>)> {
    if tracker.rounds_left == 0 {
        return Err(Error::invalid("budget tracker", "no rounds left"));
    }
    let remaining = tracker.remaining();
    let x_max = model.x_max();
    if remaining == 0.0 {
        return Ok((x_max, mu_guess));
    }
    if tracker.rounds_left == 1 {
        let c = model.constraint_coefficient(h_min_sq);
        return Ok(((remaining / c + 1.0 / x_max).recip(), mu_guess));
    }
    let rounds = [
        WeightedRound { h_min_sq, weight: 1.0 },
        WeightedRound {
            h_min_sq: predicted_h_min_sq,
            weight: (tracker.rounds_left - 1) as f64,
        },
    ];
    let solution = solve_weighted(model, &rounds, remaining, mu_guess)?;
    Ok((solution.x_star[0], Some(solution.mu_star)))
}

pub fn run_estim_future(
    trace: &ChannelTrace,
    model: &SystemModel,
    nu: f64,
    mut predictor: ChannelPredictor,
) -> Result<Trajectory> {
    check_devices(trace, model)?;
    ensure_nonnegative("nu", nu)?;
    let mut tracker = BudgetTracker::new(trace.rounds(), nu);
    let mut mu = None;
    let mut xs = Vec::with_capacity(trace.rounds());
    for &h in trace.h_min_sq() {
        predictor.observe(h);
        let predicted = predictor.predict().unwrap_or(h);
        let (x, next_mu) = estim_future(model, h, predicted, &tracker, mu)?;
        mu = next_mu;
        tracker.record(model.constraint_term(x, h));
        xs.push(x);
    }
    Trajectory::from_schedule(model, trace, &xs)
}
