//! Choosing `V` so that the controller spends its constraint budget.

use crate::controller::{summarize_adascale, ControllerConfig, RunSummary};
use crate::error::{ensure_positive, Error, Result};
use crate::roots::{illinois, Probe};
use crate::system::SystemModel;

const DEFAULT_V_GUESS: f64 = 1e-2;
const MAX_EXPANSIONS: u32 = 60;
const MAX_STEPS: u32 = 60;

/// Outcome of the `V` search on one trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TunedV {
    pub v: f64,
    pub summary: RunSummary,
    /// The accepted run satisfies `(1 − tol) ν ≤ LHS ≤ ν`.
    pub converged: bool,
    pub evaluations: usize,
    /// `(V, LHS)` pairs in evaluation order.
    pub trail: Vec<(f64, f64)>,
}

impl TunedV {
    /// Adjacent pairs of the trail, sorted by `V`, whose LHS decreases.
    pub fn monotonicity_violations(&self) -> usize {
        let mut sorted = self.trail.clone();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        sorted.windows(2).filter(|w| w[1].1 < w[0].1).count()
    }
}

/// Finds the largest `V` (to relative tolerance `rel_tol` on the constraint
/// LHS) whose controller run keeps the time-averaged constraint within `nu`.
pub fn tune_v(
    h_min_sq: &[f64],
    model: &SystemModel,
    nu: f64,
    tau: f64,
    rel_tol: f64,
    v_guess: Option<f64>,
) -> Result<TunedV> {
    ensure_positive("nu", nu)?;
    ensure_positive("tuning tolerance", rel_tol)?;
    let mut runs: Vec<(f64, RunSummary)> = Vec::new();
    // f(ln V) = LHS/ν − 1 is nondecreasing in V.
    let mut eval = |ln_v: f64| -> Result<f64> {
        let v = ln_v.exp();
        let summary = summarize_adascale(h_min_sq, model, &ControllerConfig::new(v, nu, tau)?)?;
        runs.push((ln_v, summary));
        Ok(summary.constraint_lhs() / nu - 1.0)
    };
    let accept = |p: &Probe| p.value <= 0.0 && p.value >= -rel_tol;

    let start = v_guess
        .filter(|v| v.is_finite() && *v > 0.0)
        .unwrap_or(DEFAULT_V_GUESS)
        .ln();
    let step = 10f64.ln();
    let first = Probe {
        arg: start,
        value: eval(start)?,
    };
    let (mut over, mut under) = if first.value > 0.0 {
        (Some(first), None)
    } else {
        (None, Some(first))
    };
    let mut expansions = 0;
    while over.is_none() || under.is_none() {
        if under.is_some_and(|u| accept(&u)) {
            break;
        }
        if expansions >= MAX_EXPANSIONS {
            return Err(Error::TuningFailure {
                nu,
                reason: format!("no V brackets the budget after {expansions} expansions"),
            });
        }
        let arg = match (over, under) {
            (Some(p), None) => p.arg - step,
            (None, Some(p)) => p.arg + step,
            _ => unreachable!(),
        };
        let probe = Probe { arg, value: eval(arg)? };
        if probe.value > 0.0 {
            over = Some(probe);
        } else {
            under = Some(probe);
        }
        expansions += 1;
    }

    let chosen = match (over, under) {
        (_, Some(u)) if accept(&u) => u,
        (Some(o), Some(u)) => {
            let search = illinois(&mut eval, o, u, accept, MAX_STEPS)?;
            search.accepted.unwrap_or(search.nonpositive)
        }
        _ => unreachable!(),
    };
    let summary = runs
        .iter()
        .find(|(arg, _)| *arg == chosen.arg)
        .map(|(_, s)| *s)
        .expect("every probe is recorded");
    Ok(TunedV {
        v: chosen.arg.exp(),
        summary,
        converged: accept(&chosen),
        evaluations: runs.len(),
        trail: runs.iter().map(|(arg, s)| (arg.exp(), s.constraint_lhs())).collect(),
    })
}
