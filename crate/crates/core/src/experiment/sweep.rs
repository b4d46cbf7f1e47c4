//! ν sweeps over every configured method on shared fading traces.

use std::collections::BTreeMap;

use crate::accountant::{best_dp_over_orders, RdpOrder};
use crate::baselines::OfflineSolution;
use crate::channel::ChannelTrace;
use crate::controller::Trajectory;
use crate::error::{Error, Result};
use crate::system::SystemModel;

use super::certificate::{certify_run, BoundCertificate};
use super::config::{ExperimentConfig, Method};
use super::{run_method, Deployment, MethodRun};

/// Outcome of one method on one trial at one ν.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub nu: f64,
    pub method: Method,
    pub trial: usize,
    /// `V` of the online controller; `None` for the other methods.
    pub v: Option<f64>,
    pub constraint_lhs: f64,
    /// `Σ_m` of the per-device cumulative RDP at the configured order.
    pub total_rdp: f64,
    /// Mean over devices of the cumulative RDP.
    pub mean_rdp: f64,
    /// Mean over devices of ε at the configured order and δ.
    pub mean_epsilon: f64,
    /// Mean over devices of the smallest ε over `system.dp_orders`.
    pub best_mean_epsilon: Option<f64>,
    pub tuning_converged: Option<bool>,
}

/// Certificate of the online controller on one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialCertificate {
    pub trial: usize,
    pub certificate: BoundCertificate,
}

/// A (ν, method, trial) cell that could not be completed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepFailure {
    pub nu: f64,
    pub method: Method,
    pub trial: usize,
    pub reason: String,
}

/// Diagnostics of the offline solver on one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OfflineRecord {
    pub nu: f64,
    pub trial: usize,
    pub mu_star: f64,
    pub duality_gap: f64,
    pub converged: bool,
    pub monotonicity_violations: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepReport {
    /// Ordered by ν, then method, then trial.
    pub rows: Vec<SweepRow>,
    pub certificates: Vec<TrialCertificate>,
    pub offline: Vec<OfflineRecord>,
    pub failures: Vec<SweepFailure>,
    /// Adjacent `(V, LHS)` pairs along the `V` searches where LHS decreased.
    pub tuning_monotonicity_violations: usize,
}

impl SweepReport {
    pub fn certificates_pass(&self) -> bool {
        self.certificates.iter().all(|c| c.certificate.passed())
    }

    pub fn rows_for(&self, nu: f64, method: Method) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.nu == nu && r.method == method)
    }
}

/// Per-device cumulative RDP at each of `orders` along a trajectory.
pub fn rdp_at_orders(
    deployment: &Deployment,
    config: &ExperimentConfig,
    trajectory: &Trajectory,
    orders: &[RdpOrder],
) -> Result<Vec<BTreeMap<RdpOrder, f64>>> {
    let s = &config.system;
    let noise = deployment.model.noise();
    let mut per_device = vec![BTreeMap::new(); deployment.model.devices()];
    for &order in orders {
        let model = SystemModel::new(&deployment.profiles, noise, s.clip, order)?;
        let mut totals = vec![0.0; per_device.len()];
        for d in &trajectory.decisions {
            for (total, rho) in totals.iter_mut().zip(model.rho_per_device(d.x, d.h_min_sq)) {
                *total += rho;
            }
        }
        for (map, total) in per_device.iter_mut().zip(totals) {
            map.insert(order, total);
        }
    }
    Ok(per_device)
}

/// Reduces one method run to a report row.
pub fn summarize_run(
    run: &MethodRun,
    deployment: &Deployment,
    config: &ExperimentConfig,
    nu: f64,
    trial: usize,
) -> Result<SweepRow> {
    let ledger = &run.trajectory.ledger;
    let delta = config.system.delta;
    let epsilons = ledger.to_dp(delta)?;
    let mean_epsilon = epsilons.iter().map(|g| g.epsilon).sum::<f64>() / epsilons.len() as f64;
    let orders = &config.system.dp_orders;
    let best_mean_epsilon = if orders.is_empty() {
        None
    } else {
        let per_device = rdp_at_orders(deployment, config, &run.trajectory, orders)?;
        let mut sum = 0.0;
        for map in &per_device {
            sum += best_dp_over_orders(map, delta)?.epsilon;
        }
        Some(sum / per_device.len() as f64)
    };
    Ok(SweepRow {
        nu,
        method: run.method,
        trial,
        v: run.v,
        constraint_lhs: run.trajectory.constraint_lhs(),
        total_rdp: ledger.total_rdp(),
        mean_rdp: ledger.mean_rdp(),
        mean_epsilon,
        best_mean_epsilon,
        tuning_converged: run.tuning.as_ref().map(|t| t.converged),
    })
}

fn offline_record(solution: &OfflineSolution, nu: f64, trial: usize) -> OfflineRecord {
    OfflineRecord {
        nu,
        trial,
        mu_star: solution.mu_star,
        duality_gap: solution.duality_gap(),
        converged: solution.converged,
        monotonicity_violations: solution.monotonicity_violations(),
    }
}

/// Runs every configured method for every ν and trial of `config`.
pub fn sweep(config: &ExperimentConfig) -> Result<SweepReport> {
    let deployment = Deployment::from_config(config)?;
    let traces = (0..config.seeds.trials)
        .map(|trial| deployment.trace(config, trial))
        .collect::<Result<Vec<_>>>()?;
    sweep_traces(config, &deployment, &traces)
}

/// [`sweep`] on caller-supplied traces, one per trial.
pub fn sweep_traces(
    config: &ExperimentConfig,
    deployment: &Deployment,
    traces: &[ChannelTrace],
) -> Result<SweepReport> {
    let methods = &config.controller.methods;
    if config.controller.nu.is_empty() || methods.is_empty() {
        return Err(Error::invalid("sweep", "at least one nu and one method are required"));
    }
    let mut report = SweepReport::default();
    let mut rows: Vec<((usize, usize, usize), SweepRow)> = Vec::new();
    for (nu_index, &nu) in config.controller.nu.iter().enumerate() {
        let mut v_guess = None;
        for (trial, trace) in traces.iter().enumerate() {
            let mut adascale: Option<MethodRun> = None;
            let mut optimal: Option<MethodRun> = None;
            for (method_index, &method) in methods.iter().enumerate() {
                let run = match run_method(method, trace, deployment, config, nu, v_guess) {
                    Ok(run) => run,
                    Err(err @ Error::TuningFailure { .. }) => {
                        report.failures.push(SweepFailure {
                            nu,
                            method,
                            trial,
                            reason: err.to_string(),
                        });
                        continue;
                    }
                    Err(err) => return Err(err),
                };
                rows.push((
                    (nu_index, method_index, trial),
                    summarize_run(&run, deployment, config, nu, trial)?,
                ));
                if let Some(tuning) = &run.tuning {
                    report.tuning_monotonicity_violations += tuning.monotonicity_violations();
                    v_guess = Some(tuning.v);
                }
                if let Some(solution) = &run.offline {
                    report.offline.push(offline_record(solution, nu, trial));
                }
                match method {
                    Method::AdaScale => adascale = Some(run),
                    Method::Optimal => optimal = Some(run),
                    Method::EqualAlloc | Method::EstimFuture => {}
                }
            }
            if let (Some(online), Some(offline)) = (&adascale, &optimal) {
                let solution = offline.offline.as_ref().expect("optimal runs carry their solution");
                let v = online.v.expect("controller runs carry V");
                let certificate = certify_run(
                    &online.trajectory.summary(),
                    solution,
                    trace.h_min_sq(),
                    &deployment.model,
                    v,
                    nu,
                )?;
                report.certificates.push(TrialCertificate { trial, certificate });
            }
        }
    }
    rows.sort_by_key(|(key, _)| *key);
    report.rows = rows.into_iter().map(|(_, row)| row).collect();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> ExperimentConfig {
        let mut config = ExperimentConfig::default();
        config.system.rounds = 60;
        config.seeds.trials = 3;
        config.controller.nu = vec![0.02, 0.08];
        config
    }

    #[test]
    fn row_count_and_order() {
        let config = small_config();
        let report = sweep(&config).unwrap();
        assert_eq!(report.rows.len(), 2 * 4 * 3);
        assert!(report.failures.is_empty());
        let keys: Vec<_> = report
            .rows
            .iter()
            .map(|r| (r.nu.to_bits(), r.method, r.trial))
            .collect();
        assert_eq!(keys[0], (0.02f64.to_bits(), Method::AdaScale, 0));
        assert_eq!(keys[3], (0.02f64.to_bits(), Method::EqualAlloc, 0));
        assert_eq!(report.certificates.len(), 2 * 3);
        assert!(report.certificates_pass());
    }

    #[test]
    fn equal_alloc_meets_budget_exactly() {
        let mut config = small_config();
        config.controller.methods = vec![Method::EqualAlloc];
        let report = sweep(&config).unwrap();
        for row in &report.rows {
            assert!((row.constraint_lhs - row.nu).abs() <= 1e-12 * row.nu, "{row:?}");
            assert_eq!(row.v, None);
        }
        assert!(report.certificates.is_empty());
    }

    #[test]
    fn optimal_lower_bounds_other_methods() {
        let report = sweep(&small_config()).unwrap();
        for opt in report.rows.iter().filter(|r| r.method == Method::Optimal) {
            for other in report.rows.iter().filter(|r| r.nu == opt.nu && r.trial == opt.trial) {
                if other.constraint_lhs <= other.nu {
                    assert!(opt.total_rdp <= other.total_rdp * (1.0 + 1e-9), "{opt:?} vs {other:?}");
                }
            }
        }
    }

    #[test]
    fn multi_order_epsilon_is_no_worse() {
        let mut config = small_config();
        config.controller.methods = vec![Method::EqualAlloc];
        config.system.dp_orders = RdpOrder::default_grid();
        let report = sweep(&config).unwrap();
        for row in &report.rows {
            assert!(row.best_mean_epsilon.unwrap() <= row.mean_epsilon + 1e-12);
        }
    }
}
