//! Proven bounds on the online controller, evaluated on a concrete trace.

use serde::Serialize;

use crate::baselines::OfflineSolution;
use crate::controller::RunSummary;
use crate::error::{ensure_nonnegative, Error, Result};
use crate::system::SystemModel;

/// Relative slack for floating-point accumulation in the bound comparisons.
pub const CERTIFICATE_REL_SLACK: f64 = 1e-9;
/// Largest negative regret tolerated from the offline solver.
pub const REGRET_FLOOR: f64 = -1e-6;

/// `(2V Σ_t Σ_m ρ_m(x_max) + T ν²)^{1/2}`: the largest value the virtual
/// queue can reach on this trace.
pub fn compute_q_t_max(h_min_sq: &[f64], model: &SystemModel, v: f64, nu: f64) -> Result<f64> {
    ensure_nonnegative("V", v)?;
    ensure_nonnegative("nu", nu)?;
    let leakage: f64 = if v > 0.0 {
        h_min_sq.iter().map(|&h| model.leakage(model.x_max(), h)).sum()
    } else {
        0.0
    };
    Ok((2.0 * v * leakage + h_min_sq.len() as f64 * nu * nu).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCertificate {
    pub rounds: usize,
    pub v: f64,
    pub nu: f64,
    pub q_t_max: f64,
    pub max_queue: f64,
    /// `(1/T) Σ_t c_t (1/x_t − 1/x_max) − ν`.
    pub violation_lhs: f64,
    /// `Q_T^max / T`.
    pub violation_bound: f64,
    /// `(1/T)(Σ leakage of the controller − Σ leakage of the offline optimum)`.
    pub regret: f64,
    /// `Q_T^max ν / V + T ν² / (2V) + ν² / (2V)`.
    pub regret_bound: f64,
    pub queue_pass: bool,
    pub violation_pass: bool,
    pub regret_pass: bool,
    /// Regret is at least [`REGRET_FLOOR`]. The optimum can only be beaten
    /// by a run that overspends the budget, so this is required only when
    /// the run met the budget.
    pub regret_floor_pass: bool,
}

impl BoundCertificate {
    pub fn passed(&self) -> bool {
        self.queue_pass
            && self.violation_pass
            && self.regret_pass
            && (self.regret_floor_pass || self.violation_lhs > 0.0)
    }
}

fn within(lhs: f64, bound: f64) -> bool {
    lhs <= bound + CERTIFICATE_REL_SLACK * bound.abs().max(lhs.abs())
}

/// Evaluates the queue, violation and regret bounds for one controller run
/// against the offline optimum of the same trace and budget.
pub fn certify_run(
    online: &RunSummary,
    optimal: &OfflineSolution,
    h_min_sq: &[f64],
    model: &SystemModel,
    v: f64,
    nu: f64,
) -> Result<BoundCertificate> {
    let t = h_min_sq.len();
    if online.rounds != t || optimal.x_star.len() != t {
        return Err(Error::DimensionMismatch {
            what: "certified rounds",
            expected: t,
            actual: if online.rounds != t {
                online.rounds
            } else {
                optimal.x_star.len()
            },
        });
    }
    let tf = t as f64;
    let q_t_max = compute_q_t_max(h_min_sq, model, v, nu)?;
    let violation_lhs = online.constraint_sum / tf - nu;
    let violation_bound = q_t_max / tf;
    let regret = (online.leakage_sum - optimal.primal_value) / tf;
    let regret_bound = q_t_max * nu / v + tf * nu * nu / (2.0 * v) + nu * nu / (2.0 * v);
    Ok(BoundCertificate {
        rounds: t,
        v,
        nu,
        q_t_max,
        max_queue: online.max_queue,
        violation_lhs,
        violation_bound,
        regret,
        regret_bound,
        queue_pass: within(online.max_queue, q_t_max),
        violation_pass: within(violation_lhs, violation_bound),
        regret_pass: within(regret, regret_bound),
        regret_floor_pass: regret >= REGRET_FLOOR,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::accountant::RdpOrder;
    use crate::baselines::offline_optimal;
    use crate::channel::{generate_trace, place_devices, DeviceProfile};
    use crate::controller::{summarize_adascale, ControllerConfig};
    use crate::system::NoiseSpec;

    fn model() -> (SystemModel, Vec<DeviceProfile>) {
        let profiles = place_devices(10, 10.0, 200.0, 60, 6000, 3).unwrap();
        let noise = NoiseSpec::from_dbm(-90.0, 23.0, 26010).unwrap();
        (
            SystemModel::new(&profiles, noise, 1.0, RdpOrder::new(3).unwrap()).unwrap(),
            profiles,
        )
    }

    #[test]
    fn q_t_max_degenerate_cases() {
        let (model, _) = model();
        let h = [1e-12, 3e-12, 2e-13];
        assert_eq!(compute_q_t_max(&h, &model, 0.0, 0.0).unwrap(), 0.0);
        let nu = 0.3;
        assert!((compute_q_t_max(&h, &model, 0.0, nu).unwrap() - nu * 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn q_t_max_with_vanishing_leakage() {
        // Tiny sampling rate: the leakage at x_max is negligible.
        let profiles: Vec<_> = (0..3)
            .map(|m| DeviceProfile::new(m, 150.0, 1, 1_000_000_000).unwrap())
            .collect();
        let noise = NoiseSpec::from_dbm(-90.0, 23.0, 100).unwrap();
        let model = SystemModel::new(&profiles, noise, 1.0, RdpOrder::new(3).unwrap()).unwrap();
        let h = vec![1e-16; 40];
        let nu = 0.05;
        let q = compute_q_t_max(&h, &model, 1.0, nu).unwrap();
        assert!((q - nu * 40f64.sqrt()).abs() <= 1e-9 * q);
    }

    #[test]
    fn slack_budget_certificate() {
        let (model, profiles) = model();
        let trace = generate_trace(&profiles, 60, 1).unwrap();
        let nu = 5.0;
        let v = 1e-9;
        let config = ControllerConfig::with_default_tau(&model, v, nu).unwrap();
        let run = summarize_adascale(trace.h_min_sq(), &model, &config).unwrap();
        let opt = offline_optimal(&trace, &model, nu).unwrap();
        let cert = certify_run(&run, &opt, trace.h_min_sq(), &model, v, nu).unwrap();
        // Almost none of the budget is used.
        assert!(cert.violation_lhs < -nu * (1.0 - 1e-6));
        assert!(cert.regret >= -1e-6);
        assert!(cert.passed());
    }

    #[test]
    fn certificate_holds_on_a_short_trace() {
        let (model, profiles) = model();
        let trace = generate_trace(&profiles, 200, 2).unwrap();
        for (v, nu) in [(1e-3, 0.01), (0.5, 0.04), (10.0, 0.16)] {
            let config = ControllerConfig::with_default_tau(&model, v, nu).unwrap();
            let run = summarize_adascale(trace.h_min_sq(), &model, &config).unwrap();
            let opt = offline_optimal(&trace, &model, nu).unwrap();
            let cert = certify_run(&run, &opt, trace.h_min_sq(), &model, v, nu).unwrap();
            assert!(cert.queue_pass && cert.violation_pass && cert.regret_pass, "{cert:?}");
        }
    }

    #[test]
    fn mismatched_lengths_are_rejected() {
        let (model, profiles) = model();
        let trace = generate_trace(&profiles, 20, 2).unwrap();
        let config = ControllerConfig::with_default_tau(&model, 0.1, 0.02).unwrap();
        let run = summarize_adascale(trace.h_min_sq(), &model, &config).unwrap();
        let opt = offline_optimal(&trace.truncated(10), &model, 0.02).unwrap();
        assert!(certify_run(&run, &opt, trace.h_min_sq(), &model, 0.1, 0.02).is_err());
    }
}
