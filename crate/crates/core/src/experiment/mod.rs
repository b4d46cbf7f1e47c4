//! Experiment orchestration: deployments built from a configuration, method
//! runs on shared traces, `V` tuning, certificates and reports.

pub mod certificate;
pub mod config;
pub mod report;
pub mod sweep;
pub mod tuning;

pub use certificate::{certify_run, compute_q_t_max, BoundCertificate};
pub use config::{ExperimentConfig, Method, PredictorKind, VMode};
pub use report::{MeanCi, Summary, SummaryRow};
pub use sweep::{sweep, sweep_traces, SweepFailure, SweepReport, SweepRow, TrialCertificate};
pub use tuning::{tune_v, TunedV};

use crate::baselines::{offline_optimal, run_equal_alloc, run_estim_future, ChannelPredictor, OfflineSolution};
use crate::channel::{expected_h_min_sq, generate_trace, place_devices, ChannelTrace, DeviceProfile};
use crate::controller::{run_adascale, ControllerConfig, Trajectory};
use crate::error::Result;
use crate::system::{NoiseSpec, SystemModel};

/// Device placement and the derived system model of one experiment.
#[derive(Debug, Clone)]
pub struct Deployment {
    pub profiles: Vec<DeviceProfile>,
    pub model: SystemModel,
}

impl Deployment {
    pub fn from_config(config: &ExperimentConfig) -> Result<Self> {
        let s = &config.system;
        let profiles = place_devices(
            s.devices,
            s.r_min,
            s.r_max,
            s.batch_size,
            s.dataset_size,
            config.seeds.placement,
        )?;
        Self::with_profiles(config, profiles)
    }

    /// A deployment with externally supplied profiles, e.g. from a trace file.
    pub fn with_profiles(config: &ExperimentConfig, profiles: Vec<DeviceProfile>) -> Result<Self> {
        let s = &config.system;
        let noise = NoiseSpec::from_dbm(s.noise_dbm, s.p_max_dbm, s.model_dim)?;
        let model = SystemModel::new(&profiles, noise, s.clip, s.alpha)?;
        Ok(Deployment { profiles, model })
    }

    /// The fading trace of `trial`.
    pub fn trace(&self, config: &ExperimentConfig, trial: usize) -> Result<ChannelTrace> {
        generate_trace(
            &self.profiles,
            config.system.rounds,
            config.seeds.fading_for_trial(trial),
        )
    }

    pub fn predictor(&self, kind: PredictorKind) -> Result<ChannelPredictor> {
        Ok(match kind {
            PredictorKind::KnownLaw => ChannelPredictor::KnownLaw(expected_h_min_sq(&self.profiles)?),
            PredictorKind::Empirical => ChannelPredictor::empirical(),
        })
    }
}

/// Output of one method on one trace.
#[derive(Debug, Clone)]
pub struct MethodRun {
    pub method: Method,
    pub trajectory: Trajectory,
    /// `V` used by the online controller.
    pub v: Option<f64>,
    pub tuning: Option<TunedV>,
    pub offline: Option<OfflineSolution>,
}

/// Runs `method` on `trace` with budget `nu`. `v_guess` seeds the `V`
/// search when `V` is tuned.
pub fn run_method(
    method: Method,
    trace: &ChannelTrace,
    deployment: &Deployment,
    config: &ExperimentConfig,
    nu: f64,
    v_guess: Option<f64>,
) -> Result<MethodRun> {
    let model = &deployment.model;
    let (mut v, mut tuning, mut offline) = (None, None, None);
    let trajectory = match method {
        Method::EqualAlloc => run_equal_alloc(trace, model, nu)?,
        Method::EstimFuture => {
            let predictor = deployment.predictor(config.controller.predictor)?;
            run_estim_future(trace, model, nu, predictor)?
        }
        Method::AdaScale => {
            let c = &config.controller;
            let tau = c.tau_rel * model.x_max();
            let chosen = match c.v_mode {
                VMode::Fixed => c.v,
                VMode::Power => c.v_coefficient * (trace.rounds() as f64).powf(c.v_beta),
                VMode::Tuned => {
                    let tuned = tune_v(trace.h_min_sq(), model, nu, tau, c.tune_rel_tol, v_guess)?;
                    let chosen = tuned.v;
                    tuning = Some(tuned);
                    chosen
                }
            };
            v = Some(chosen);
            run_adascale(trace, model, &ControllerConfig::new(chosen, nu, tau)?)?
        }
        Method::Optimal => {
            let solution = offline_optimal(trace, model, nu)?;
            let trajectory = Trajectory::from_schedule(model, trace, &solution.x_star)?;
            offline = Some(solution);
            trajectory
        }
    };
    let run = MethodRun {
        method,
        trajectory,
        v,
        tuning,
        offline,
    };
    Ok(run)
}
