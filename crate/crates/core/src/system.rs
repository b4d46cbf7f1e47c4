//! Static deployment model: maps a receive-scaling variable `x` and a
//! round's minimum normalized gain to per-device noise multipliers, RDP
//! leakage and the convergence-constraint term.
//!
//! With channel-inversion transmit weights the effective noise multiplier of
//! device `m` is `σ_m = κ_m / √x` with `κ_m = M B_m σ_n / (√2 G h_min)`, so the
//! accountant variable `s = 1/(2σ_m²) = x h_min² G² / (M² B_m² σ_n²)` is
//! linear in `x`. Devices sharing `(B_m, n_m)` share one RDP curve and are
//! evaluated once.

use serde::{Deserialize, Serialize};

use crate::accountant::{RdpOrder, SgmCurve};
use crate::channel::{dbm_to_watts, DeviceProfile};
use crate::error::{ensure_positive, Error, Result};

/// Receiver noise, power budget and payload size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Receiver noise power σ_n² in watts.
    pub sigma_n_sq: f64,
    /// Per-device power budget in watts.
    pub p_max: f64,
    pub model_dim: usize,
}

impl NoiseSpec {
    pub fn new(sigma_n_sq: f64, p_max: f64, model_dim: usize) -> Result<Self> {
        ensure_positive("noise power", sigma_n_sq)?;
        ensure_positive("power budget", p_max)?;
        if model_dim == 0 {
            return Err(Error::invalid("model dimension", "must be at least 1"));
        }
        Ok(NoiseSpec {
            sigma_n_sq,
            p_max,
            model_dim,
        })
    }

    pub fn from_dbm(noise_dbm: f64, p_max_dbm: f64, model_dim: usize) -> Result<Self> {
        Self::new(dbm_to_watts(noise_dbm), dbm_to_watts(p_max_dbm), model_dim)
    }
}

#[derive(Debug, Clone)]
struct DeviceClass {
    curve: SgmCurve,
    /// `G² / (M² B² σ_n²)`: multiplies `x · h_min²` to give `s`.
    gain: f64,
    count: usize,
}

/// Everything about the deployment that does not change between rounds.
#[derive(Debug, Clone)]
pub struct SystemModel {
    noise: NoiseSpec,
    clip: f64,
    order: RdpOrder,
    devices: usize,
    batch_sizes: Vec<f64>,
    classes: Vec<DeviceClass>,
    class_of: Vec<usize>,
    x_max: f64,
}

impl SystemModel {
    /// `clip` is the gradient-norm bound, realized as the clipping threshold.
    pub fn new(profiles: &[DeviceProfile], noise: NoiseSpec, clip: f64, order: RdpOrder) -> Result<Self> {
        if profiles.is_empty() {
            return Err(Error::invalid("profiles", "at least one device is required"));
        }
        ensure_positive("clipping threshold", clip)?;
        let devices = profiles.len();
        let m = devices as f64;
        let mut keys: Vec<(u32, u32)> = Vec::new();
        let mut classes: Vec<DeviceClass> = Vec::new();
        let mut class_of = Vec::with_capacity(devices);
        for p in profiles {
            let key = (p.batch_size, p.dataset_size);
            let idx = match keys.iter().position(|k| *k == key) {
                Some(i) => i,
                None => {
                    let b = f64::from(p.batch_size);
                    keys.push(key);
                    classes.push(DeviceClass {
                        curve: SgmCurve::new(order, p.sampling_rate())?,
                        gain: clip * clip / (m * m * b * b * noise.sigma_n_sq),
                        count: 0,
                    });
                    classes.len() - 1
                }
            };
            classes[idx].count += 1;
            class_of.push(idx);
        }
        let x_max = noise.p_max * noise.model_dim as f64 * m * m / (clip * clip);
        Ok(SystemModel {
            noise,
            clip,
            order,
            devices,
            batch_sizes: profiles.iter().map(|p| f64::from(p.batch_size)).collect(),
            classes,
            class_of,
            x_max,
        })
    }

    pub fn devices(&self) -> usize {
        self.devices
    }

    pub fn noise(&self) -> NoiseSpec {
        self.noise
    }

    pub fn clip(&self) -> f64 {
        self.clip
    }

    pub fn order(&self) -> RdpOrder {
        self.order
    }

    /// `P_max d M² / G²`.
    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    /// `d σ_n² / h_min²`.
    pub fn constraint_coefficient(&self, h_min_sq: f64) -> f64 {
        self.noise.model_dim as f64 * self.noise.sigma_n_sq / h_min_sq
    }

    /// `c (1/x − 1/x_max)`.
    pub fn constraint_term(&self, x: f64, h_min_sq: f64) -> f64 {
        self.constraint_coefficient(h_min_sq) * (1.0 / x - 1.0 / self.x_max)
    }

    /// `κ_m` such that `σ_m(x) = κ_m / √x`.
    pub fn kappas(&self, h_min_sq: f64) -> Vec<f64> {
        let m = self.devices as f64;
        let sigma_n = self.noise.sigma_n_sq.sqrt();
        self.batch_sizes
            .iter()
            .map(|b| m * b * sigma_n / (std::f64::consts::SQRT_2 * self.clip * h_min_sq.sqrt()))
            .collect()
    }

    pub fn sigma_per_device(&self, x: f64, h_min_sq: f64) -> Vec<f64> {
        let root = x.sqrt();
        self.kappas(h_min_sq).into_iter().map(|k| k / root).collect()
    }

    /// Per-device RDP increment of one round at `x`.
    pub fn rho_per_device(&self, x: f64, h_min_sq: f64) -> Vec<f64> {
        let per_class: Vec<f64> = self
            .classes
            .iter()
            .map(|c| c.curve.rdp_at(x * h_min_sq * c.gain))
            .collect();
        self.class_of.iter().map(|&i| per_class[i]).collect()
    }

    /// `Σ_m ρ_m(x)` for one round.
    pub fn leakage(&self, x: f64, h_min_sq: f64) -> f64 {
        let scale = self.order.as_f64() - 1.0;
        self.classes
            .iter()
            .map(|c| c.count as f64 * c.curve.log_moment(x * h_min_sq * c.gain))
            .sum::<f64>()
            / scale
    }

    /// `(Σ_m ρ_m(x), d/dx Σ_m ρ_m(x))` for one round.
    pub fn leakage_with_slope(&self, x: f64, h_min_sq: f64) -> (f64, f64) {
        let scale = self.order.as_f64() - 1.0;
        let mut value = 0.0;
        let mut slope = 0.0;
        for c in &self.classes {
            let ds_dx = h_min_sq * c.gain;
            let (a, da) = c.curve.log_moment_with_slope(x * ds_dx);
            let n = c.count as f64;
            value += n * a;
            slope += n * da * ds_dx;
        }
        (value / scale, slope / scale)
    }

    /// `η = x · h_min²`.
    pub fn eta(&self, x: f64, h_min_sq: f64) -> f64 {
        eta_from_x(x, h_min_sq)
    }

    /// Transmit power of each device under channel inversion at receive
    /// scaling `eta`: `η G² k_m² / (d M² |h_m|²)`.
    pub fn transmit_powers(&self, eta: f64, gains_sq: &[f64], k_sq: &[f64]) -> Vec<f64> {
        let m = self.devices as f64;
        let base = eta * self.clip * self.clip / (self.noise.model_dim as f64 * m * m);
        gains_sq.iter().zip(k_sq).map(|(g, k)| base * k / g).collect()
    }
}

/// `η_t = x_t · min_m |h_{m,t}|² / k_m²` from a round's raw channel powers.
pub fn eta_from_channels(x: f64, gains_sq: &[f64], k_sq: &[f64]) -> f64 {
    let h_min_sq = gains_sq
        .iter()
        .zip(k_sq)
        .map(|(g, k)| g / k)
        .fold(f64::INFINITY, f64::min);
    eta_from_x(x, h_min_sq)
}

pub fn eta_from_x(x: f64, h_min_sq: f64) -> f64 {
    x * h_min_sq
}
