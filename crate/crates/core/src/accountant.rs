//! Rényi-DP accounting for the Poisson-subsampled Gaussian mechanism.
//!
//! For an integer order `α ≥ 2`, sampling rate `q` and effective noise
//! multiplier `σ`, the per-invocation leakage is `ρ = A_α(q, σ) / (α − 1)` with
//!
//! ```text
//! A_α = ln Σ_{k=0}^{α} C(α,k) (1−q)^{α−k} q^k exp((k²−k) / (2σ²)).
//! ```
//!
//! The binomial weights `w_k` sum to one and the `k = 0, 1` exponents vanish,
//! so the bracket equals `1 + Σ_{k≥2} w_k expm1((k²−k)s)` with `s = 1/(2σ²)`.
//! Every term of that excess is nonnegative, which gives full relative
//! precision when the leakage is tiny. When an exponent would overflow the
//! excess is accumulated as a max-shifted log-sum-exp instead.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{ensure_nonnegative, ensure_positive, Error, Result};

/// Integer Rényi order, at least 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct RdpOrder(u32);

impl RdpOrder {
    pub fn new(alpha: u32) -> Result<Self> {
        if alpha >= 2 {
            Ok(RdpOrder(alpha))
        } else {
            Err(Error::invalid(
                "RDP order",
                format!("alpha must be an integer >= 2, got {alpha}"),
            ))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0)
    }

    /// Orders `2..=64`, the grid used when DP is optimized over orders.
    pub fn default_grid() -> Vec<RdpOrder> {
        (2..=64).map(RdpOrder).collect()
    }
}

impl TryFrom<u32> for RdpOrder {
    type Error = Error;
    fn try_from(alpha: u32) -> Result<Self> {
        RdpOrder::new(alpha)
    }
}

impl From<RdpOrder> for u32 {
    fn from(order: RdpOrder) -> u32 {
        order.0
    }
}

impl fmt::Display for RdpOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Parameters of one sampled Gaussian mechanism invocation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgmParams {
    q: f64,
    sigma_eff: f64,
}

impl SgmParams {
    pub fn new(q: f64, sigma_eff: f64) -> Result<Self> {
        check_rate(q)?;
        ensure_positive("effective noise multiplier", sigma_eff)?;
        Ok(SgmParams { q, sigma_eff })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn sigma_eff(&self) -> f64 {
        self.sigma_eff
    }
}

fn check_rate(q: f64) -> Result<f64> {
    if q > 0.0 && q <= 1.0 {
        Ok(q)
    } else {
        Err(Error::invalid(
            "sampling rate",
            format!("q must lie in (0, 1], got {q}"),
        ))
    }
}

/// `ln C(n, k)`: exact integer arithmetic up to n = 60, log-gamma above.
pub fn ln_binomial(n: u32, k: u32) -> f64 {
    assert!(k <= n, "ln_binomial requires k <= n");
    if n <= 60 {
        let k = k.min(n - k);
        let mut c: u128 = 1;
        for i in 0..k {
            c = c * u128::from(n - i) / u128::from(i + 1);
        }
        (c as f64).ln()
    } else {
        let (n, k) = (f64::from(n), f64::from(k));
        ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)
    }
}

/// `ln(e^y − 1)` for `y ≥ 0`.
fn ln_expm1(y: f64) -> f64 {
    if y > 30.0 {
        y + (-(-y).exp()).ln_1p()
    } else {
        y.exp_m1().ln()
    }
}

/// `ln(1 + e^d)`.
fn softplus(d: f64) -> f64 {
    if d > 0.0 {
        d + (-d).exp().ln_1p()
    } else {
        d.exp().ln_1p()
    }
}

/// Max-shifted `ln Σ e^{v}`; `-inf` for an empty or all `-inf` input.
pub fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    if max == f64::INFINITY {
        return max;
    }
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

// Above this exponent magnitude the linear-space excess sum is abandoned.
const LINEAR_EXPONENT_LIMIT: f64 = 600.0;

#[derive(Debug, Clone, Copy)]
struct Term {
    /// k² − k
    b: f64,
    log_w: f64,
    w: f64,
}

/// `A_α(q, ·)` for fixed `(α, q)` as a function of `s = 1/(2σ²)`.
///
/// The binomial weights are computed once, so evaluating the curve for many
/// noise levels (one per round and device) costs a handful of `expm1` calls.
#[derive(Debug, Clone)]
pub struct SgmCurve {
    order: RdpOrder,
    q: f64,
    terms: Vec<Term>,
    b_max: f64,
    linear_weights: bool,
}

impl SgmCurve {
    pub fn new(order: RdpOrder, q: f64) -> Result<Self> {
        check_rate(q)?;
        let alpha = order.get();
        let ln_q = q.ln();
        let ln_one_minus_q = (-q).ln_1p();
        let mut terms = Vec::with_capacity(alpha as usize - 1);
        for k in 2..=alpha {
            let tail = alpha - k;
            // (1−q)^0 = 1 even when q = 1.
            let tail_log = if tail == 0 {
                0.0
            } else {
                f64::from(tail) * ln_one_minus_q
            };
            let log_w = ln_binomial(alpha, k) + tail_log + f64::from(k) * ln_q;
            if log_w == f64::NEG_INFINITY {
                continue;
            }
            let k = f64::from(k);
            terms.push(Term {
                b: k * k - k,
                log_w,
                w: log_w.exp(),
            });
        }
        let b_max = terms.iter().map(|t| t.b).fold(0.0, f64::max);
        let linear_weights = terms.iter().all(|t| t.log_w > -LINEAR_EXPONENT_LIMIT);
        Ok(SgmCurve {
            order,
            q,
            terms,
            b_max,
            linear_weights,
        })
    }

    pub fn order(&self) -> RdpOrder {
        self.order
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    fn linear(&self, s: f64) -> bool {
        self.linear_weights && self.b_max * s <= LINEAR_EXPONENT_LIMIT
    }

    /// `A_α` at `s = 1/(2σ²) ≥ 0`.
    pub fn log_moment(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        if self.linear(s) {
            let excess: f64 = self.terms.iter().map(|t| t.w * (t.b * s).exp_m1()).sum();
            excess.ln_1p()
        } else {
            softplus(log_sum_exp(self.terms.iter().map(|t| t.log_w + ln_expm1(t.b * s))))
        }
    }

    /// `(A_α, dA_α/ds)` at `s`.
    pub fn log_moment_with_slope(&self, s: f64) -> (f64, f64) {
        let s = s.max(0.0);
        if self.linear(s) {
            let mut excess = 0.0;
            let mut numerator = 0.0;
            for t in &self.terms {
                let em1 = (t.b * s).exp_m1();
                excess += t.w * em1;
                numerator += t.w * t.b * (em1 + 1.0);
            }
            (excess.ln_1p(), numerator / (1.0 + excess))
        } else {
            let a = softplus(log_sum_exp(self.terms.iter().map(|t| t.log_w + ln_expm1(t.b * s))));
            let log_num = log_sum_exp(self.terms.iter().map(|t| t.log_w + t.b.ln() + t.b * s));
            (a, (log_num - a).exp())
        }
    }

    /// RDP leakage `ρ_α(q, σ)`.
    pub fn rdp(&self, sigma_eff: f64) -> f64 {
        self.rdp_at(1.0 / (2.0 * sigma_eff * sigma_eff))
    }

    /// RDP leakage at `s = 1/(2σ²)`.
    pub fn rdp_at(&self, s: f64) -> f64 {
        self.log_moment(s) / (self.order.as_f64() - 1.0)
    }
}

/// Per-invocation RDP `ρ_α(q, σ_eff)` of the sampled Gaussian mechanism.
pub fn rdp_of_sgm(order: RdpOrder, params: SgmParams) -> Result<f64> {
    Ok(SgmCurve::new(order, params.q)?.rdp(params.sigma_eff))
}

/// An `(ε, δ)`-DP statement obtained from an RDP bound at `order`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DpGuarantee {
    pub epsilon: f64,
    pub delta: f64,
    pub order: RdpOrder,
}

impl DpGuarantee {
    /// The conversion can produce ε < 0 for very small ρ; it is reported
    /// unclamped and flagged here.
    pub fn is_negative(&self) -> bool {
        self.epsilon < 0.0
    }

    /// ε clamped at zero, for callers that treat it as a budget.
    pub fn clamped_epsilon(&self) -> f64 {
        self.epsilon.max(0.0)
    }
}

fn check_delta(delta: f64) -> Result<f64> {
    if delta > 0.0 && delta < 1.0 {
        Ok(delta)
    } else {
        Err(Error::invalid(
            "delta",
            format!("delta must lie in (0, 1), got {delta}"),
        ))
    }
}

/// `ε = ρ + ln((α−1)/α) − (ln δ + ln α)/(α−1)`.
pub fn rdp_to_dp(rho: f64, order: RdpOrder, delta: f64) -> Result<DpGuarantee> {
    ensure_nonnegative("RDP value", rho)?;
    check_delta(delta)?;
    let alpha = order.as_f64();
    let epsilon = rho + ((alpha - 1.0) / alpha).ln() - (delta.ln() + alpha.ln()) / (alpha - 1.0);
    Ok(DpGuarantee { epsilon, delta, order })
}

/// Smallest ε over the supplied orders. Ties keep the lowest order.
pub fn best_dp_over_orders(rho_at_orders: &BTreeMap<RdpOrder, f64>, delta: f64) -> Result<DpGuarantee> {
    if rho_at_orders.is_empty() {
        return Err(Error::invalid("order map", "at least one RDP order is required"));
    }
    let mut best: Option<DpGuarantee> = None;
    for (&order, &rho) in rho_at_orders {
        let candidate = rdp_to_dp(rho, order, delta)?;
        if best.is_none_or(|b| candidate.epsilon < b.epsilon) {
            best = Some(candidate);
        }
    }
    Ok(best.expect("non-empty map"))
}

/// Cumulative per-device RDP at a single order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrivacyLedger {
    per_device_rdp: Vec<f64>,
    order: RdpOrder,
    rounds_accumulated: usize,
}

impl PrivacyLedger {
    pub fn new(devices: usize, order: RdpOrder) -> Self {
        PrivacyLedger {
            per_device_rdp: vec![0.0; devices],
            order,
            rounds_accumulated: 0,
        }
    }

    pub fn from_totals(per_device_rdp: Vec<f64>, order: RdpOrder, rounds_accumulated: usize) -> Result<Self> {
        for &rho in &per_device_rdp {
            ensure_nonnegative("ledger entry", rho)?;
        }
        Ok(PrivacyLedger {
            per_device_rdp,
            order,
            rounds_accumulated,
        })
    }

    pub fn per_device_rdp(&self) -> &[f64] {
        &self.per_device_rdp
    }

    pub fn order(&self) -> RdpOrder {
        self.order
    }

    pub fn rounds_accumulated(&self) -> usize {
        self.rounds_accumulated
    }

    pub fn devices(&self) -> usize {
        self.per_device_rdp.len()
    }

    /// Adds one round of per-device increments.
    pub fn compose(mut self, round_increments: &[f64]) -> Result<Self> {
        if round_increments.len() != self.per_device_rdp.len() {
            return Err(Error::DimensionMismatch {
                what: "round increments",
                expected: self.per_device_rdp.len(),
                actual: round_increments.len(),
            });
        }
        for &inc in round_increments {
            ensure_nonnegative("RDP increment", inc)?;
        }
        for (total, inc) in self.per_device_rdp.iter_mut().zip(round_increments) {
            *total += inc;
        }
        self.rounds_accumulated += 1;
        Ok(self)
    }

    /// Mean cumulative RDP across devices.
    pub fn mean_rdp(&self) -> f64 {
        if self.per_device_rdp.is_empty() {
            return 0.0;
        }
        self.per_device_rdp.iter().sum::<f64>() / self.per_device_rdp.len() as f64
    }

    pub fn total_rdp(&self) -> f64 {
        self.per_device_rdp.iter().sum()
    }

    pub fn to_dp(&self, delta: f64) -> Result<Vec<DpGuarantee>> {
        self.per_device_rdp
            .iter()
            .map(|&rho| rdp_to_dp(rho, self.order, delta))
            .collect()
    }
}
