//! Synthetic FedSGD over the air on quadratic losses.
//!
//! Each device holds samples `(u, o)` with loss `½(uᵀw − o)²`. Devices draw
//! Poisson batches, clip per-sample gradients, and the server receives the
//! mean gradient plus receiver noise scaled by `1/√η_t`. Problem constants
//! (smoothness, gradient-variance and similarity bounds) are computed from
//! the data so the convergence bound can be evaluated on real trajectories.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Geometric, StandardNormal, Uniform};

use crate::error::{ensure_nonnegative, ensure_positive, Error, Result};
use crate::rng::{pair_index, stream, Purpose};

/// Safety factor applied to the variance and similarity constants.
pub const CONSTANT_INFLATION: f64 = 1.1;

/// Parameters of a synthetic instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub devices: usize,
    pub dim: usize,
    pub samples_per_device: usize,
    /// Expected Poisson batch size `B`.
    pub batch_size: f64,
    /// Spread of the per-device regression targets around a shared one.
    pub heterogeneity: f64,
    /// Labels carry uniform noise in `[-label_noise, label_noise]`.
    pub label_noise: f64,
    /// Every device holds the same samples.
    pub shared_dataset: bool,
    pub seed: u64,
}

impl ProblemSpec {
    pub fn new(devices: usize, dim: usize, samples_per_device: usize, batch_size: f64, heterogeneity: f64) -> Self {
        ProblemSpec {
            devices,
            dim,
            samples_per_device,
            batch_size,
            heterogeneity,
            label_noise: 0.1,
            shared_dataset: false,
            seed: 0,
        }
    }
}

/// Local dataset and its quadratic loss `f_m(w) = ½wᵀH_m w − b_mᵀw + e_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceData {
    /// One sample per row.
    pub features: DMatrix<f64>,
    pub labels: DVector<f64>,
    pub hessian: DMatrix<f64>,
    pub linear: DVector<f64>,
    pub offset: f64,
    pub batch_size: f64,
}

impl DeviceData {
    fn new(features: DMatrix<f64>, labels: DVector<f64>, batch_size: f64) -> Self {
        let n = features.nrows() as f64;
        let hessian = features.transpose() * &features / n;
        let linear = features.transpose() * &labels / n;
        let offset = 0.5 * labels.norm_squared() / n;
        DeviceData {
            features,
            labels,
            hessian,
            linear,
            offset,
            batch_size,
        }
    }

    pub fn samples(&self) -> usize {
        self.features.nrows()
    }

    pub fn sampling_rate(&self) -> f64 {
        self.batch_size / self.samples() as f64
    }

    pub fn loss(&self, w: &DVector<f64>) -> f64 {
        0.5 * w.dot(&(&self.hessian * w)) - self.linear.dot(w) + self.offset
    }

    pub fn gradient(&self, w: &DVector<f64>) -> DVector<f64> {
        &self.hessian * w - &self.linear
    }

    /// Gradient of the loss of sample `i`.
    pub fn sample_gradient(&self, i: usize, w: &DVector<f64>) -> DVector<f64> {
        let u = self.features.row(i).transpose();
        let residual = u.dot(w) - self.labels[i];
        u * residual
    }
}

/// A quadratic federated problem with the constants of its convergence bound.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticProblem {
    pub devices: Vec<DeviceData>,
    /// Largest curvature of any local loss.
    pub smoothness: f64,
    /// `E‖g_i − ∇f_m‖² ≤ A₁‖∇f_m‖² + A₂` over samples of any device.
    pub a1: f64,
    pub a2: f64,
    /// `(1/M)Σ_m‖∇f_m − ∇f‖² ≤ C₁‖∇f‖² + C₂`.
    pub c1: f64,
    pub c2: f64,
    pub w_star: DVector<f64>,
    pub f_star: f64,
    pub w0: DVector<f64>,
    hessian: DMatrix<f64>,
    linear: DVector<f64>,
    offset: f64,
}

/// A pair `(κ, r)` with `E‖Δ_i v + r_i‖² ≤ κ vᵀB²v + r` for all `v`, where
/// `items` holds `(Δ_i, r_i)` and `base` is `B`. The leading coefficient is
/// twice the smallest feasible one.
fn quadratic_envelope(items: &[(DMatrix<f64>, DVector<f64>)], base: &DMatrix<f64>) -> Result<(f64, f64)> {
    let n = items.len() as f64;
    let dim = base.nrows();
    let mut s = DMatrix::zeros(dim, dim);
    let mut p = DVector::zeros(dim);
    let mut r = 0.0;
    for (delta, offset) in items {
        s += delta.transpose() * delta / n;
        p += delta.transpose() * offset / n;
        r += offset.norm_squared() / n;
    }
    if s.iter().all(|&v| v == 0.0) {
        return Ok((0.0, r));
    }
    let eig = SymmetricEigen::new(base.clone());
    let max_eig = eig.eigenvalues.max();
    if eig.eigenvalues.min() <= 1e-12 * max_eig.abs() {
        return Err(Error::DegenerateData("curvature matrix is singular".into()));
    }
    let inv =
        &eig.eigenvectors * DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l)) * eig.eigenvectors.transpose();
    let scaled = &inv * &s * &inv;
    let kappa = SymmetricEigen::new(0.5 * (&scaled + scaled.transpose()))
        .eigenvalues
        .max()
        .max(0.0);
    let coef = 2.0 * kappa;
    let gap = coef * base * base - &s;
    let gap = 0.5 * (&gap + gap.transpose());
    let chol = Cholesky::new(gap).ok_or_else(|| Error::DegenerateData("envelope system is not definite".into()))?;
    Ok((coef, r + p.dot(&chol.solve(&p))))
}

impl SyntheticProblem {
    /// Draws a problem instance. Features are uniform on `[-1, 1]^d`.
    pub fn build(spec: &ProblemSpec) -> Result<Self> {
        if spec.devices == 0 || spec.dim == 0 || spec.samples_per_device == 0 {
            return Err(Error::invalid(
                "problem",
                "devices, dimension and samples must be positive",
            ));
        }
        ensure_positive("batch size", spec.batch_size)?;
        if spec.batch_size > spec.samples_per_device as f64 {
            return Err(Error::invalid("batch size", "expected batch exceeds the local dataset"));
        }
        ensure_nonnegative("heterogeneity", spec.heterogeneity)?;
        ensure_nonnegative("label noise", spec.label_noise)?;
        let mut rng = stream(spec.seed, Purpose::Problem, 0);
        let unit = Uniform::new_inclusive(-1.0, 1.0).expect("valid range");
        let w_true = DVector::from_fn(spec.dim, |_, _| unit.sample(&mut rng));
        let draw_dataset = |rng: &mut rand_chacha::ChaCha20Rng, target: &DVector<f64>| {
            let features = DMatrix::from_fn(spec.samples_per_device, spec.dim, |_, _| unit.sample(rng));
            let noise = DVector::from_fn(spec.samples_per_device, |_, _| spec.label_noise * unit.sample(rng));
            let labels = &features * target + noise;
            (features, labels)
        };
        let shared = spec.shared_dataset.then(|| draw_dataset(&mut rng, &w_true));
        let mut devices = Vec::with_capacity(spec.devices);
        for _ in 0..spec.devices {
            let (features, labels) = match &shared {
                Some((f, l)) => (f.clone(), l.clone()),
                None => {
                    let shift = DVector::from_fn(spec.dim, |_, _| rng.sample::<f64, _>(StandardNormal));
                    draw_dataset(&mut rng, &(&w_true + spec.heterogeneity * shift))
                }
            };
            devices.push(DeviceData::new(features, labels, spec.batch_size));
        }
        Self::from_devices(devices, DVector::zeros(spec.dim))
    }

    /// Computes every constant from explicit local datasets.
    pub fn from_devices(devices: Vec<DeviceData>, w0: DVector<f64>) -> Result<Self> {
        let m = devices.len() as f64;
        let dim = w0.len();
        let mut hessian = DMatrix::zeros(dim, dim);
        let mut linear = DVector::zeros(dim);
        let mut offset = 0.0;
        for d in &devices {
            if d.hessian.nrows() != dim {
                return Err(Error::DimensionMismatch {
                    what: "device features",
                    expected: dim,
                    actual: d.hessian.nrows(),
                });
            }
            hessian += &d.hessian / m;
            linear += &d.linear / m;
            offset += d.offset / m;
        }
        let chol = Cholesky::new(hessian.clone())
            .ok_or_else(|| Error::DegenerateData("global feature covariance is singular".into()))?;
        let w_star = chol.solve(&linear);
        let f_star = 0.5 * w_star.dot(&(&hessian * &w_star)) - linear.dot(&w_star) + offset;

        let mut smoothness: f64 = 0.0;
        let (mut a1, mut a2): (f64, f64) = (0.0, 0.0);
        for d in &devices {
            smoothness = smoothness.max(SymmetricEigen::new(d.hessian.clone()).eigenvalues.max());
            // Sample-gradient deviations around the local minimizer, or
            // around the origin when every sample shares the local curvature.
            let anchor = Cholesky::new(d.hessian.clone())
                .map(|c| c.solve(&d.linear))
                .unwrap_or_else(|| DVector::zeros(dim));
            let local_grad = d.gradient(&anchor);
            let items: Vec<_> = (0..d.samples())
                .map(|i| {
                    let u = d.features.row(i).transpose();
                    (
                        &u * u.transpose() - &d.hessian,
                        d.sample_gradient(i, &anchor) - &local_grad,
                    )
                })
                .collect();
            let (c, r) = envelope_around(&items, &d.hessian, &local_grad)?;
            a1 = a1.max(c);
            a2 = a2.max(r);
        }
        let items: Vec<_> = devices
            .iter()
            .map(|d| (&d.hessian - &hessian, d.gradient(&w_star)))
            .collect();
        let (c1, c2) = quadratic_envelope(&items, &hessian)?;
        Ok(SyntheticProblem {
            devices,
            smoothness,
            a1: CONSTANT_INFLATION * a1,
            a2: CONSTANT_INFLATION * a2,
            c1: CONSTANT_INFLATION * c1,
            c2: CONSTANT_INFLATION * c2,
            w_star,
            f_star,
            w0,
            hessian,
            linear,
            offset,
        })
    }

    pub fn dim(&self) -> usize {
        self.w0.len()
    }

    /// Average Hessian of the global loss.
    pub fn hessian(&self) -> &DMatrix<f64> {
        &self.hessian
    }

    pub fn loss(&self, w: &DVector<f64>) -> f64 {
        0.5 * w.dot(&(&self.hessian * w)) - self.linear.dot(w) + self.offset
    }

    pub fn gradient(&self, w: &DVector<f64>) -> DVector<f64> {
        &self.hessian * w - &self.linear
    }

    /// Largest learning rate admitted by the convergence bound.
    pub fn step_size_limit(&self) -> f64 {
        1.0 / (4.0 * self.smoothness * (self.c1 + 1.0) * (self.a1 + 1.0))
    }

    /// `2(f(w₀) − f*)/(λT) + 2Lλ(2C₂(A₁+1) + A₂)`.
    pub fn phi(&self, lambda: f64, rounds: usize) -> f64 {
        2.0 * (self.loss(&self.w0) - self.f_star) / (lambda * rounds as f64)
            + 2.0 * self.smoothness * lambda * (2.0 * self.c2 * (self.a1 + 1.0) + self.a2)
    }
}

/// [`quadratic_envelope`] when the local Hessian may be singular: a nonzero
/// local gradient at the anchor only happens when the curvature spread is zero.
fn envelope_around(
    items: &[(DMatrix<f64>, DVector<f64>)],
    base: &DMatrix<f64>,
    local_grad: &DVector<f64>,
) -> Result<(f64, f64)> {
    if items.iter().all(|(delta, _)| delta.iter().all(|&v| v == 0.0)) {
        let r = items.iter().map(|(_, off)| off.norm_squared()).sum::<f64>() / items.len() as f64;
        return Ok((0.0, r));
    }
    if local_grad.norm() > 1e-9 * (1.0 + base.norm()) {
        return Err(Error::DegenerateData("local feature covariance is singular".into()));
    }
    quadratic_envelope(items, base)
}

/// Clipped, batch-averaged gradient of one device in one round.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalGradient {
    pub gradient: DVector<f64>,
    pub realized_batch: usize,
    pub clipped: usize,
}

/// Indices selected by Poisson sampling at rate `q`.
pub fn poisson_sample(n: usize, q: f64, rng: &mut impl Rng) -> Vec<usize> {
    if q >= 1.0 {
        return (0..n).collect();
    }
    if q <= 0.0 {
        return Vec::new();
    }
    let skip = Geometric::new(q).expect("rate in (0, 1)");
    let mut picked = Vec::new();
    let mut i = skip.sample(rng);
    while i < n as u64 {
        picked.push(i as usize);
        i = i.saturating_add(1).saturating_add(skip.sample(rng));
    }
    picked
}

/// Poisson batch of device `m` with per-sample clipping to norm `clip`,
/// summed and divided by the expected batch size.
pub fn local_step(
    problem: &SyntheticProblem,
    w: &DVector<f64>,
    m: usize,
    clip: f64,
    rng: &mut impl Rng,
) -> LocalGradient {
    let device = &problem.devices[m];
    let mut gradient = DVector::zeros(problem.dim());
    let batch = poisson_sample(device.samples(), device.sampling_rate(), rng);
    let mut clipped = 0;
    for &i in &batch {
        let g = device.sample_gradient(i, w);
        let norm = g.norm();
        if norm > clip {
            clipped += 1;
            gradient += g * (clip / norm);
        } else {
            gradient += g;
        }
    }
    LocalGradient {
        gradient: gradient / device.batch_size,
        realized_batch: batch.len(),
        clipped,
    }
}

/// How the receiver noise enters an aggregation round.
#[derive(Debug, Clone, Copy)]
pub enum Aggregation<'a> {
    /// Real Gaussian noise of variance `σ_n²/(2η)` added to the mean gradient.
    Effective,
    /// Channel-inverting complex transmission over `row` with complex noise,
    /// followed by real-part extraction and `1/√η` scaling.
    Complex { row: &'a [Complex64] },
}

/// Model and bookkeeping between rounds.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainState {
    pub w: DVector<f64>,
    pub t: usize,
    pub lambda: f64,
    pub grad_sq_sum: f64,
}

impl TrainState {
    pub fn new(problem: &SyntheticProblem, lambda: f64) -> Self {
        TrainState {
            w: problem.w0.clone(),
            t: 0,
            lambda,
            grad_sq_sum: 0.0,
        }
    }
}

/// Seeds and noise level of one training run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundNoise {
    pub sigma_n_sq: f64,
    pub clip: f64,
    pub sampling_seed: u64,
    pub noise_seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundOutcome {
    pub state: TrainState,
    /// Aggregate `r_t` used in the update.
    pub aggregate: DVector<f64>,
    pub clipped: usize,
}

/// One aggregation round: `w ← w − λ r_t`.
pub fn ota_round(
    problem: &SyntheticProblem,
    state: &TrainState,
    eta: f64,
    noise: &RoundNoise,
    aggregation: Aggregation<'_>,
) -> Result<RoundOutcome> {
    ensure_positive("eta", eta)?;
    ensure_nonnegative("noise variance", noise.sigma_n_sq)?;
    let t = state.t as u64;
    let m = problem.devices.len();
    let dim = problem.dim();
    let mut clipped = 0;
    let locals: Vec<DVector<f64>> = (0..m)
        .map(|dev| {
            let mut rng = stream(noise.sampling_seed, Purpose::Sampling, pair_index(t, dev as u64));
            let local = local_step(problem, &state.w, dev, noise.clip, &mut rng);
            clipped += local.clipped;
            local.gradient
        })
        .collect();
    let mut real_rng = stream(noise.noise_seed, Purpose::Noise, pair_index(t, 0));
    let real: Vec<f64> = (0..dim).map(|_| real_rng.sample(StandardNormal)).collect();
    let aggregate = match aggregation {
        Aggregation::Effective => {
            let scale = (noise.sigma_n_sq / (2.0 * eta)).sqrt();
            let mut r = locals.iter().fold(DVector::zeros(dim), |acc, g| acc + g) / m as f64;
            for (ri, z) in r.iter_mut().zip(&real) {
                *ri += scale * z;
            }
            r
        }
        Aggregation::Complex { row } => {
            if row.len() != m {
                return Err(Error::DimensionMismatch {
                    what: "channel row",
                    expected: m,
                    actual: row.len(),
                });
            }
            let mut imag_rng = stream(noise.noise_seed, Purpose::Noise, pair_index(t, 1));
            let root_eta = eta.sqrt();
            let weights: Vec<Complex64> = row.iter().map(|h| root_eta / (m as f64 * h)).collect();
            let half = (noise.sigma_n_sq / 2.0).sqrt();
            DVector::from_fn(dim, |j, _| {
                let mut y: Complex64 = row
                    .iter()
                    .zip(&weights)
                    .zip(&locals)
                    .map(|((h, a), g)| h * a * g[j])
                    .sum();
                let imag: f64 = imag_rng.sample(StandardNormal);
                y += Complex64::new(half * real[j], half * imag);
                y.re / root_eta
            })
        }
    };
    let w = &state.w - state.lambda * &aggregate;
    let grad_sq = problem.gradient(&state.w).norm_squared();
    Ok(RoundOutcome {
        state: TrainState {
            w,
            t: state.t + 1,
            lambda: state.lambda,
            grad_sq_sum: state.grad_sq_sum + grad_sq,
        },
        aggregate,
        clipped,
    })
}

/// Per-round record of a training run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainRecord {
    pub t: usize,
    /// `‖∇f(w_t)‖²` before the update.
    pub grad_sq: f64,
    pub f_value: f64,
    pub eta: f64,
    /// Per-coordinate variance `σ_n²/(2η_t)`.
    pub effective_noise_var: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainRun {
    pub records: Vec<TrainRecord>,
    pub final_state: TrainState,
    pub clipped: usize,
}

/// Trains for `etas.len()` rounds with the effective-noise aggregation.
pub fn train(problem: &SyntheticProblem, etas: &[f64], lambda: f64, noise: &RoundNoise) -> Result<TrainRun> {
    ensure_positive("learning rate", lambda)?;
    let mut state = TrainState::new(problem, lambda);
    let mut records = Vec::with_capacity(etas.len());
    let mut clipped = 0;
    for &eta in etas {
        records.push(TrainRecord {
            t: state.t,
            grad_sq: problem.gradient(&state.w).norm_squared(),
            f_value: problem.loss(&state.w),
            eta,
            effective_noise_var: noise.sigma_n_sq / (2.0 * eta),
        });
        let outcome = ota_round(problem, &state, eta, noise, Aggregation::Effective)?;
        clipped += outcome.clipped;
        state = outcome.state;
    }
    Ok(TrainRun {
        records,
        final_state: state,
        clipped,
    })
}

/// Seed-averaged convergence measure against its bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    /// Mean over seeds of `(1/T) Σ_t ‖∇f(w_t)‖²`.
    pub lhs: f64,
    pub rhs: f64,
    pub phi: f64,
    /// `(Lλ/2T) Σ_t d σ_n² / η_t`.
    pub noise_term: f64,
    pub per_seed: Vec<f64>,
    pub clipped: usize,
    pub step_size_limit: f64,
}

impl ConvergenceReport {
    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }

    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

/// Runs `trials` seeds with sampling seed `noise.sampling_seed + i` and
/// noise seed `noise.noise_seed + i` and compares the seed-averaged gradient
/// norm with the bound.
pub fn verify_convergence_bound(
    problem: &SyntheticProblem,
    etas: &[f64],
    lambda: f64,
    noise: &RoundNoise,
    trials: usize,
) -> Result<ConvergenceReport> {
    let limit = problem.step_size_limit();
    if !(lambda > 0.0 && lambda <= limit) {
        return Err(Error::StepSize { lambda, limit });
    }
    if etas.is_empty() || trials == 0 {
        return Err(Error::invalid(
            "verification",
            "at least one round and one trial are required",
        ));
    }
    let rounds = etas.len() as f64;
    let mut per_seed = Vec::with_capacity(trials);
    let mut clipped = 0;
    for i in 0..trials as u64 {
        let seeded = RoundNoise {
            sampling_seed: noise.sampling_seed.wrapping_add(i),
            noise_seed: noise.noise_seed.wrapping_add(i),
            ..*noise
        };
        let run = train(problem, etas, lambda, &seeded)?;
        clipped += run.clipped;
        per_seed.push(run.final_state.grad_sq_sum / rounds);
    }
    let lhs = per_seed.iter().sum::<f64>() / trials as f64;
    let phi = problem.phi(lambda, etas.len());
    let d = problem.dim() as f64;
    let noise_term =
        problem.smoothness * lambda / (2.0 * rounds) * etas.iter().map(|eta| d * noise.sigma_n_sq / eta).sum::<f64>();
    Ok(ConvergenceReport {
        lhs,
        rhs: phi + noise_term,
        phi,
        noise_term,
        per_seed,
        clipped,
        step_size_limit: limit,
    })
}

/// Relation between a convergence target `γ` and the constraint budget `ν`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceBudget {
    pub gamma: f64,
    pub phi: f64,
    pub phi_prime: f64,
    pub nu: f64,
}

impl ConvergenceBudget {
    /// `ν = 2(γ − φ′)/(λL)`.
    pub fn from_gamma(gamma: f64, phi: f64, phi_prime: f64, lambda: f64, smoothness: f64) -> Result<Self> {
        ensure_positive("learning rate", lambda)?;
        ensure_positive("smoothness", smoothness)?;
        Ok(ConvergenceBudget {
            gamma,
            phi,
            phi_prime,
            nu: 2.0 * (gamma - phi_prime) / (lambda * smoothness),
        })
    }

    /// `φ′ = φ + (Lλ/2T) Σ_t d σ_n² / (h_min,t² x_max)`.
    pub fn phi_prime(
        phi: f64,
        smoothness: f64,
        lambda: f64,
        d: f64,
        sigma_n_sq: f64,
        h_min_sq: &[f64],
        x_max: f64,
    ) -> f64 {
        let t = h_min_sq.len() as f64;
        phi + smoothness * lambda / (2.0 * t) * h_min_sq.iter().map(|h| d * sigma_n_sq / (h * x_max)).sum::<f64>()
    }
}

/// Monte-Carlo estimate of `E[|batch|²]/B²` under Poisson sampling.
pub fn batch_second_moment(samples: usize, batch_size: f64, draws: usize, seed: u64) -> f64 {
    let mut rng = stream(seed, Purpose::Sampling, u64::MAX);
    let q = batch_size / samples as f64;
    let total: f64 = (0..draws)
        .map(|_| {
            let b = poisson_sample(samples, q, &mut rng).len() as f64;
            b * b
        })
        .sum();
    total / draws as f64 / (batch_size * batch_size)
}
