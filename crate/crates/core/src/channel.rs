//! Device placement, COST-Hata path loss and i.i.d. Rayleigh fading traces.

use std::io::{BufRead, Write};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::io::{fmt17, parse_f64, parse_usize};
use crate::rng::{self, Purpose};

/// `10^((dBm − 30)/10)` watts.
pub fn dbm_to_watts(value_dbm: f64) -> f64 {
    10f64.powf((value_dbm - 30.0) / 10.0)
}

/// Linear power loss of the COST-Hata fit `33.44 + 35.22 log10(d)` dB.
pub fn cost_hata_path_loss(distance_m: f64) -> Result<f64> {
    ensure_positive("distance", distance_m)?;
    let db = 33.44 + 35.22 * distance_m.log10();
    Ok(10f64.powf(db / 10.0))
}

/// Static description of one device.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceProfile {
    pub index: usize,
    pub distance_m: f64,
    pub path_loss: f64,
    pub batch_size: u32,
    pub dataset_size: u32,
    pub loss_weight: f64,
}

impl DeviceProfile {
    pub fn new(index: usize, distance_m: f64, batch_size: u32, dataset_size: u32) -> Result<Self> {
        let path_loss = cost_hata_path_loss(distance_m)?;
        Self::with_path_loss(index, distance_m, path_loss, batch_size, dataset_size)
    }

    /// A profile with an explicit path loss (tests, imported traces).
    pub fn with_path_loss(
        index: usize,
        distance_m: f64,
        path_loss: f64,
        batch_size: u32,
        dataset_size: u32,
    ) -> Result<Self> {
        ensure_positive("path loss", path_loss)?;
        if batch_size == 0 || dataset_size < batch_size {
            return Err(Error::invalid(
                "batch size",
                format!("need 1 <= B_m <= n_m, got B_m = {batch_size}, n_m = {dataset_size}"),
            ));
        }
        Ok(DeviceProfile {
            index,
            distance_m,
            path_loss,
            batch_size,
            dataset_size,
            loss_weight: 1.0,
        })
    }

    /// Poisson sampling rate `q_m = B_m / n_m`.
    pub fn sampling_rate(&self) -> f64 {
        f64::from(self.batch_size) / f64::from(self.dataset_size)
    }

    /// `k_m² = E[|B|²] / B_m² = 1 + (1 − q_m)/B_m`.
    pub fn k_sq(&self) -> f64 {
        1.0 + (1.0 - self.sampling_rate()) / f64::from(self.batch_size)
    }
}

/// Places `devices` devices uniformly in `[r_min, r_max]` metres.
pub fn place_devices(
    devices: usize,
    r_min: f64,
    r_max: f64,
    batch_size: u32,
    dataset_size: u32,
    seed: u64,
) -> Result<Vec<DeviceProfile>> {
    ensure_positive("r_min", r_min)?;
    if r_max.is_nan() || r_min.is_nan() || r_max < r_min {
        return Err(Error::invalid(
            "r_max",
            format!("r_max = {r_max} must be >= r_min = {r_min}"),
        ));
    }
    if devices == 0 {
        return Err(Error::invalid("device count", "at least one device is required"));
    }
    let mut rng = rng::stream(seed, Purpose::Placement, 0);
    (0..devices)
        .map(|m| {
            let u: f64 = rng.random();
            DeviceProfile::new(m, r_min + (r_max - r_min) * u, batch_size, dataset_size)
        })
        .collect()
}

/// Per-round, per-device channel gains.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelTrace {
    rounds: usize,
    devices: usize,
    /// Row-major `rounds × devices`.
    h: Vec<Complex64>,
    k_sq: Vec<f64>,
    h_min_sq: Vec<f64>,
    seed: u64,
}

impl ChannelTrace {
    /// Builds a trace from explicit gains; `h_min_sq` is derived.
    pub fn from_gains(h: Vec<Complex64>, profiles: &[DeviceProfile], seed: u64) -> Result<Self> {
        let devices = profiles.len();
        if devices == 0 {
            return Err(Error::invalid("profiles", "at least one device is required"));
        }
        if h.is_empty() || !h.len().is_multiple_of(devices) {
            return Err(Error::DimensionMismatch {
                what: "channel gains",
                expected: devices * (h.len() / devices).max(1),
                actual: h.len(),
            });
        }
        let rounds = h.len() / devices;
        let k_sq: Vec<f64> = profiles.iter().map(DeviceProfile::k_sq).collect();
        let h_min_sq: Vec<f64> = h
            .chunks_exact(devices)
            .map(|row| {
                row.iter()
                    .zip(&k_sq)
                    .map(|(g, k)| g.norm_sqr() / k)
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        if let Some(t) = h_min_sq.iter().position(|&v| v.is_nan() || v <= 0.0) {
            return Err(Error::invalid(
                "channel trace",
                format!("round {t} has a zero channel gain"),
            ));
        }
        Ok(ChannelTrace {
            rounds,
            devices,
            h,
            k_sq,
            h_min_sq,
            seed,
        })
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn devices(&self) -> usize {
        self.devices
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn gain(&self, t: usize, m: usize) -> Complex64 {
        self.h[t * self.devices + m]
    }

    pub fn row(&self, t: usize) -> &[Complex64] {
        &self.h[t * self.devices..(t + 1) * self.devices]
    }

    /// `|h_{m,t}|²` for every device in round `t`.
    pub fn gains_sq(&self, t: usize) -> Vec<f64> {
        self.row(t).iter().map(Complex64::norm_sqr).collect()
    }

    pub fn k_sq(&self) -> &[f64] {
        &self.k_sq
    }

    /// `min_m |h_{m,t}|² / k_m²` per round.
    pub fn h_min_sq(&self) -> &[f64] {
        &self.h_min_sq
    }

    /// The first `rounds` rounds of this trace.
    pub fn truncated(&self, rounds: usize) -> ChannelTrace {
        let rounds = rounds.min(self.rounds).max(1);
        ChannelTrace {
            rounds,
            devices: self.devices,
            h: self.h[..rounds * self.devices].to_vec(),
            k_sq: self.k_sq.clone(),
            h_min_sq: self.h_min_sq[..rounds].to_vec(),
            seed: self.seed,
        }
    }

    /// Writes `t,m,re,im` rows preceded by a `#`-prefixed JSON header that
    /// carries the profiles and seed.
    pub fn write_csv<W: Write>(&self, mut out: W, profiles: &[DeviceProfile]) -> Result<()> {
        let header = TraceHeader {
            seed: self.seed,
            rounds: self.rounds,
            devices: self.devices,
            profiles: profiles.to_vec(),
        };
        writeln!(out, "# {}", serde_json::to_string(&header)?)?;
        writeln!(out, "t,m,re,im")?;
        for t in 0..self.rounds {
            for (m, g) in self.row(t).iter().enumerate() {
                writeln!(out, "{t},{m},{},{}", fmt17(g.re), fmt17(g.im))?;
            }
        }
        Ok(())
    }

    /// Inverse of [`ChannelTrace::write_csv`].
    pub fn read_csv<R: BufRead>(input: R) -> Result<(ChannelTrace, Vec<DeviceProfile>)> {
        let mut lines = input.lines().enumerate();
        let header: TraceHeader = match lines.next() {
            Some((_, line)) => {
                let line = line?;
                let json = line.strip_prefix('#').ok_or_else(|| Error::Parse {
                    line: 1,
                    reason: "expected a '#' JSON header".into(),
                })?;
                serde_json::from_str(json.trim())?
            }
            None => {
                return Err(Error::Parse {
                    line: 1,
                    reason: "empty trace file".into(),
                })
            }
        };
        let columns = lines.next().map(|(_, l)| l).transpose()?;
        if columns.as_deref().map(str::trim) != Some("t,m,re,im") {
            return Err(Error::Parse {
                line: 2,
                reason: "expected column header t,m,re,im".into(),
            });
        }
        let n = header.rounds * header.devices;
        let mut h = vec![Complex64::new(f64::NAN, f64::NAN); n];
        let mut filled = 0usize;
        for (i, line) in lines {
            let line = line?;
            let lineno = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(Error::Parse {
                    line: lineno,
                    reason: "expected 4 fields".into(),
                });
            }
            let t = parse_usize(fields[0], lineno)?;
            let m = parse_usize(fields[1], lineno)?;
            if t >= header.rounds || m >= header.devices {
                return Err(Error::Parse {
                    line: lineno,
                    reason: format!("index ({t},{m}) out of range"),
                });
            }
            h[t * header.devices + m] = Complex64::new(parse_f64(fields[2], lineno)?, parse_f64(fields[3], lineno)?);
            filled += 1;
        }
        if filled != n {
            return Err(Error::DimensionMismatch {
                what: "trace rows",
                expected: n,
                actual: filled,
            });
        }
        let trace = ChannelTrace::from_gains(h, &header.profiles, header.seed)?;
        Ok((trace, header.profiles))
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct TraceHeader {
    seed: u64,
    rounds: usize,
    devices: usize,
    profiles: Vec<DeviceProfile>,
}

/// Draws `h_{m,t} ~ CN(0, 1/PL_m)` i.i.d. over rounds.
///
/// Round `t` uses stream `t` of the fading generator keyed by `seed`; within
/// a round devices draw `(re, im)` in index order.
pub fn generate_trace(profiles: &[DeviceProfile], rounds: usize, seed: u64) -> Result<ChannelTrace> {
    if profiles.is_empty() {
        return Err(Error::invalid("profiles", "at least one device is required"));
    }
    if rounds == 0 {
        return Err(Error::invalid("rounds", "at least one round is required"));
    }
    let scales: Vec<f64> = profiles.iter().map(|p| (0.5 / p.path_loss).sqrt()).collect();
    let mut h = Vec::with_capacity(rounds * profiles.len());
    for t in 0..rounds {
        let mut rng = rng::stream(seed, Purpose::Fading, t as u64);
        for &scale in &scales {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            h.push(Complex64::new(scale * re, scale * im));
        }
    }
    ChannelTrace::from_gains(h, profiles, seed)
}

/// Mean of `min_m |h_m|²/k_m²` under independent exponential `|h_m|²` with
/// rates `PL_m`: the minimum of exponentials has the summed rate.
pub fn expected_h_min_sq(profiles: &[DeviceProfile]) -> Result<f64> {
    if profiles.is_empty() {
        return Err(Error::invalid("profiles", "at least one device is required"));
    }
    Ok(1.0 / profiles.iter().map(|p| p.path_loss * p.k_sq()).sum::<f64>())
}
