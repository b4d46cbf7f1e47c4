//! TOML experiment configuration.
//!
//! Every key is checked in a single pass; all missing, mistyped, out-of-range
//! and unknown keys are reported together.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use toml::{Table, Value};

use crate::accountant::RdpOrder;
use crate::error::{Error, Result};
use crate::io::fmt17;

/// Scheduling method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    AdaScale,
    EqualAlloc,
    EstimFuture,
    Optimal,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::AdaScale,
        Method::EqualAlloc,
        Method::EstimFuture,
        Method::Optimal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::AdaScale => "adascale",
            Method::EqualAlloc => "equalalloc",
            Method::EstimFuture => "estimfuture",
            Method::Optimal => "optimal",
        }
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| {
                Error::invalid(
                    "method",
                    format!("unknown method {s:?}; expected adascale, equalalloc, estimfuture or optimal"),
                )
            })
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// How the online controller's `V` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VMode {
    /// Searched per (ν, trial) so the realized constraint average matches ν.
    Tuned,
    /// `controller.v`.
    Fixed,
    /// `controller.v_coefficient · T^controller.v_beta`.
    Power,
}

impl VMode {
    fn name(self) -> &'static str {
        match self {
            VMode::Tuned => "tuned",
            VMode::Fixed => "fixed",
            VMode::Power => "power",
        }
    }
}

/// Future-channel estimate used by the re-planning baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictorKind {
    KnownLaw,
    Empirical,
}

impl PredictorKind {
    fn name(self) -> &'static str {
        match self {
            PredictorKind::KnownLaw => "known_law",
            PredictorKind::Empirical => "empirical",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemSection {
    pub devices: usize,
    pub model_dim: usize,
    pub rounds: usize,
    pub p_max_dbm: f64,
    pub noise_dbm: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub batch_size: u32,
    pub dataset_size: u32,
    pub clip: f64,
    pub alpha: RdpOrder,
    pub delta: f64,
    /// Orders over which DP is additionally optimized; empty for none.
    pub dp_orders: Vec<RdpOrder>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControllerSection {
    pub methods: Vec<Method>,
    pub v_mode: VMode,
    pub v: f64,
    pub v_beta: f64,
    pub v_coefficient: f64,
    pub nu: Vec<f64>,
    pub tau_rel: f64,
    /// Accepted relative shortfall of the tuned constraint average below ν.
    pub tune_rel_tol: f64,
    pub predictor: PredictorKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedSection {
    pub placement: u64,
    pub fading: u64,
    pub sampling: u64,
    pub noise: u64,
    pub trials: usize,
}

impl SeedSection {
    /// Fading seed of trial `trial`.
    pub fn fading_for_trial(&self, trial: usize) -> u64 {
        self.fading.wrapping_add(trial as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputSection {
    pub dir: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub system: SystemSection,
    pub controller: ControllerSection,
    pub seeds: SeedSection,
    pub output: OutputSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            system: SystemSection {
                devices: 10,
                model_dim: 26010,
                rounds: 500,
                p_max_dbm: 23.0,
                noise_dbm: -90.0,
                r_min: 10.0,
                r_max: 200.0,
                batch_size: 60,
                dataset_size: 6000,
                clip: 1.0,
                alpha: RdpOrder::new(3).expect("valid order"),
                delta: 1e-5,
                dp_orders: Vec::new(),
            },
            controller: ControllerSection {
                methods: Method::ALL.to_vec(),
                v_mode: VMode::Tuned,
                v: 0.1,
                v_beta: 1.5,
                v_coefficient: 1e-5,
                nu: vec![0.01, 0.02, 0.04, 0.08, 0.16],
                tau_rel: 1e-10,
                tune_rel_tol: 1e-3,
                predictor: PredictorKind::KnownLaw,
            },
            seeds: SeedSection {
                placement: 1,
                fading: 1000,
                sampling: 2000,
                noise: 3000,
                trials: 100,
            },
            output: OutputSection { dir: "results".into() },
        }
    }
}

struct Reader<'a> {
    section: &'static str,
    table: Option<&'a Table>,
    errors: &'a mut Vec<String>,
    seen: Vec<&'static str>,
}

impl<'a> Reader<'a> {
    fn new(root: &'a Table, section: &'static str, errors: &'a mut Vec<String>) -> Self {
        let table = match root.get(section) {
            Some(Value::Table(t)) => Some(t),
            Some(_) => {
                errors.push(format!("[{section}] must be a table"));
                None
            }
            None => {
                errors.push(format!("missing section [{section}]"));
                None
            }
        };
        Reader {
            section,
            table,
            errors,
            seen: Vec::new(),
        }
    }

    fn raw(&mut self, key: &'static str, optional: bool) -> Option<&'a Value> {
        self.seen.push(key);
        let table = self.table?;
        let value = table.get(key);
        if value.is_none() && !optional {
            self.errors.push(format!("missing key {}.{key}", self.section));
        }
        value
    }

    fn fail<T>(&mut self, key: &str, expected: &str) -> Option<T> {
        self.errors.push(format!("{}.{key}: expected {expected}", self.section));
        None
    }

    fn float(&mut self, key: &'static str, check: fn(f64) -> bool, expected: &str) -> Option<f64> {
        let v = match self.raw(key, false)? {
            Value::Float(f) => *f,
            Value::Integer(i) => *i as f64,
            _ => return self.fail(key, expected),
        };
        if check(v) {
            Some(v)
        } else {
            self.fail(key, expected)
        }
    }

    fn uint(&mut self, key: &'static str, min: i64) -> Option<i64> {
        match self.raw(key, false)? {
            Value::Integer(i) if *i >= min => Some(*i),
            _ => self.fail(key, &format!("an integer >= {min}")),
        }
    }

    fn seed(&mut self, key: &'static str) -> Option<u64> {
        self.uint(key, 0).map(|v| v as u64)
    }

    fn string(&mut self, key: &'static str, optional: bool) -> Option<&'a str> {
        match self.raw(key, optional)? {
            Value::String(s) => Some(s.as_str()),
            _ => self.fail(key, "a string"),
        }
    }

    fn finish(self) {
        if let Some(table) = self.table {
            for key in table.keys() {
                if !self.seen.contains(&key.as_str()) {
                    self.errors.push(format!("unknown key {}.{key}", self.section));
                }
            }
        }
    }
}

fn positive(v: f64) -> bool {
    v.is_finite() && v > 0.0
}

fn finite(v: f64) -> bool {
    v.is_finite()
}

fn unit_open(v: f64) -> bool {
    v > 0.0 && v < 1.0
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let root: Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(vec![e.to_string()]))?;
        let mut errors = Vec::new();
        for key in root.keys() {
            if !["system", "controller", "seeds", "output"].contains(&key.as_str()) {
                errors.push(format!("unknown section [{key}]"));
            }
        }

        let mut r = Reader::new(&root, "system", &mut errors);
        let devices = r.uint("devices", 1);
        let model_dim = r.uint("model_dim", 1);
        let rounds = r.uint("rounds", 1);
        let p_max_dbm = r.float("p_max_dbm", finite, "a finite number");
        let noise_dbm = r.float("noise_dbm", finite, "a finite number");
        let r_min = r.float("r_min", positive, "a positive number");
        let r_max = r.float("r_max", positive, "a positive number");
        let batch_size = r.uint("batch_size", 1);
        let dataset_size = r.uint("dataset_size", 1);
        let clip = r.float("clip", positive, "a positive number");
        let alpha = r.uint("alpha", 2);
        let delta = r.float("delta", unit_open, "a number in (0, 1)");
        let dp_orders = match r.raw("dp_orders", true) {
            None => Some(Vec::new()),
            Some(Value::Array(items)) => {
                let orders: Option<Vec<RdpOrder>> = items
                    .iter()
                    .map(|v| {
                        v.as_integer()
                            .and_then(|i| u32::try_from(i).ok())
                            .and_then(|i| RdpOrder::new(i).ok())
                    })
                    .collect();
                orders.or_else(|| r.fail("dp_orders", "an array of integers >= 2"))
            }
            Some(_) => r.fail("dp_orders", "an array of integers >= 2"),
        };
        r.finish();
        if let (Some(lo), Some(hi)) = (r_min, r_max) {
            if hi < lo {
                errors.push("system.r_max: must be >= system.r_min".into());
            }
        }
        if let (Some(b), Some(n)) = (batch_size, dataset_size) {
            if b > n {
                errors.push("system.batch_size: must not exceed system.dataset_size".into());
            }
        }

        let mut r = Reader::new(&root, "controller", &mut errors);
        let methods = match r.raw("methods", false) {
            None => None,
            Some(Value::Array(items)) if !items.is_empty() => {
                let parsed: Option<Vec<Method>> =
                    items.iter().map(|v| v.as_str().and_then(|s| s.parse().ok())).collect();
                parsed.or_else(|| r.fail("methods", "a list of adascale, equalalloc, estimfuture, optimal"))
            }
            Some(_) => r.fail("methods", "a non-empty list of method names"),
        };
        let v_mode = match r.string("v_mode", false) {
            None => None,
            Some("tuned") => Some(VMode::Tuned),
            Some("fixed") => Some(VMode::Fixed),
            Some("power") => Some(VMode::Power),
            Some(_) => r.fail("v_mode", "one of \"tuned\", \"fixed\", \"power\""),
        };
        let v = r.float("v", positive, "a positive number");
        let v_beta = r.float("v_beta", finite, "a finite number");
        let v_coefficient = r.float("v_coefficient", positive, "a positive number");
        let nu = match r.raw("nu", false) {
            None => None,
            Some(Value::Array(items)) if !items.is_empty() => {
                let parsed: Option<Vec<f64>> = items
                    .iter()
                    .map(|v| match v {
                        Value::Float(f) => Some(*f),
                        Value::Integer(i) => Some(*i as f64),
                        _ => None,
                    })
                    .map(|v| v.filter(|x| x.is_finite() && *x >= 0.0))
                    .collect();
                parsed.or_else(|| r.fail("nu", "a non-empty list of nonnegative numbers"))
            }
            Some(_) => r.fail("nu", "a non-empty list of nonnegative numbers"),
        };
        let tau_rel = r.float("tau_rel", unit_open, "a number in (0, 1)");
        let tune_rel_tol = r.float("tune_rel_tol", unit_open, "a number in (0, 1)");
        let predictor = match r.string("predictor", false) {
            None => None,
            Some("known_law") => Some(PredictorKind::KnownLaw),
            Some("empirical") => Some(PredictorKind::Empirical),
            Some(_) => r.fail("predictor", "\"known_law\" or \"empirical\""),
        };
        r.finish();

        let mut r = Reader::new(&root, "seeds", &mut errors);
        let placement = r.seed("placement");
        let fading = r.seed("fading");
        let sampling = r.seed("sampling");
        let noise = r.seed("noise");
        let trials = r.uint("trials", 1);
        r.finish();

        let mut r = Reader::new(&root, "output", &mut errors);
        let dir = r.string("dir", false).map(str::to_owned);
        r.finish();

        if !errors.is_empty() {
            return Err(Error::Config(errors));
        }
        // Every field is present once no errors were recorded.
        let config = ExperimentConfig {
            system: SystemSection {
                devices: devices.unwrap() as usize,
                model_dim: model_dim.unwrap() as usize,
                rounds: rounds.unwrap() as usize,
                p_max_dbm: p_max_dbm.unwrap(),
                noise_dbm: noise_dbm.unwrap(),
                r_min: r_min.unwrap(),
                r_max: r_max.unwrap(),
                batch_size: batch_size.unwrap() as u32,
                dataset_size: dataset_size.unwrap() as u32,
                clip: clip.unwrap(),
                alpha: RdpOrder::new(alpha.unwrap() as u32)?,
                delta: delta.unwrap(),
                dp_orders: dp_orders.unwrap(),
            },
            controller: ControllerSection {
                methods: methods.unwrap(),
                v_mode: v_mode.unwrap(),
                v: v.unwrap(),
                v_beta: v_beta.unwrap(),
                v_coefficient: v_coefficient.unwrap(),
                nu: nu.unwrap(),
                tau_rel: tau_rel.unwrap(),
                tune_rel_tol: tune_rel_tol.unwrap(),
                predictor: predictor.unwrap(),
            },
            seeds: SeedSection {
                placement: placement.unwrap(),
                fading: fading.unwrap(),
                sampling: sampling.unwrap(),
                noise: noise.unwrap(),
                trials: trials.unwrap() as usize,
            },
            output: OutputSection { dir: dir.unwrap() },
        };
        Ok(config)
    }

    /// TOML text that [`ExperimentConfig::from_toml_str`] reads back to an
    /// identical value. Floats carry 17 significant digits.
    pub fn to_toml_string(&self) -> String {
        let s = &self.system;
        let c = &self.controller;
        let seeds = &self.seeds;
        let list = |xs: Vec<String>| format!("[{}]", xs.join(", "));
        let mut out = String::new();
        let _ = writeln!(out, "[system]");
        let _ = writeln!(out, "devices = {}", s.devices);
        let _ = writeln!(out, "model_dim = {}", s.model_dim);
        let _ = writeln!(out, "rounds = {}", s.rounds);
        let _ = writeln!(out, "p_max_dbm = {}", fmt17(s.p_max_dbm));
        let _ = writeln!(out, "noise_dbm = {}", fmt17(s.noise_dbm));
        let _ = writeln!(out, "r_min = {}", fmt17(s.r_min));
        let _ = writeln!(out, "r_max = {}", fmt17(s.r_max));
        let _ = writeln!(out, "batch_size = {}", s.batch_size);
        let _ = writeln!(out, "dataset_size = {}", s.dataset_size);
        let _ = writeln!(out, "clip = {}", fmt17(s.clip));
        let _ = writeln!(out, "alpha = {}", s.alpha);
        let _ = writeln!(out, "delta = {}", fmt17(s.delta));
        if !s.dp_orders.is_empty() {
            let _ = writeln!(
                out,
                "dp_orders = {}",
                list(s.dp_orders.iter().map(|o| o.to_string()).collect())
            );
        }
        let _ = writeln!(out, "\n[controller]");
        let _ = writeln!(
            out,
            "methods = {}",
            list(c.methods.iter().map(|m| format!("\"{}\"", m.name())).collect())
        );
        let _ = writeln!(out, "v_mode = \"{}\"", c.v_mode.name());
        let _ = writeln!(out, "v = {}", fmt17(c.v));
        let _ = writeln!(out, "v_beta = {}", fmt17(c.v_beta));
        let _ = writeln!(out, "v_coefficient = {}", fmt17(c.v_coefficient));
        let _ = writeln!(out, "nu = {}", list(c.nu.iter().map(|&x| fmt17(x)).collect()));
        let _ = writeln!(out, "tau_rel = {}", fmt17(c.tau_rel));
        let _ = writeln!(out, "tune_rel_tol = {}", fmt17(c.tune_rel_tol));
        let _ = writeln!(out, "predictor = \"{}\"", c.predictor.name());
        let _ = writeln!(out, "\n[seeds]");
        let _ = writeln!(out, "placement = {}", seeds.placement);
        let _ = writeln!(out, "fading = {}", seeds.fading);
        let _ = writeln!(out, "sampling = {}", seeds.sampling);
        let _ = writeln!(out, "noise = {}", seeds.noise);
        let _ = writeln!(out, "trials = {}", seeds.trials);
        let _ = writeln!(out, "\n[output]");
        let _ = writeln!(out, "dir = {:?}", self.output.dir);
        out
    }
}
