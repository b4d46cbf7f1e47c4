//! CSV and JSON emission. Floats are written with 17 significant digits.
//!
//! Column orders:
//!
//! - sweep: `nu,method,trial,v,constraint_lhs,total_rdp,mean_rdp,mean_epsilon,best_mean_epsilon,tuning_converged`
//! - certificates: `nu,trial,rounds,v,q_t_max,max_queue,violation_lhs,violation_bound,regret,regret_bound,queue_pass,violation_pass,regret_pass,regret_floor_pass,passed`
//! - offline: `nu,trial,mu_star,duality_gap,converged,monotonicity_violations`
//! - run: `t,Q,x,eta,h_min_sq,constraint_term,rho_dev_0,…,rho_dev_{M-1}`
//!
//! Optional cells are left empty when absent.

use std::io::Write;

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::controller::Trajectory;
use crate::error::Result;
use crate::io::fmt17;

use super::config::Method;
use super::sweep::SweepReport;

pub const SWEEP_HEADER: &str =
    "nu,method,trial,v,constraint_lhs,total_rdp,mean_rdp,mean_epsilon,best_mean_epsilon,tuning_converged";
pub const CERTIFICATE_HEADER: &str = "nu,trial,rounds,v,q_t_max,max_queue,violation_lhs,violation_bound,regret,regret_bound,queue_pass,violation_pass,regret_pass,regret_floor_pass,passed";
pub const OFFLINE_HEADER: &str = "nu,trial,mu_star,duality_gap,converged,monotonicity_violations";

fn opt_f64(value: Option<f64>) -> String {
    value.map(fmt17).unwrap_or_default()
}

fn opt_bool(value: Option<bool>) -> String {
    value.map(|b| b.to_string()).unwrap_or_default()
}

pub fn write_sweep_csv<W: Write>(report: &SweepReport, mut out: W) -> Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for r in &report.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            fmt17(r.nu),
            r.method,
            r.trial,
            opt_f64(r.v),
            fmt17(r.constraint_lhs),
            fmt17(r.total_rdp),
            fmt17(r.mean_rdp),
            fmt17(r.mean_epsilon),
            opt_f64(r.best_mean_epsilon),
            opt_bool(r.tuning_converged),
        )?;
    }
    Ok(())
}

pub fn write_certificates_csv<W: Write>(report: &SweepReport, mut out: W) -> Result<()> {
    writeln!(out, "{CERTIFICATE_HEADER}")?;
    for tc in &report.certificates {
        let c = &tc.certificate;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt17(c.nu),
            tc.trial,
            c.rounds,
            fmt17(c.v),
            fmt17(c.q_t_max),
            fmt17(c.max_queue),
            fmt17(c.violation_lhs),
            fmt17(c.violation_bound),
            fmt17(c.regret),
            fmt17(c.regret_bound),
            c.queue_pass,
            c.violation_pass,
            c.regret_pass,
            c.regret_floor_pass,
            c.passed(),
        )?;
    }
    Ok(())
}

pub fn write_offline_csv<W: Write>(report: &SweepReport, mut out: W) -> Result<()> {
    writeln!(out, "{OFFLINE_HEADER}")?;
    for r in &report.offline {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt17(r.nu),
            r.trial,
            fmt17(r.mu_star),
            fmt17(r.duality_gap),
            r.converged,
            r.monotonicity_violations,
        )?;
    }
    Ok(())
}

pub fn write_run_csv<W: Write>(trajectory: &Trajectory, mut out: W) -> Result<()> {
    let devices = trajectory.ledger.devices();
    let rho_cols: Vec<String> = (0..devices).map(|m| format!("rho_dev_{m}")).collect();
    writeln!(out, "t,Q,x,eta,h_min_sq,constraint_term,{}", rho_cols.join(","))?;
    for d in &trajectory.decisions {
        let rhos: Vec<String> = d.rho_per_device.iter().map(|&r| fmt17(r)).collect();
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            d.round,
            fmt17(d.queue),
            fmt17(d.x),
            fmt17(d.eta),
            fmt17(d.h_min_sq),
            fmt17(d.constraint_term),
            rhos.join(","),
        )?;
    }
    Ok(())
}

/// Sample mean and half-width of the two-sided 95% Student-t interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanCi {
    pub mean: f64,
    /// NaN with fewer than two samples.
    pub half_width: f64,
}

impl MeanCi {
    pub fn of(values: &[f64]) -> MeanCi {
        let n = values.len();
        if n == 0 {
            return MeanCi {
                mean: f64::NAN,
                half_width: f64::NAN,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        if n < 2 {
            return MeanCi {
                mean,
                half_width: f64::NAN,
            };
        }
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let t = StudentsT::new(0.0, 1.0, (n - 1) as f64)
            .expect("positive degrees of freedom")
            .inverse_cdf(0.975);
        MeanCi {
            mean,
            half_width: t * (var / n as f64).sqrt(),
        }
    }

    pub fn lower(&self) -> f64 {
        self.mean - self.half_width
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.half_width
    }
}

/// Aggregate of one (ν, method) cell over trials.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub nu: f64,
    pub method: Method,
    pub trials: usize,
    pub constraint_lhs: MeanCi,
    pub total_rdp: MeanCi,
    pub mean_rdp: MeanCi,
    pub mean_epsilon: MeanCi,
    pub best_mean_epsilon: Option<MeanCi>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub rows: Vec<SummaryRow>,
    pub certificates: usize,
    pub certificates_passed: usize,
    pub failures: usize,
}

impl Summary {
    pub fn from_report(report: &SweepReport) -> Summary {
        let mut cells: Vec<(f64, Method)> = Vec::new();
        for r in &report.rows {
            if !cells.iter().any(|&(nu, m)| nu == r.nu && m == r.method) {
                cells.push((r.nu, r.method));
            }
        }
        let rows = cells
            .into_iter()
            .map(|(nu, method)| {
                let rows: Vec<_> = report.rows_for(nu, method).collect();
                let column = |f: fn(&super::sweep::SweepRow) -> f64| -> MeanCi {
                    MeanCi::of(&rows.iter().map(|r| f(r)).collect::<Vec<_>>())
                };
                let best: Option<Vec<f64>> = rows.iter().map(|r| r.best_mean_epsilon).collect();
                SummaryRow {
                    nu,
                    method,
                    trials: rows.len(),
                    constraint_lhs: column(|r| r.constraint_lhs),
                    total_rdp: column(|r| r.total_rdp),
                    mean_rdp: column(|r| r.mean_rdp),
                    mean_epsilon: column(|r| r.mean_epsilon),
                    best_mean_epsilon: best.map(|b| MeanCi::of(&b)),
                }
            })
            .collect();
        Summary {
            rows,
            certificates: report.certificates.len(),
            certificates_passed: report.certificates.iter().filter(|c| c.certificate.passed()).count(),
            failures: report.failures.len(),
        }
    }

    pub fn row(&self, nu: f64, method: Method) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.nu == nu && r.method == method)
    }

    /// JSON text; NaN is written as `null`.
    pub fn to_json(&self) -> String {
        fn num(x: f64) -> String {
            if x.is_finite() {
                fmt17(x)
            } else {
                "null".into()
            }
        }
        fn stat(s: &MeanCi) -> String {
            format!("{{\"mean\": {}, \"ci95\": {}}}", num(s.mean), num(s.half_width))
        }
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| {
                format!(
                    "    {{\"nu\": {}, \"method\": \"{}\", \"trials\": {}, \"constraint_lhs\": {}, \"total_rdp\": {}, \"mean_rdp\": {}, \"mean_epsilon\": {}, \"best_mean_epsilon\": {}}}",
                    num(r.nu),
                    r.method,
                    r.trials,
                    stat(&r.constraint_lhs),
                    stat(&r.total_rdp),
                    stat(&r.mean_rdp),
                    stat(&r.mean_epsilon),
                    r.best_mean_epsilon.as_ref().map(stat).unwrap_or_else(|| "null".into()),
                )
            })
            .collect();
        format!(
            "{{\n  \"certificates\": {},\n  \"certificates_passed\": {},\n  \"failures\": {},\n  \"rows\": [\n{}\n  ]\n}}\n",
            self.certificates,
            self.certificates_passed,
            self.failures,
            rows.join(",\n"),
        )
    }
}
