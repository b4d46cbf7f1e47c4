//! `adascale`: channel simulation, scheduling runs, ν sweeps with bound
//! certificates, privacy accounting and the synthetic trainer.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use adascale::experiment::report::{write_certificates_csv, write_offline_csv, write_run_csv, write_sweep_csv};
use adascale::experiment::sweep::{rdp_at_orders, sweep_traces};
use adascale::experiment::{run_method, Deployment, ExperimentConfig, Method, Summary};
use adascale::fl_sim::{train, verify_convergence_bound, ProblemSpec, RoundNoise, SyntheticProblem};
use adascale::io::fmt17;
use adascale::{best_dp_over_orders, rdp_to_dp, ChannelTrace, RdpOrder};

#[derive(Parser)]
#[command(
    name = "adascale",
    version,
    about = "Privacy-aware receive scaling for over-the-air federated learning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML configuration; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the base fading seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated methods: adascale, equalalloc, estimfuture, optimal.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<Method>>,
    /// Comma-separated constraint budgets.
    #[arg(long, value_delimiter = ',')]
    nu: Option<Vec<f64>>,
    /// Replays a trace written by `simulate-channels` as the only trial.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Writes one fading trace per trial as CSV.
    SimulateChannels(Common),
    /// Runs each method on the first trial and writes per-round CSVs.
    Run(Common),
    /// Full sweep over ν, methods and trials with certificates and a summary.
    Sweep(Common),
    /// Solves the offline optimum on the first trial for every ν.
    Oracle(Common),
    /// Per-device RDP and (ε, δ) of every method on the first trial.
    Account(Common),
    /// Certifies the online controller against the offline optimum.
    Certify(Common),
    /// Trains the synthetic quadratic problem under a method's schedule.
    Train(TrainArgs),
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    common: Common,
    /// Method whose receive scaling drives the trainer.
    #[arg(long, default_value = "adascale")]
    controller: Method,
    #[arg(long, default_value_t = 5)]
    dim: usize,
    #[arg(long, default_value_t = 500)]
    samples: usize,
    #[arg(long, default_value_t = 0.5)]
    heterogeneity: f64,
    /// Learning rate; the largest admissible one when omitted.
    #[arg(long)]
    lambda: Option<f64>,
    /// Seeds averaged in the bound report.
    #[arg(long, default_value_t = 20)]
    trials: usize,
}

struct Prepared {
    config: ExperimentConfig,
    out: PathBuf,
    trace: Option<PathBuf>,
}

impl Prepared {
    /// The deployment and one trace per trial, or the replayed trace alone.
    fn traces(&self) -> Result<(Deployment, Vec<ChannelTrace>)> {
        match &self.trace {
            Some(path) => {
                let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
                let (trace, profiles) = ChannelTrace::read_csv(BufReader::new(file))
                    .with_context(|| format!("reading {}", path.display()))?;
                Ok((Deployment::with_profiles(&self.config, profiles)?, vec![trace]))
            }
            None => {
                let deployment = Deployment::from_config(&self.config)?;
                let traces = (0..self.config.seeds.trials)
                    .map(|trial| deployment.trace(&self.config, trial))
                    .collect::<adascale::Result<Vec<_>>>()?;
                Ok((deployment, traces))
            }
        }
    }

    fn first_trace(&self) -> Result<(Deployment, ChannelTrace)> {
        let (deployment, traces) = match &self.trace {
            Some(_) => self.traces()?,
            None => {
                let deployment = Deployment::from_config(&self.config)?;
                let trace = deployment.trace(&self.config, 0)?;
                (deployment, vec![trace])
            }
        };
        Ok((deployment, traces.into_iter().next().expect("at least one trace")))
    }
}

fn prepare(common: &Common) -> Result<Prepared> {
    let mut config = match &common.config {
        Some(path) => ExperimentConfig::load(path).with_context(|| format!("loading {}", path.display()))?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        config.seeds.fading = seed;
    }
    if let Some(methods) = &common.methods {
        config.controller.methods = methods.clone();
    }
    if let Some(nu) = &common.nu {
        if nu.is_empty() || nu.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            bail!("--nu needs positive finite values");
        }
        config.controller.nu = nu.clone();
    }
    let out = common.out.clone().unwrap_or_else(|| PathBuf::from(&config.output.dir));
    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    Ok(Prepared {
        config,
        out,
        trace: common.trace.clone(),
    })
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    Ok(BufWriter::new(
        File::create(&path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn simulate_channels(common: &Common) -> Result<bool> {
    if common.trace.is_some() {
        bail!("--trace cannot be combined with simulate-channels");
    }
    let ctx = prepare(common)?;
    let deployment = Deployment::from_config(&ctx.config)?;
    for trial in 0..ctx.config.seeds.trials {
        let trace = deployment.trace(&ctx.config, trial)?;
        let mut out = create(&ctx.out, &format!("trace_{trial:03}.csv"))?;
        trace.write_csv(&mut out, &deployment.profiles)?;
        out.flush()?;
    }
    println!("wrote {} traces to {}", ctx.config.seeds.trials, ctx.out.display());
    Ok(true)
}

fn run(common: &Common) -> Result<bool> {
    let ctx = prepare(common)?;
    let (deployment, trace) = ctx.first_trace()?;
    for (i, &nu) in ctx.config.controller.nu.iter().enumerate() {
        for &method in &ctx.config.controller.methods {
            let result = run_method(method, &trace, &deployment, &ctx.config, nu, None)?;
            let mut out = create(&ctx.out, &format!("run_{method}_nu{i}.csv"))?;
            write_run_csv(&result.trajectory, &mut out)?;
            out.flush()?;
            println!(
                "nu={} method={} constraint_lhs={} mean_rdp={}",
                fmt17(nu),
                method,
                fmt17(result.trajectory.constraint_lhs()),
                fmt17(result.trajectory.ledger.mean_rdp()),
            );
        }
    }
    Ok(true)
}

fn sweep_cmd(common: &Common, certify_only: bool) -> Result<bool> {
    let mut ctx = prepare(common)?;
    if certify_only {
        ctx.config.controller.methods = vec![Method::AdaScale, Method::Optimal];
    }
    let (deployment, traces) = ctx.traces()?;
    let report = sweep_traces(&ctx.config, &deployment, &traces)?;
    let mut out = create(&ctx.out, "certificates.csv")?;
    write_certificates_csv(&report, &mut out)?;
    out.flush()?;
    if !certify_only {
        let mut out = create(&ctx.out, "sweep.csv")?;
        write_sweep_csv(&report, &mut out)?;
        out.flush()?;
        let mut out = create(&ctx.out, "offline.csv")?;
        write_offline_csv(&report, &mut out)?;
        out.flush()?;
        fs::write(ctx.out.join("summary.json"), Summary::from_report(&report).to_json())?;
    }
    for failure in &report.failures {
        eprintln!(
            "nu={} method={} trial={}: {}",
            failure.nu, failure.method, failure.trial, failure.reason
        );
    }
    let passed = report.certificates.iter().filter(|c| c.certificate.passed()).count();
    println!("certificates passed: {passed}/{}", report.certificates.len());
    Ok(report.certificates_pass())
}

fn oracle(common: &Common) -> Result<bool> {
    let ctx = prepare(common)?;
    let (deployment, trace) = ctx.first_trace()?;
    let mut summary = create(&ctx.out, "oracle.csv")?;
    writeln!(
        summary,
        "nu,mu_star,primal_value,dual_value,duality_gap,constraint_slack,converged"
    )?;
    for (i, &nu) in ctx.config.controller.nu.iter().enumerate() {
        let result = run_method(Method::Optimal, &trace, &deployment, &ctx.config, nu, None)?;
        let solution = result.offline.as_ref().expect("optimal runs carry their solution");
        writeln!(
            summary,
            "{},{},{},{},{},{},{}",
            fmt17(nu),
            fmt17(solution.mu_star),
            fmt17(solution.primal_value),
            fmt17(solution.dual_value),
            fmt17(solution.duality_gap()),
            fmt17(solution.constraint_slack),
            solution.converged,
        )?;
        let mut out = create(&ctx.out, &format!("oracle_nu{i}.csv"))?;
        write_run_csv(&result.trajectory, &mut out)?;
        out.flush()?;
    }
    summary.flush()?;
    Ok(true)
}

fn account(common: &Common) -> Result<bool> {
    let ctx = prepare(common)?;
    let (deployment, trace) = ctx.first_trace()?;
    let delta = ctx.config.system.delta;
    let orders = if ctx.config.system.dp_orders.is_empty() {
        RdpOrder::default_grid()
    } else {
        ctx.config.system.dp_orders.clone()
    };
    let mut out = create(&ctx.out, "account.csv")?;
    writeln!(out, "nu,method,device,rdp,epsilon,best_epsilon,best_order")?;
    for &nu in &ctx.config.controller.nu {
        for &method in &ctx.config.controller.methods {
            let result = run_method(method, &trace, &deployment, &ctx.config, nu, None)?;
            let ledger = &result.trajectory.ledger;
            let per_order = rdp_at_orders(&deployment, &ctx.config, &result.trajectory, &orders)?;
            for (m, (&rho, map)) in ledger.per_device_rdp().iter().zip(&per_order).enumerate() {
                let dp = rdp_to_dp(rho, ledger.order(), delta)?;
                let best = best_dp_over_orders(map, delta)?;
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    fmt17(nu),
                    method,
                    m,
                    fmt17(rho),
                    fmt17(dp.epsilon),
                    fmt17(best.epsilon),
                    best.order.get(),
                )?;
            }
        }
    }
    out.flush()?;
    Ok(true)
}

fn train_cmd(args: &TrainArgs) -> Result<bool> {
    let ctx = prepare(&args.common)?;
    let (deployment, trace) = ctx.first_trace()?;
    let nu = ctx.config.controller.nu[0];
    let schedule = run_method(args.controller, &trace, &deployment, &ctx.config, nu, None)?;
    let etas: Vec<f64> = schedule.trajectory.decisions.iter().map(|d| d.eta).collect();

    let s = &ctx.config.system;
    let spec = ProblemSpec {
        seed: ctx.config.seeds.placement,
        ..ProblemSpec::new(
            s.devices,
            args.dim,
            args.samples,
            s.batch_size as f64 * args.samples as f64 / s.dataset_size as f64,
            args.heterogeneity,
        )
    };
    let problem = SyntheticProblem::build(&spec)?;
    let lambda = args.lambda.unwrap_or_else(|| problem.step_size_limit());
    let noise = RoundNoise {
        sigma_n_sq: deployment.model.noise().sigma_n_sq,
        clip: s.clip,
        sampling_seed: ctx.config.seeds.sampling,
        noise_seed: ctx.config.seeds.noise,
    };
    let run = train(&problem, &etas, lambda, &noise)?;
    let mut out = create(&ctx.out, "train.csv")?;
    writeln!(out, "t,grad_sq,f_value,eta,effective_noise_var")?;
    for r in &run.records {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.t,
            fmt17(r.grad_sq),
            fmt17(r.f_value),
            fmt17(r.eta),
            fmt17(r.effective_noise_var),
        )?;
    }
    out.flush()?;

    let report = verify_convergence_bound(&problem, &etas, lambda, &noise, args.trials)?;
    let text = format!(
        "controller = {}\nnu = {}\nlambda = {}\nstep_size_limit = {}\nsmoothness = {}\na1 = {}\na2 = {}\nc1 = {}\nc2 = {}\nlhs = {}\nphi = {}\nnoise_term = {}\nrhs = {}\nmargin = {}\nclipped = {}\nholds = {}\n",
        args.controller,
        fmt17(nu),
        fmt17(lambda),
        fmt17(report.step_size_limit),
        fmt17(problem.smoothness),
        fmt17(problem.a1),
        fmt17(problem.a2),
        fmt17(problem.c1),
        fmt17(problem.c2),
        fmt17(report.lhs),
        fmt17(report.phi),
        fmt17(report.noise_term),
        fmt17(report.rhs),
        fmt17(report.margin()),
        report.clipped,
        report.holds(),
    );
    fs::write(ctx.out.join("train_bound.txt"), &text)?;
    print!("{text}");
    Ok(report.holds())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::SimulateChannels(c) => simulate_channels(c),
        Command::Run(c) => run(c),
        Command::Sweep(c) => sweep_cmd(c, false),
        Command::Oracle(c) => oracle(c),
        Command::Account(c) => account(c),
        Command::Certify(c) => sweep_cmd(c, true),
        Command::Train(args) => train_cmd(args),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
