//! Subcommand definitions and handlers.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use stablear::ar::FactoredArParams;
use stablear::diagnostics;
use stablear::inference::{bootstrap_ci, bootstrap_run, tau_ci, BootstrapCi, BootstrapConfig, MIN_REPLICATES};
use stablear::optimizer::{fit, order_scan, tau_standard_errors, FitOptions, FitResult, Profile};
use stablear::rng::stream;
use stablear::stable::{self, fisher_info};
use stablear::{ParamVector, StableParams};

use crate::io::{fmt_g, format_series, read_fit, read_series, to_json, write_json, write_text, FitFile, TauJson, TraceJson};
use crate::manifest::RunManifest;
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "stablear", version, about = "Causal and noncausal AR models with alpha-stable noise")]
pub struct Cli {
    /// Seconds since the epoch recorded in output manifests.
    #[arg(long, global = true)]
    pub timestamp: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a series from a factored AR model.
    Simulate(SimulateArgs),
    /// Maximum likelihood fit.
    Fit(FitArgs),
    /// m-out-of-n bootstrap intervals around a fit.
    Bootstrap(BootstrapArgs),
    /// ACF/PACF, residual dependence bounds and qq data.
    Diagnose(DiagnoseArgs),
    /// Evaluate or sample the noise law.
    Stable(StableArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileArg {
    Full,
    Test,
}

impl From<ProfileArg> for Profile {
    fn from(p: ProfileArg) -> Self {
        match p {
            ProfileArg::Full => Profile::Full,
            ProfileArg::Test => Profile::Test,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct LawArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub mu: f64,
}

impl LawArgs {
    fn params(&self) -> Result<StableParams, CliError> {
        Ok(StableParams::new(self.alpha, self.beta, self.sigma, self.mu)?)
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long)]
    pub p: usize,
    /// Noncausal order.
    #[arg(long, default_value_t = 0)]
    pub s: usize,
    /// θ₁..θ_p, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub theta: Vec<f64>,
    #[command(flatten)]
    pub law: LawArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 500)]
    pub burn: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct FitArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub p: usize,
    /// `auto` scans 0..=p, otherwise a fixed noncausal order.
    #[arg(long, default_value = "auto")]
    pub s: String,
    #[arg(long)]
    pub starts: Option<usize>,
    #[arg(long)]
    pub shortlist: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ProfileArg::Full)]
    pub profile: ProfileArg,
    /// Output JSON; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct BootstrapArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub fit: PathBuf,
    /// Replicate length; ⌈n/2⌉ when absent.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long = "B", default_value_t = 200)]
    pub b: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    #[arg(long, default_value_t = 500)]
    pub burn: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DiagnoseArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub fit: PathBuf,
    #[arg(long, default_value_t = 20)]
    pub max_lag: usize,
    /// Simulations for the residual dependence bounds.
    #[arg(long, default_value_t = 10_000)]
    pub sims: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Run an AIC order scan over 1..=P.
    #[arg(long)]
    pub p_max: Option<usize>,
    #[arg(long, value_enum, default_value_t = ProfileArg::Full)]
    pub profile: ProfileArg,
    /// Directory for report.json and the plot CSVs.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct StableArgs {
    #[command(subcommand)]
    pub op: StableOp,
}

#[derive(Debug, Subcommand)]
pub enum StableOp {
    /// Density at z (10 significant digits).
    Pdf {
        #[command(flatten)]
        law: LawArgs,
        #[arg(long, allow_negative_numbers = true)]
        z: f64,
    },
    /// Log-density at z.
    Logpdf {
        #[command(flatten)]
        law: LawArgs,
        #[arg(long, allow_negative_numbers = true)]
        z: f64,
    },
    /// Distribution function at z.
    Cdf {
        #[command(flatten)]
        law: LawArgs,
        #[arg(long, allow_negative_numbers = true)]
        z: f64,
    },
    /// Quantile at level q.
    Quantile {
        #[command(flatten)]
        law: LawArgs,
        #[arg(long)]
        q: f64,
    },
    /// n draws, one per line.
    Sample {
        #[command(flatten)]
        law: LawArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Fisher information and asymptotic standard deviations for n draws.
    Fisher {
        #[command(flatten)]
        law: LawArgs,
        #[arg(long, default_value_t = 500)]
        n: usize,
    },
}

pub fn dispatch(cli: Cli) -> Result<(), CliError> {
    let ts = cli.timestamp;
    match cli.command {
        Command::Simulate(a) => simulate(&a),
        Command::Fit(a) => fit_cmd(&a, ts),
        Command::Bootstrap(a) => bootstrap_cmd(&a, ts),
        Command::Diagnose(a) => diagnose_cmd(&a, ts),
        Command::Stable(a) => stable_cmd(&a.op),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => write_text(p, text),
        None => {
            let mut h = std::io::stdout().lock();
            h.write_all(text.as_bytes()).map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

fn simulate(a: &SimulateArgs) -> Result<(), CliError> {
    if a.theta.len() != a.p {
        return Err(CliError::config(format!("--theta has {} values but --p is {}", a.theta.len(), a.p)));
    }
    if a.s > a.p {
        return Err(CliError::config(format!("--s {} exceeds --p {}", a.s, a.p)));
    }
    if a.n == 0 {
        return Err(CliError::config("--n must be positive"));
    }
    let ar = FactoredArParams::with_s(a.theta.clone(), a.s)?;
    let x = ar.simulate(&a.law.params()?, a.n, a.burn, &mut stream(a.seed))?;
    emit(a.out.as_deref(), &format_series(&x))
}

fn fit_to_file(f: &FitResult, manifest: RunManifest) -> FitFile {
    FitFile {
        p: f.p,
        s: f.s_hat,
        theta: f.eta_hat.theta.clone(),
        phi: f.phi_hat.clone(),
        tau: f.eta_hat.tau.into(),
        loglik: f.loglik,
        se_tau: f.se_tau.iter().map(|v| v.is_finite().then_some(*v)).collect(),
        seed: f.seed,
        n: f.n,
        aic: f.aic(),
        trace: f
            .trace
            .iter()
            .map(|t| TraceJson {
                s: t.s,
                loglik: t.loglik,
                converged: t.converged,
                iterations: t.iterations.clone(),
                evaluations: t.evaluations,
            })
            .collect(),
        manifest,
    }
}

/// Rebuilds the fitted model from fit.json against its series.
fn fit_from_file(ff: &FitFile, x: &[f64]) -> Result<FitResult, CliError> {
    if ff.n != x.len() {
        return Err(CliError::input(format!("fit was made from {} observations but the series has {}", ff.n, x.len())));
    }
    if ff.theta.len() != ff.p {
        return Err(CliError::input(format!("fit file has p = {} but {} θ values", ff.p, ff.theta.len())));
    }
    let eta = ParamVector::new(ff.theta.clone(), ff.s, ff.tau.params()?)?;
    let ar = eta.factored()?;
    let residuals = ar.residuals(x)?;
    Ok(FitResult {
        s_hat: ff.s,
        phi_hat: ar.g_map().phi().to_vec(),
        loglik: ff.loglik,
        se_tau: tau_standard_errors(&eta.tau, residuals.len()),
        residuals,
        eta_hat: eta,
        trace: Vec::new(),
        seed: ff.seed,
        n: x.len(),
        p: ff.p,
    })
}

fn fit_cmd(a: &FitArgs, ts: Option<u64>) -> Result<(), CliError> {
    let x = read_series(&a.input)?;
    let mut opts = FitOptions::profile(a.profile.into(), a.seed);
    if let Some(n) = a.starts {
        if n == 0 {
            return Err(CliError::config("--starts must be positive"));
        }
        opts.starts_per_s = n;
    }
    if let Some(k) = a.shortlist {
        if k == 0 {
            return Err(CliError::config("--shortlist must be positive"));
        }
        opts.shortlist = k;
    }
    if a.s != "auto" {
        let s: usize = a.s.parse().map_err(|_| CliError::config(format!("--s must be `auto` or an integer, got {:?}", a.s)))?;
        opts.s_range = Some(vec![s]);
    }
    let f = fit(&x, a.p, &opts)?;
    let manifest = RunManifest::new("fit", a, Some(a.seed), ts)?.with_input(&a.input)?;
    emit(a.out.as_deref(), &to_json(&fit_to_file(&f, manifest))?)
}

#[derive(Serialize)]
struct BootFile {
    m: usize,
    #[serde(rename = "B")]
    b: usize,
    level: f64,
    n: usize,
    s: usize,
    alpha_hat: f64,
    theta_hat: Vec<f64>,
    phi_hat: Vec<f64>,
    converged_count: usize,
    ci: BootstrapCi,
    tau_ci: Option<[(f64, f64); 4]>,
    theta_devs: Vec<Vec<f64>>,
    phi_devs: Vec<Vec<f64>>,
    converged: Vec<bool>,
    manifest: RunManifest,
}

fn bootstrap_cmd(a: &BootstrapArgs, ts: Option<u64>) -> Result<(), CliError> {
    if a.b < MIN_REPLICATES {
        return Err(CliError::config(format!("--B must be at least {MIN_REPLICATES} for intervals")));
    }
    if !(a.level > 0.0 && a.level < 1.0) {
        return Err(CliError::config(format!("--level must lie in (0,1), got {}", a.level)));
    }
    let x = read_series(&a.input)?;
    let ff = read_fit(&a.fit)?;
    let f = fit_from_file(&ff, &x)?;
    let cfg = BootstrapConfig { m: a.m, b: a.b, seed: a.seed, burn: a.burn, ..Default::default() };
    let boot = bootstrap_run(&x, &f, &cfg)?;
    let ci = bootstrap_ci(&boot, x.len(), a.level).map_err(|e| match e {
        stablear::Error::SampleSize(m) => CliError::numerical(m),
        other => other.into(),
    })?;
    let out = BootFile {
        m: boot.m,
        b: a.b,
        level: a.level,
        n: boot.n,
        s: boot.s,
        alpha_hat: boot.alpha_hat,
        theta_hat: boot.theta_hat.clone(),
        phi_hat: boot.phi_hat.clone(),
        converged_count: boot.theta_devs.len(),
        ci,
        tau_ci: tau_ci(&f.eta_hat.tau, f.residuals.len(), a.level).ok(),
        theta_devs: boot.theta_devs,
        phi_devs: boot.phi_devs,
        converged: boot.converged,
        manifest: RunManifest::new("bootstrap", a, Some(a.seed), ts)?.with_input(&a.input)?.with_input(&a.fit)?,
    };
    emit(a.out.as_deref(), &to_json(&out)?)
}

#[derive(Serialize)]
struct ReportFile {
    #[serde(flatten)]
    report: diagnostics::DiagnosticsReport,
    manifest: RunManifest,
}

fn csv(header: &str, rows: impl Iterator<Item = Vec<f64>>) -> String {
    let mut s = format!("{header}\n");
    for r in rows {
        let cells: Vec<String> = r.iter().map(|v| fmt_g(*v, 17)).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

fn diagnose_cmd(a: &DiagnoseArgs, ts: Option<u64>) -> Result<(), CliError> {
    let x = read_series(&a.input)?;
    let ff = read_fit(&a.fit)?;
    let f = fit_from_file(&ff, &x)?;
    let aic = match a.p_max {
        Some(p_max) => order_scan(&x, p_max, &FitOptions::profile(a.profile.into(), a.seed))?
            .rows
            .iter()
            .map(|r| (r.p, r.aic))
            .collect(),
        None => vec![(ff.p, ff.aic)],
    };
    let rep = diagnostics::report(&x, &f, aic, a.max_lag, a.sims, a.seed)?;
    std::fs::create_dir_all(&a.out_dir).map_err(|e| CliError::io(&a.out_dir, e))?;
    let dir = &a.out_dir;
    let lagged = |v: &[f64]| -> Vec<Vec<f64>> { v.iter().enumerate().map(|(h, r)| vec![h as f64, *r]).collect() };
    write_text(&dir.join("acf.csv"), &csv("lag,acf", lagged(&rep.acf).into_iter()))?;
    write_text(&dir.join("pacf.csv"), &csv("lag,pacf", lagged(&rep.pacf).into_iter()))?;
    let banded = |v: &[f64], b: &[(f64, f64)]| -> Vec<Vec<f64>> {
        v.iter().zip(b).enumerate().map(|(h, (r, (lo, hi)))| vec![(h + 1) as f64, *r, *lo, *hi]).collect()
    };
    write_text(&dir.join("absacf.csv"), &csv("lag,acf,lo,hi", banded(&rep.abs_acf, &rep.bounds.abs).into_iter()))?;
    write_text(&dir.join("sqacf.csv"), &csv("lag,acf,lo,hi", banded(&rep.sq_acf, &rep.bounds.sq).into_iter()))?;
    write_text(&dir.join("qq.csv"), &csv("theoretical,empirical", rep.qq.iter().map(|(t, e)| vec![*t, *e])))?;
    let manifest = RunManifest::new("diagnose", a, Some(a.seed), ts)?.with_input(&a.input)?.with_input(&a.fit)?;
    write_json(&ReportFile { report: rep, manifest }, &dir.join("report.json"))
}

fn stable_cmd(op: &StableOp) -> Result<(), CliError> {
    let line = |v: f64| println!("{}", fmt_g(v, 10));
    match op {
        StableOp::Pdf { law, z } => line(stable::pdf(*z, &law.params()?, None)?),
        StableOp::Logpdf { law, z } => line(stable::log_pdf(*z, &law.params()?, None)?),
        StableOp::Cdf { law, z } => line(stable::cdf(*z, &law.params()?, None)?),
        StableOp::Quantile { law, q } => line(stable::quantile(*q, &law.params()?, None)?),
        StableOp::Sample { law, n, seed } => {
            let x = stable::sample(*n, &law.params()?, &mut stream(*seed))?;
            emit(None, &format_series(&x))?;
        }
        StableOp::Fisher { law, n } => {
            let tau = law.params()?;
            let m = fisher_info(&tau)?;
            let inv = m.try_inverse().ok_or_else(|| CliError::numerical("Fisher information is singular"))?;
            #[derive(Serialize)]
            struct Out {
                tau: TauJson,
                n: usize,
                information: Vec<Vec<f64>>,
                asymptotic_sd: Vec<f64>,
            }
            let out = Out {
                tau: tau.into(),
                n: *n,
                information: (0..4).map(|i| (0..4).map(|j| m[(i, j)]).collect()).collect(),
                asymptotic_sd: (0..4).map(|i| (inv[(i, i)] / *n as f64).sqrt()).collect(),
            };
            emit(None, &to_json(&out)?)?;
        }
    }
    Ok(())
}
