//! Uncertainty for the fitted model: m-out-of-n residual bootstrap for θ
//! and φ, normal intervals for τ from the Fisher information, and a
//! truncated Monte Carlo simulator of the limit functional W(u).

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::ar::{validate_factored, FactoredArParams};
use crate::likelihood::{loglik_factored, ParamVector};
use crate::optimizer::{nelder_mead_steps, FitResult, NelderMeadOptions};
use crate::rng::substream;
use crate::stable::{self, fisher_info, tilde_c, DensityTable, StableParams, DEFAULT_RESOLUTION};
use crate::{Error, Result};

/// Minimum number of converged replicates for bootstrap intervals.
pub const MIN_REPLICATES: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    /// Replicate length; `None` means ⌈n/2⌉.
    pub m: Option<usize>,
    pub b: usize,
    pub seed: u64,
    pub burn: usize,
    /// θ̂ plus `starts − 1` jittered feasible perturbations.
    pub starts: usize,
    pub nm: NelderMeadOptions<f64>,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            m: None,
            b: 200,
            seed: 0,
            burn: 500,
            starts: 16,
            nm: NelderMeadOptions { max_iter: 2000, x_tol: 1e-9, f_tol: 1e-10, step: 0.05 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    /// m^{1/α̂}(θ̂* − θ̂), one row per converged replicate.
    pub theta_devs: Vec<Vec<f64>>,
    /// m^{1/α̂}(φ̂* − φ̂).
    pub phi_devs: Vec<Vec<f64>>,
    /// Replicate estimates θ̂*, aligned with the deviation rows.
    pub theta_star: Vec<Vec<f64>>,
    /// Per replicate, in index order.
    pub converged: Vec<bool>,
    pub alpha_hat: f64,
    pub theta_hat: Vec<f64>,
    pub phi_hat: Vec<f64>,
    pub s: usize,
    pub m: usize,
    pub n: usize,
}

struct Replicate {
    theta: Vec<f64>,
    ok: bool,
}

fn jittered<R: Rng + ?Sized>(theta: &[f64], r: usize, s: usize, rng: &mut R) -> Option<Vec<f64>> {
    for _ in 0..100 {
        let t: Vec<f64> = theta.iter().map(|&v| v + 0.1 * v.abs().max(0.1) * rng.random_range(-1.0..1.0)).collect();
        if validate_factored(&t, r, s).is_valid() {
            return Some(t);
        }
    }
    None
}

fn replicate(
    z: &[f64],
    ar: &FactoredArParams<f64>,
    tau: &StableParams,
    table: &DensityTable,
    m: usize,
    cfg: &BootstrapConfig,
    index: usize,
) -> Replicate {
    let (r, s, p) = (ar.r(), ar.s(), ar.p());
    let mut rng = substream(cfg.seed, index as u64);
    let noise: Vec<f64> = (0..m + 2 * cfg.burn + p).map(|_| z[rng.random_range(0..z.len())]).collect();
    let xs = ar.filter_noise(&noise);
    let xs = &xs[cfg.burn..cfg.burn + m];
    let obj = |th: &[f64]| -> f64 {
        match FactoredArParams::new(th.to_vec(), r, s) {
            Ok(a) => loglik_factored(xs, &a, tau, table).unwrap_or(f64::NEG_INFINITY),
            Err(_) => crate::likelihood::Objective::penalty(validate_factored(th, r, s)),
        }
    };
    let mut starts = vec![ar.theta().to_vec()];
    for _ in 1..cfg.starts.max(1) {
        if let Some(t) = jittered(ar.theta(), r, s, &mut rng) {
            starts.push(t);
        }
    }
    let mut best: Option<(Vec<f64>, f64, bool)> = None;
    for st in &starts {
        let steps: Vec<f64> = st.iter().map(|v| cfg.nm.step * v.abs().max(0.1)).collect();
        let res = nelder_mead_steps(obj, st, &steps, &cfg.nm);
        if best.as_ref().map_or(true, |b| res.value > b.1) {
            best = Some((res.x, res.value, res.converged));
        }
    }
    match best {
        Some((theta, v, conv)) if v.is_finite() && validate_factored(&theta, r, s).is_valid() => Replicate { theta, ok: conv },
        _ => Replicate { theta: ar.theta().to_vec(), ok: false },
    }
}

/// Runs the m-out-of-n residual bootstrap around `fit`. Each replicate
/// resamples residuals, regenerates a series through the fitted factors, and
/// re-maximizes over θ with τ̂ and ŝ held fixed. Failed replicates are
/// flagged and dropped.
pub fn bootstrap_run(x: &[f64], fit: &FitResult, cfg: &BootstrapConfig) -> Result<BootstrapResult> {
    let n = x.len();
    let m = cfg.m.unwrap_or(n.div_ceil(2));
    if m <= 1 || m >= n {
        return Err(Error::Config(format!("bootstrap size m = {m} must satisfy 1 < m < n = {n}")));
    }
    if cfg.b == 0 {
        return Err(Error::Config("bootstrap needs at least one replicate".into()));
    }
    let eta = &fit.eta_hat;
    let ar = eta.factored()?;
    if m <= ar.p() + 1 {
        return Err(Error::Config(format!("bootstrap size m = {m} too small for order {}", ar.p())));
    }
    let tau = eta.tau;
    let z = ar.residuals(x)?;
    let table = DensityTable::build(tau.alpha, tau.beta, DEFAULT_RESOLUTION)?;
    let reps: Vec<Replicate> = (0..cfg.b).into_par_iter().map(|i| replicate(&z, &ar, &tau, &table, m, cfg, i)).collect();
    let scale = (m as f64).powf(1.0 / tau.alpha);
    let phi_hat = ar.g_map().phi().to_vec();
    let mut out = BootstrapResult {
        theta_devs: Vec::new(),
        phi_devs: Vec::new(),
        theta_star: Vec::new(),
        converged: reps.iter().map(|r| r.ok).collect(),
        alpha_hat: tau.alpha,
        theta_hat: ar.theta().to_vec(),
        phi_hat: phi_hat.clone(),
        s: ar.s(),
        m,
        n,
    };
    for rep in reps.into_iter().filter(|r| r.ok) {
        let phi = FactoredArParams::new(rep.theta.clone(), ar.r(), ar.s())?.g_map().phi().to_vec();
        out.theta_devs.push(rep.theta.iter().zip(&out.theta_hat).map(|(a, b)| scale * (a - b)).collect());
        out.phi_devs.push(phi.iter().zip(&phi_hat).map(|(a, b)| scale * (a - b)).collect());
        out.theta_star.push(rep.theta);
    }
    Ok(out)
}

/// Linear-interpolation sample quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let i = h.floor() as usize;
    let j = (i + 1).min(sorted.len() - 1);
    sorted[i] + (h - i as f64) * (sorted[j] - sorted[i])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapCi {
    pub level: f64,
    pub theta: Vec<(f64, f64)>,
    pub phi: Vec<(f64, f64)>,
}

fn pivot(est: &[f64], devs: &[Vec<f64>], rate: f64, gamma: f64) -> Vec<(f64, f64)> {
    (0..est.len())
        .map(|j| {
            let mut d: Vec<f64> = devs.iter().map(|row| row[j]).collect();
            d.sort_by(f64::total_cmp);
            let lo = quantile(&d, gamma / 2.0);
            let hi = quantile(&d, 1.0 - gamma / 2.0);
            (est[j] - hi / rate, est[j] - lo / rate)
        })
        .collect()
}

/// Quantile-pivot intervals [θ̂ − q_{1−γ/2}/n^{1/α̂}, θ̂ − q_{γ/2}/n^{1/α̂}].
pub fn bootstrap_ci(boot: &BootstrapResult, n: usize, level: f64) -> Result<BootstrapCi> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Config(format!("level must lie in (0,1), got {level}")));
    }
    if boot.theta_devs.len() < MIN_REPLICATES {
        return Err(Error::SampleSize(format!(
            "{} converged replicates, at least {MIN_REPLICATES} needed",
            boot.theta_devs.len()
        )));
    }
    let rate = (n as f64).powf(1.0 / boot.alpha_hat);
    let gamma = 1.0 - level;
    Ok(BootstrapCi {
        level,
        theta: pivot(&boot.theta_hat, &boot.theta_devs, rate, gamma),
        phi: pivot(&boot.phi_hat, &boot.phi_devs, rate, gamma),
    })
}

/// τ̂_i ± z_{1−γ/2}·sqrt([I⁻¹(τ̂)]_ii / n), with α clipped to (0, 2] and β
/// to [−1, 1].
pub fn tau_ci(tau_hat: &StableParams, n: usize, level: f64) -> Result<[(f64, f64); 4]> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Config(format!("level must lie in (0,1), got {level}")));
    }
    if n <= 1 {
        return Err(Error::SampleSize(format!("n = {n} too small")));
    }
    let inv = fisher_info(tau_hat)?
        .try_inverse()
        .ok_or_else(|| Error::numerical("Fisher information is singular", f64::NAN))?;
    let z = Normal::standard().inverse_cdf(0.5 + level / 2.0);
    let est = tau_hat.as_array();
    let mut out = [(0.0, 0.0); 4];
    for i in 0..4 {
        let half = z * (inv[(i, i)] / n as f64).sqrt();
        out[i] = (est[i] - half, est[i] + half);
    }
    out[0] = (out[0].0.max(f64::MIN_POSITIVE), out[0].1.min(2.0));
    out[1] = (out[1].0.max(-1.0), out[1].1.min(1.0));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WSimConfig {
    /// Number of arrival terms Γ_k.
    pub k: usize,
    /// Lead/lag range; `None` picks the smallest J with |c_j(u)| below
    /// 1e-10·max|c| beyond it, so J does not change when u is rescaled.
    pub j: Option<usize>,
    pub seed: u64,
}

impl Default for WSimConfig {
    fn default() -> Self {
        WSimConfig { k: 2000, j: None, seed: 0 }
    }
}

/// One summand of W(u): the log-density increment and the shift applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WTerm {
    pub k: usize,
    pub j: isize,
    pub increment: f64,
    pub shift: f64,
}

/// Terms of the truncated W(u) in draw order. Draws are made per k (E_k,
/// δ_k, then Z_{k,j} for j = −J..J, j ≠ 0), so raising K keeps the earlier
/// terms.
pub fn simulate_w_terms(u: &[f64], ar: &FactoredArParams<f64>, tau: &StableParams, cfg: &WSimConfig) -> Result<Vec<WTerm>> {
    if cfg.k == 0 || cfg.j == Some(0) {
        return Err(Error::Config("W simulation needs K, J ≥ 1".into()));
    }
    tau.validate()?;
    let cj = ar.cj(u, None)?;
    let j_max = match cfg.j {
        Some(j) => j,
        None => {
            let k = cj.order as isize;
            let cut = 1e-10 * cj.c.iter().map(|v| v.abs()).fold(0.0, f64::max);
            (1..=k).rev().find(|&j| cj.at(j).abs() > cut || cj.at(-j).abs() > cut).map_or(1, |j| j as usize + 1)
        }
    };
    let table = DensityTable::build(tau.alpha, tau.beta, DEFAULT_RESOLUTION)?;
    let lnf = |z: f64| table.log_pdf_std((z - tau.mu) / tau.sigma) - tau.sigma.ln();
    let scale = tilde_c(tau.alpha)?.powf(1.0 / tau.alpha) * tau.sigma;
    let mut rng = substream(cfg.seed, 0);
    let mut gamma = 0.0;
    let mut out = Vec::with_capacity(cfg.k * 2 * j_max);
    for k in 1..=cfg.k {
        gamma += -(1.0 - rng.random::<f64>()).ln();
        let delta = if rng.random::<f64>() < 0.5 * (1.0 + tau.beta) { 1.0 } else { -1.0 };
        let g = gamma.powf(-1.0 / tau.alpha);
        for j in -(j_max as isize)..=(j_max as isize) {
            if j == 0 {
                continue;
            }
            let z = tau.mu + tau.sigma * stable::sample_std(tau.alpha, tau.beta, &mut rng);
            let shift = scale * cj.at(j) * delta * g;
            let increment = if shift == 0.0 { 0.0 } else { lnf(z + shift) - lnf(z) };
            out.push(WTerm { k, j, increment, shift });
        }
    }
    Ok(out)
}

/// Truncated Monte Carlo draw of W(u).
pub fn simulate_w(u: &[f64], ar: &FactoredArParams<f64>, tau: &StableParams, cfg: &WSimConfig) -> Result<f64> {
    Ok(simulate_w_terms(u, ar, tau, cfg)?.iter().map(|t| t.increment).sum())
}

/// Convenience wrapper for a fitted parameter vector.
pub fn simulate_w_at(u: &[f64], eta: &ParamVector, cfg: &WSimConfig) -> Result<f64> {
    simulate_w(u, &eta.factored()?, &eta.tau, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::stable::pdf_derivs_std;

    fn boot_with(devs: Vec<Vec<f64>>) -> BootstrapResult {
        BootstrapResult {
            phi_devs: devs.clone(),
            theta_star: devs.clone(),
            converged: vec![true; devs.len()],
            theta_devs: devs,
            alpha_hat: 1.5,
            theta_hat: vec![2.0],
            phi_hat: vec![2.0],
            s: 1,
            m: 100,
            n: 500,
        }
    }

    #[test]
    fn degenerate_deviations() {
        let ci = bootstrap_ci(&boot_with(vec![vec![0.0]; 40]), 500, 0.95).unwrap();
        assert_eq!(ci.theta, vec![(2.0, 2.0)]);
        assert_eq!(ci.phi, vec![(2.0, 2.0)]);
    }

    #[test]
    fn symmetric_deviations() {
        let devs: Vec<Vec<f64>> = (0..101).map(|i| vec![(i as f64 - 50.0) / 10.0]).collect();
        let ci = bootstrap_ci(&boot_with(devs), 500, 0.9).unwrap();
        let (lo, hi) = ci.theta[0];
        assert!(((2.0 - lo) - (hi - 2.0)).abs() < 1e-12);
        let rate = 500f64.powf(1.0 / 1.5);
        assert!((hi - 2.0 - 4.5 / rate).abs() < 1e-12);
    }

    #[test]
    fn too_few_replicates() {
        assert!(matches!(bootstrap_ci(&boot_with(vec![vec![0.0]; 19]), 500, 0.95), Err(Error::SampleSize(_))));
    }

    #[test]
    fn tau_interval_widths() {
        let t = StableParams::new(1.5, 0.0, 1.0, 0.0).unwrap();
        let ci = tau_ci(&t, 500, 0.95).unwrap();
        let want = [0.071, 0.137, 0.048, 0.078];
        for i in 0..4 {
            let w = ci[i].1 - ci[i].0;
            assert!((w / (2.0 * 1.96 * want[i]) - 1.0).abs() < 0.1, "{i}: {w}");
            assert_eq!(0.5 * (ci[i].0 + ci[i].1), t.as_array()[i]);
        }
        let ci4 = tau_ci(&t, 2000, 0.95).unwrap();
        assert!(((ci[2].1 - ci[2].0) / (ci4[2].1 - ci4[2].0) - 2.0).abs() < 1e-12);
        let tiny = tau_ci(&t, 500, 1e-9).unwrap();
        assert!(tiny.iter().all(|(a, b)| b - a < 1e-8));
    }

    #[test]
    fn beta_interval_clipped() {
        let t = StableParams::new(1.8, 0.9, 1.0, 0.0).unwrap();
        let ci = tau_ci(&t, 100, 0.95).unwrap();
        assert_eq!(ci[1].1, 1.0);
        assert!(ci[0].1 <= 2.0);
    }

    fn fitted(theta: Vec<f64>, s: usize, x: &[f64], tau: StableParams) -> FitResult {
        let eta = ParamVector::new(theta, s, tau).unwrap();
        let ar = eta.factored().unwrap();
        FitResult {
            s_hat: s,
            phi_hat: ar.g_map().phi().to_vec(),
            loglik: 0.0,
            se_tau: [0.0; 4],
            residuals: ar.residuals(x).unwrap(),
            eta_hat: eta,
            trace: Vec::new(),
            seed: 0,
            n: x.len(),
            p: ar.p(),
        }
    }

    #[test]
    fn bootstrap_contract() {
        let tau = StableParams::new(1.5, 0.0, 1.0, 0.0).unwrap();
        let ar = FactoredArParams::new(vec![2.0], 0, 1).unwrap();
        let x = ar.simulate(&tau, 300, 500, &mut stream(21)).unwrap();
        let fit = fitted(vec![2.0], 1, &x, tau);
        let cfg = BootstrapConfig { m: Some(100), b: 30, seed: 5, ..Default::default() };
        let a = bootstrap_run(&x, &fit, &cfg).unwrap();
        let b = bootstrap_run(&x, &fit, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.converged.len(), 30);
        assert!(a.theta_devs.len() >= 25);
        let scale = 100f64.powf(1.0 / 1.5);
        for (d, t) in a.theta_devs.iter().zip(&a.theta_star) {
            assert!((d[0] - scale * (t[0] - 2.0)).abs() < 1e-12);
            assert!(t[0].abs() > 1.0);
        }
        let bad = BootstrapConfig { m: Some(300), ..cfg.clone() };
        assert!(matches!(bootstrap_run(&x, &fit, &bad), Err(Error::Config(_))));
        let ci = bootstrap_ci(&a, 300, 0.95).unwrap();
        assert!(ci.phi[0].0 < ci.phi[0].1);
    }

    #[test]
    fn bootstrap_thread_independence() {
        let tau = StableParams::new(1.2, 0.3, 1.0, 0.0).unwrap();
        let ar = FactoredArParams::new(vec![0.5], 1, 0).unwrap();
        let x = ar.simulate(&tau, 200, 500, &mut stream(22)).unwrap();
        let fit = fitted(vec![0.5], 0, &x, tau);
        let cfg = BootstrapConfig { b: 12, seed: 9, ..Default::default() };
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let a = one.install(|| bootstrap_run(&x, &fit, &cfg)).unwrap();
        let b = three.install(|| bootstrap_run(&x, &fit, &cfg)).unwrap();
        assert_eq!(a, b);
    }

    fn w_setup() -> (FactoredArParams<f64>, StableParams) {
        (FactoredArParams::new(vec![0.5, 2.0], 1, 1).unwrap(), StableParams::new(1.5, 0.0, 1.0, 0.0).unwrap())
    }

    #[test]
    fn w_at_zero() {
        let (ar, tau) = w_setup();
        assert_eq!(simulate_w(&[0.0, 0.0], &ar, &tau, &WSimConfig::default()).unwrap(), 0.0);
    }

    #[test]
    fn w_truncation_stability() {
        let (ar, tau) = w_setup();
        let u = [1e-3, -1e-3];
        let a = simulate_w(&u, &ar, &tau, &WSimConfig { k: 2000, j: None, seed: 3 }).unwrap();
        let b = simulate_w(&u, &ar, &tau, &WSimConfig { k: 4000, j: None, seed: 3 }).unwrap();
        assert!((a - b).abs() <= 1e-3, "{a} {b}");
    }

    #[test]
    fn w_terms_bounded_by_score() {
        let (ar, tau) = w_setup();
        let sup = (-3000..=3000)
            .map(|i| {
                let d = pdf_derivs_std(1.5, 0.0, i as f64 * 0.01).unwrap();
                (d.d1 / d.f).abs()
            })
            .fold(0.0, f64::max);
        let terms = simulate_w_terms(&[0.3, -0.2], &ar, &tau, &WSimConfig { k: 200, j: None, seed: 4 }).unwrap();
        for t in &terms {
            assert!(t.increment.abs() <= 1.01 * sup * t.shift.abs() + 1e-12, "{t:?} sup {sup}");
        }
    }

    #[test]
    fn w_linear_for_small_scale() {
        let (ar, tau) = w_setup();
        let u = [0.4, -0.7];
        let cfg = WSimConfig { k: 300, j: None, seed: 6 };
        let w = |l: f64| simulate_w(&[u[0] * l, u[1] * l], &ar, &tau, &cfg).unwrap();
        let (r1, r2) = (w(1e-3) / 1e-3, w(5e-4) / 5e-4);
        assert!(r1.is_finite() && ((r1 - r2) / r1).abs() < 0.05, "{r1} {r2}");
    }
}
