//! Model-building diagnostics: sample ACF/PACF, simulated bounds for the
//! correlations of absolute and squared residuals, and stable qq data.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::optimizer::FitResult;
use crate::rng::substream;
use crate::stable::{sample, DensityTable, StableParams, DEFAULT_RESOLUTION};
use crate::{Error, Real, Result};

/// Mean-corrected sample autocorrelations at lags 0..=max_lag.
pub fn acf<T: Real>(x: &[T], max_lag: usize) -> Result<Vec<T>> {
    if max_lag >= x.len() {
        return Err(Error::domain(format!("max lag {max_lag} needs more than {} observations", x.len())));
    }
    let n = T::from_usize(x.len()).unwrap();
    let mean = x.iter().copied().sum::<T>() / n;
    let d: Vec<T> = x.iter().map(|&v| v - mean).collect();
    let c0: T = d.iter().map(|&v| v * v).sum();
    if !(c0 > T::zero()) || !c0.is_finite() {
        return Err(Error::domain("autocorrelation undefined for a constant or non-finite series"));
    }
    Ok((0..=max_lag)
        .map(|h| if h == 0 { T::one() } else { d[h..].iter().zip(&d).map(|(&a, &b)| a * b).sum::<T>() / c0 })
        .collect())
}

/// Partial autocorrelations at lags 0..=max_lag by Durbin–Levinson; lag 0
/// is 1.
pub fn pacf<T: Real>(x: &[T], max_lag: usize) -> Result<Vec<T>> {
    let rho = acf(x, max_lag)?;
    Ok(durbin_levinson(&rho))
}

/// PACF from autocorrelations ρ₀..ρ_H.
pub fn durbin_levinson<T: Real>(rho: &[T]) -> Vec<T> {
    let mut out = vec![T::one()];
    let mut phi: Vec<T> = Vec::new();
    let mut v = T::one();
    for k in 1..rho.len() {
        let num = rho[k] - (0..k - 1).map(|j| phi[j] * rho[k - 1 - j]).sum::<T>();
        let a = if v > T::zero() { num / v } else { T::zero() };
        let prev = phi.clone();
        for j in 0..k - 1 {
            phi[j] = prev[j] - a * prev[k - 2 - j];
        }
        phi.push(a);
        v *= T::one() - a * a;
        out.push(a);
    }
    out
}

/// Per-lag 2.5% and 97.5% quantiles of the lag-h correlations of |Z − Z̄|
/// and (Z − Z̄)² for i.i.d. stable samples of size n_res.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependenceBounds {
    /// Lags 1..=max_lag.
    pub abs: Vec<(f64, f64)>,
    pub sq: Vec<(f64, f64)>,
    pub n_res: usize,
    pub sims: usize,
    pub seed: u64,
}

fn abs_sq_acf(z: &[f64], max_lag: usize) -> (Vec<f64>, Vec<f64>) {
    let mean = z.iter().sum::<f64>() / z.len() as f64;
    let a: Vec<f64> = z.iter().map(|v| (v - mean).abs()).collect();
    let s: Vec<f64> = a.iter().map(|v| v * v).collect();
    let nan = || vec![f64::NAN; max_lag];
    let ra = acf(&a, max_lag).map(|r| r[1..].to_vec()).unwrap_or_else(|_| nan());
    let rs = acf(&s, max_lag).map(|r| r[1..].to_vec()).unwrap_or_else(|_| nan());
    (ra, rs)
}

/// Simulated i.i.d. bounds; simulation i uses substream (seed, i).
pub fn dependence_bounds(tau: &StableParams, n_res: usize, max_lag: usize, sims: usize, seed: u64) -> Result<DependenceBounds> {
    if sims < 100 {
        return Err(Error::Config(format!("at least 100 simulations needed, got {sims}")));
    }
    if max_lag == 0 || max_lag >= n_res {
        return Err(Error::Config(format!("lag range 1..={max_lag} invalid for {n_res} residuals")));
    }
    tau.validate()?;
    let stats: Vec<(Vec<f64>, Vec<f64>)> = (0..sims)
        .into_par_iter()
        .map(|i| {
            let z = sample(n_res, tau, &mut substream(seed, i as u64)).expect("validated parameters");
            abs_sq_acf(&z, max_lag)
        })
        .collect();
    let band = |pick: &dyn Fn(&(Vec<f64>, Vec<f64>)) -> f64| {
        let mut v: Vec<f64> = stats.iter().map(pick).filter(|x| x.is_finite()).collect();
        v.sort_by(f64::total_cmp);
        (crate::inference::quantile(&v, 0.025), crate::inference::quantile(&v, 0.975))
    };
    Ok(DependenceBounds {
        abs: (0..max_lag).map(|h| band(&|s| s.0[h])).collect(),
        sq: (0..max_lag).map(|h| band(&|s| s.1[h])).collect(),
        n_res,
        sims,
        seed,
    })
}

/// (theoretical, empirical) pairs at plotting positions (i − 0.5)/N.
pub fn qq_points(z: &[f64], tau: &StableParams) -> Result<Vec<(f64, f64)>> {
    if z.is_empty() {
        return Err(Error::Input("no residuals for qq plot".into()));
    }
    tau.validate()?;
    let table = DensityTable::build(tau.alpha, tau.beta, DEFAULT_RESOLUTION)?;
    let mut sorted = z.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &e)| Ok((tau.mu + tau.sigma * table.quantile_std((i as f64 + 0.5) / n)?, e)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub acf: Vec<f64>,
    pub pacf: Vec<f64>,
    /// (p, AIC) rows when an order scan was run.
    pub aic: Vec<(usize, f64)>,
    /// Residual correlations at lags 1..=max_lag.
    pub abs_acf: Vec<f64>,
    pub sq_acf: Vec<f64>,
    pub bounds: DependenceBounds,
    pub qq: Vec<(f64, f64)>,
    pub tau: StableParams,
    pub max_lag: usize,
}

/// Assembles the report for a series and its fit.
pub fn report(x: &[f64], fit: &FitResult, aic: Vec<(usize, f64)>, max_lag: usize, sims: usize, seed: u64) -> Result<DiagnosticsReport> {
    let z = fit.eta_hat.factored()?.residuals(x)?;
    if max_lag >= z.len() {
        return Err(Error::Config(format!("max lag {max_lag} too large for {} residuals", z.len())));
    }
    let (abs_acf, sq_acf) = abs_sq_acf(&z, max_lag);
    let tau = fit.eta_hat.tau;
    Ok(DiagnosticsReport {
        acf: acf(x, max_lag)?,
        pacf: pacf(x, max_lag)?,
        aic,
        abs_acf,
        sq_acf,
        bounds: dependence_bounds(&tau, z.len(), max_lag, sims, seed)?,
        qq: qq_points(&z, &tau)?,
        tau,
        max_lag,
    })
}
