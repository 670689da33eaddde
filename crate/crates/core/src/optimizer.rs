//! Multi-start Nelder–Mead maximization of the conditional likelihood.
//!
//! For each candidate s: draw feasible random starts, score them with a
//! coarse density table, polish the best few with the simplex, then refine
//! the winner against the full-resolution table. The fit with the highest
//! likelihood over s is returned.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ar::{validate_factored, FactoredArParams};
use crate::likelihood::{cond_loglik, from_raw, to_raw, Objective, ParamVector};
use crate::poly;
use crate::rng::substream;
use crate::stable::{fisher_info, StableParams, DEFAULT_RESOLUTION};
use crate::{Error, Real, Result};

/// Simplex settings. Initial vertices sit `step·max(1, |x0_i|)` from x0
/// along each axis unless explicit steps are given.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NelderMeadOptions<T> {
    pub max_iter: usize,
    pub x_tol: T,
    pub f_tol: T,
    pub step: T,
}

impl<T: Real> Default for NelderMeadOptions<T> {
    fn default() -> Self {
        NelderMeadOptions { max_iter: 5000, x_tol: T::lit(1e-8), f_tol: T::lit(1e-12), step: T::lit(0.1) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadResult<T> {
    pub x: Vec<T>,
    pub value: T,
    pub iterations: usize,
    pub evaluations: usize,
    /// False when `max_iter` was reached.
    pub converged: bool,
}

/// Maximizes `f` from `x0`.
pub fn nelder_mead<T: Real, F: FnMut(&[T]) -> T>(f: F, x0: &[T], opts: &NelderMeadOptions<T>) -> NelderMeadResult<T> {
    let steps: Vec<T> = x0.iter().map(|v| opts.step * v.abs().max(T::one())).collect();
    nelder_mead_steps(f, x0, &steps, opts)
}

/// Maximizes `f` from `x0` with per-coordinate initial steps.
pub fn nelder_mead_steps<T: Real, F: FnMut(&[T]) -> T>(
    mut f: F,
    x0: &[T],
    steps: &[T],
    opts: &NelderMeadOptions<T>,
) -> NelderMeadResult<T> {
    let n = x0.len();
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let mut evals = 0usize;
    // minimize g = −f, NaN treated as +∞
    let mut g = |x: &[T]| {
        evals += 1;
        let v = -f(x);
        if v.is_nan() {
            T::infinity()
        } else {
            v
        }
    };
    let mut sim: Vec<(Vec<T>, T)> = Vec::with_capacity(n + 1);
    sim.push((x0.to_vec(), g(x0)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += steps[i];
        let v = g(&x);
        sim.push((x, v));
    }
    let order = |s: &mut Vec<(Vec<T>, T)>| s.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    order(&mut sim);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        let best = &sim[0].0;
        let diam = sim[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(best).map(|(a, b)| (*a - *b).abs()))
            .fold(T::zero(), T::max);
        let spread = sim[n].1 - sim[0].1;
        if n == 0 || diam <= opts.x_tol || spread <= opts.f_tol {
            converged = true;
            break;
        }
        iterations += 1;
        let inv_n = T::one() / T::from_usize(n).unwrap();
        let c: Vec<T> = (0..n).map(|j| sim[..n].iter().map(|(x, _)| x[j]).sum::<T>() * inv_n).collect();
        let worst = sim[n].0.clone();
        let along = |t: T| -> Vec<T> { c.iter().zip(&worst).map(|(&ci, &wi)| ci + t * (ci - wi)).collect() };
        let xr = along(T::one());
        let gr = g(&xr);
        if gr < sim[0].1 {
            let xe = along(two);
            let ge = g(&xe);
            sim[n] = if ge < gr { (xe, ge) } else { (xr, gr) };
        } else if gr < sim[n - 1].1 {
            sim[n] = (xr, gr);
        } else {
            let (xc, gc) = if gr < sim[n].1 {
                let xc = along(half);
                let gc = g(&xc);
                (xc, gc)
            } else {
                let xc = along(-half);
                let gc = g(&xc);
                (xc, gc)
            };
            if gc < gr.min(sim[n].1) {
                sim[n] = (xc, gc);
            } else {
                let x0 = sim[0].0.clone();
                for v in sim.iter_mut().skip(1) {
                    let x: Vec<T> = x0.iter().zip(&v.0).map(|(&a, &b)| a + half * (b - a)).collect();
                    let gv = g(&x);
                    *v = (x, gv);
                }
            }
        }
        order(&mut sim);
    }
    let (x, v) = sim.swap_remove(0);
    NelderMeadResult { x, value: -v, iterations, evaluations: evals, converged }
}

/// Preset search effort.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// 1200 starts per s, 8 shortlisted.
    Full,
    /// 120 starts per s, 4 shortlisted.
    Test,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub starts_per_s: usize,
    pub shortlist: usize,
    /// Noncausal orders to try; `None` means 0..=p.
    pub s_range: Option<Vec<usize>>,
    pub seed: u64,
    /// Table resolution used while searching.
    pub search_resolution: f64,
    pub search: NelderMeadOptions<f64>,
    pub polish: NelderMeadOptions<f64>,
}

impl FitOptions {
    pub fn profile(profile: Profile, seed: u64) -> Self {
        let (starts_per_s, shortlist) = match profile {
            Profile::Full => (1200, 8),
            Profile::Test => (120, 4),
        };
        FitOptions {
            starts_per_s,
            shortlist,
            s_range: None,
            seed,
            search_resolution: 1e-6,
            search: NelderMeadOptions { max_iter: 1500, x_tol: 1e-6, f_tol: 1e-6, step: 0.1 },
            polish: NelderMeadOptions { max_iter: 1000, x_tol: 1e-8, f_tol: 1e-10, step: 0.01 },
        }
    }
}

impl Default for FitOptions {
    fn default() -> Self {
        Self::profile(Profile::Full, 0)
    }
}

/// Search record for one s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchTrace {
    pub s: usize,
    /// Full-resolution L at the polished optimum for this s.
    pub loglik: f64,
    /// Simplex iterations per shortlisted start, then for the polish.
    pub iterations: Vec<usize>,
    pub evaluations: usize,
    pub converged: bool,
    pub eta: ParamVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub eta_hat: ParamVector,
    pub s_hat: usize,
    pub phi_hat: Vec<f64>,
    pub loglik: f64,
    /// Asymptotic SEs of (α, β, σ, μ); NaN when the information matrix is
    /// unavailable at τ̂.
    pub se_tau: [f64; 4],
    pub residuals: Vec<f64>,
    pub trace: Vec<SearchTrace>,
    pub seed: u64,
    pub n: usize,
    pub p: usize,
}

impl FitResult {
    /// −2L + 2(p + 4).
    pub fn aic(&self) -> f64 {
        aic(self.loglik, self.p)
    }
}

pub fn aic(loglik: f64, p: usize) -> f64 {
    -2.0 * loglik + 2.0 * (p + 4) as f64
}

fn sample_factor<R: Rng + ?Sized>(degree: usize, lo: f64, hi: f64, rng: &mut R) -> Vec<f64> {
    let mut c = vec![1.0];
    let mut left = degree;
    while left > 0 {
        let m = rng.random_range(lo..hi);
        if left >= 2 && rng.random_bool(0.5) {
            // conjugate pair: (1 − z/ρ)(1 − z/ρ̄) = 1 − 2cos(ω)/m·z + z²/m²
            let w = rng.random_range(0.0..std::f64::consts::PI);
            c = poly::mul(&c, &[1.0, -2.0 * w.cos() / m, 1.0 / (m * m)]);
            left -= 2;
        } else {
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            c = poly::mul(&c, &[1.0, -sign / m]);
            left -= 1;
        }
    }
    c
}

fn quantile_sorted(v: &[f64], q: f64) -> f64 {
    let h = (v.len() - 1) as f64 * q;
    let i = h.floor() as usize;
    let j = (i + 1).min(v.len() - 1);
    v[i] + (h - i as f64) * (v[j] - v[i])
}

/// Feasible starting points. θ comes from random factor roots (causal
/// moduli in (1.05, 5), noncausal in (0.05, 0.95), real or conjugate pairs);
/// α and β are uniform; μ and σ are the median and half the interquartile
/// range of the implied residuals, jittered by up to ±20%.
pub fn random_starts<R: Rng + ?Sized>(x: &[f64], p: usize, s: usize, count: usize, rng: &mut R) -> Result<Vec<ParamVector>> {
    if s > p {
        return Err(Error::Config(format!("s = {s} exceeds p = {p}")));
    }
    if x.len() <= p + 1 {
        return Err(Error::Input(format!("series of length {} too short for order {p}", x.len())));
    }
    let r = p - s;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let a = sample_factor(r, 1.05, 5.0, rng);
        let b = sample_factor(s, 0.05, 0.95, rng);
        let theta: Vec<f64> = a[1..].iter().chain(&b[1..]).map(|v| -v).collect();
        if !validate_factored(&theta, r, s).is_valid() {
            continue;
        }
        let mut z = FactoredArParams::new(theta.clone(), r, s)?.residuals(x)?;
        z.sort_by(f64::total_cmp);
        let med = quantile_sorted(&z, 0.5);
        let mut half_iqr = 0.5 * (quantile_sorted(&z, 0.75) - quantile_sorted(&z, 0.25));
        if !(half_iqr > 0.0) {
            half_iqr = z.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0) * 1e-3;
        }
        let alpha = rng.random_range(0.5..1.95);
        let beta = rng.random_range(-0.9..0.9);
        let sigma = half_iqr * rng.random_range(0.8..1.2);
        let mu = med * rng.random_range(0.8..1.2);
        out.push(ParamVector { theta, tau: StableParams::new(alpha, beta, sigma, mu)?, s });
    }
    Ok(out)
}

/// Per-coordinate simplex steps on the raw scale: μ moves relative to σ.
fn raw_steps(raw: &[f64], step: f64) -> Vec<f64> {
    let p = raw.len() - 4;
    let sigma = raw[p + 2].exp();
    raw.iter()
        .enumerate()
        .map(|(i, v)| if i == p + 3 { step * sigma } else { step * v.abs().max(1.0) })
        .collect()
}

fn to_param(raw: &[f64], s: usize) -> Result<ParamVector> {
    let (theta, t) = from_raw(raw);
    ParamVector::new(theta, s, StableParams::from_array(t)?)
}

fn search_s(x: &[f64], p: usize, s: usize, opts: &FitOptions) -> Result<SearchTrace> {
    let mut rng = substream(opts.seed, s as u64);
    let starts = random_starts(x, p, s, opts.starts_per_s.max(1), &mut rng)?;
    let coarse = Objective::new(x, p, s, opts.search_resolution)?;
    let raws: Vec<Vec<f64>> = starts.iter().map(|e| to_raw(&e.theta, &e.tau)).collect::<Result<_>>()?;
    let values: Vec<f64> = raws.par_iter().map(|r| coarse.eval(r)).collect();
    let mut idx: Vec<usize> = (0..raws.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    idx.truncate(opts.shortlist.max(1));
    let runs: Vec<NelderMeadResult<f64>> = idx
        .par_iter()
        .map(|&i| {
            let steps = raw_steps(&raws[i], opts.search.step);
            nelder_mead_steps(|r| coarse.eval(r), &raws[i], &steps, &opts.search)
        })
        .collect();
    let best = runs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.value.total_cmp(&b.1.value).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::Internal("empty shortlist".into()))?;
    let fine = Objective::new(x, p, s, DEFAULT_RESOLUTION)?;
    let steps = raw_steps(&runs[best].x, opts.polish.step);
    let pol = nelder_mead_steps(|r| fine.eval(r), &runs[best].x, &steps, &opts.polish);
    let eta = to_param(&pol.x, s).map_err(|_| Error::Internal(format!("search for s = {s} ended at an infeasible point")))?;
    let loglik = cond_loglik(x, &eta, None)?;
    let mut iterations: Vec<usize> = runs.iter().map(|r| r.iterations).collect();
    iterations.push(pol.iterations);
    Ok(SearchTrace {
        s,
        loglik,
        iterations,
        evaluations: raws.len() + runs.iter().map(|r| r.evaluations).sum::<usize>() + pol.evaluations,
        converged: runs[best].converged && pol.converged,
        eta,
    })
}

/// Asymptotic standard errors of τ̂ from n − p residuals.
pub fn tau_standard_errors(tau: &StableParams, n_res: usize) -> [f64; 4] {
    match fisher_info(tau).ok().and_then(|m| m.try_inverse()) {
        Some(inv) => [0, 1, 2, 3].map(|i| (inv[(i, i)] / n_res as f64).sqrt()),
        None => [f64::NAN; 4],
    }
}

/// Maximum likelihood fit of an AR(p) model over the configured s values.
/// On near ties (1e-9) the smaller s wins.
pub fn fit(x: &[f64], p: usize, opts: &FitOptions) -> Result<FitResult> {
    if x.len() <= p + 10 {
        return Err(Error::Input(format!("series of length {} too short to fit order {p}", x.len())));
    }
    if let Some(v) = x.iter().find(|v| !v.is_finite()) {
        return Err(Error::Input(format!("series contains non-finite value {v}")));
    }
    let s_range: Vec<usize> = opts.s_range.clone().unwrap_or_else(|| (0..=p).collect());
    if s_range.is_empty() {
        return Err(Error::Config("empty s range".into()));
    }
    if let Some(&s) = s_range.iter().find(|&&s| s > p) {
        return Err(Error::Config(format!("s = {s} exceeds p = {p}")));
    }
    let trace: Vec<SearchTrace> = s_range.iter().map(|&s| search_s(x, p, s, opts)).collect::<Result<_>>()?;
    let mut best = 0;
    for (i, t) in trace.iter().enumerate().skip(1) {
        let b = &trace[best];
        if t.loglik > b.loglik + 1e-9 || ((t.loglik - b.loglik).abs() <= 1e-9 && t.s < b.s) {
            best = i;
        }
    }
    let eta = trace[best].eta.clone();
    let ar = eta.factored()?;
    let residuals = ar.residuals(x)?;
    Ok(FitResult {
        s_hat: eta.s,
        phi_hat: ar.g_map().phi().to_vec(),
        loglik: trace[best].loglik,
        se_tau: tau_standard_errors(&eta.tau, residuals.len()),
        residuals,
        eta_hat: eta,
        trace,
        seed: opts.seed,
        n: x.len(),
        p,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderRow {
    pub p: usize,
    pub loglik: f64,
    pub aic: f64,
    pub fit: FitResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderScan {
    pub rows: Vec<OrderRow>,
    pub selected_p: usize,
}

/// Fits p = 1..=p_max and selects the order minimizing AIC. Every row uses
/// the same seed.
pub fn order_scan(x: &[f64], p_max: usize, opts: &FitOptions) -> Result<OrderScan> {
    if p_max == 0 {
        return Err(Error::Config("p_max must be at least 1".into()));
    }
    let mut rows = Vec::with_capacity(p_max);
    for p in 1..=p_max {
        let mut o = opts.clone();
        o.s_range = None;
        let fit = fit(x, p, &o)?;
        rows.push(OrderRow { p, loglik: fit.loglik, aic: fit.aic(), fit });
    }
    let selected_p = rows
        .iter()
        .min_by(|a, b| a.aic.total_cmp(&b.aic))
        .map(|r| r.p)
        .unwrap_or(1);
    Ok(OrderScan { rows, selected_p })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn concave_quadratic() {
        let a = [1.5, -0.3, 2.0];
        let mut rng = stream(1);
        let x0: Vec<f64> = (0..3).map(|_| rng.random_range(-3.0..3.0)).collect();
        let r = nelder_mead(|x: &[f64]| -x.iter().zip(&a).map(|(u, v)| (u - v).powi(2)).sum::<f64>(), &x0, &NelderMeadOptions::default());
        assert!(r.converged);
        for (u, v) in r.x.iter().zip(&a) {
            assert!((u - v).abs() < 1e-6);
        }
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| -((1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2));
        let opts = NelderMeadOptions { max_iter: 10_000, x_tol: 1e-10, f_tol: 1e-20, step: 0.1 };
        let r = nelder_mead(f, &[-1.2, 1.0], &opts);
        assert!((r.x[0] - 1.0).abs() < 1e-4 && (r.x[1] - 1.0).abs() < 1e-4, "{:?}", r.x);
    }

    #[test]
    fn constant_function_stays_put() {
        let r = nelder_mead(|_: &[f64]| 3.0, &[0.4, -1.0], &NelderMeadOptions::default());
        assert_eq!(r.x, vec![0.4, -1.0]);
        assert_eq!(r.value, 3.0);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn iteration_cap_reported() {
        let opts = NelderMeadOptions { max_iter: 5, ..Default::default() };
        let r = nelder_mead(|x: &[f64]| -(x[0] - 100.0).powi(2), &[0.0], &opts);
        assert!(!r.converged);
        assert_eq!(r.iterations, 5);
    }

    #[test]
    fn single_precision_simplex() {
        let r = nelder_mead(|x: &[f32]| -(x[0] - 0.5).powi(2) - (x[1] + 1.0).powi(2), &[0.0f32, 0.0], &NelderMeadOptions::default());
        assert!((r.x[0] - 0.5).abs() < 1e-3 && (r.x[1] + 1.0).abs() < 1e-3);
    }

    fn series() -> Vec<f64> {
        let ar = FactoredArParams::new(vec![0.5, 2.0], 1, 1).unwrap();
        ar.simulate(&StableParams::new(1.5, 0.0, 1.0, 0.0).unwrap(), 200, 200, &mut stream(8)).unwrap()
    }

    #[test]
    fn starts_are_feasible_and_seeded() {
        let x = series();
        for s in 0..=2 {
            let a = random_starts(&x, 2, s, 200, &mut stream(3)).unwrap();
            let b = random_starts(&x, 2, s, 200, &mut stream(3)).unwrap();
            assert_eq!(a, b);
            for e in &a {
                assert!(validate_factored(&e.theta, 2 - s, s).is_valid());
                assert!(e.tau.sigma > 0.0 && (0.5..1.95).contains(&e.tau.alpha) && e.tau.beta.abs() < 0.9);
            }
        }
    }

    #[test]
    fn starts_cover_root_sign_patterns() {
        let x = series();
        for s in 0..=2 {
            let starts = random_starts(&x, 2, s, 1200, &mut stream(4)).unwrap();
            // sign pattern of (θ₁, θ₂)
            let mut counts = [0usize; 4];
            for e in &starts {
                counts[(e.theta[0] > 0.0) as usize * 2 + (e.theta[1] > 0.0) as usize] += 1;
            }
            for c in counts {
                assert!(c as f64 >= 0.1 * 1200.0 || s == 1, "s={s}: {counts:?}");
            }
            if s == 1 {
                // θ₂ sign set by one real noncausal root, θ₁ by one causal root
                assert!(counts.iter().all(|&c| c >= 120), "{counts:?}");
            }
        }
    }

    #[test]
    fn aic_bookkeeping() {
        assert_eq!(aic(-100.0, 2), 212.0);
    }
}
