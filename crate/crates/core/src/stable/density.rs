//! Direct evaluation of the standardized density by Fourier inversion.
//!
//! f(x) = (1/π)·Re ∫₀^∞ exp(−ixs)·φ(s) ds. The integrand is analytic in the
//! right half plane, so the path may be turned onto the ray s = u·e^{iω}; for
//! large |x| a downward ray converts the oscillating factor into exponential
//! decay. Integration runs in log u, where the small-u power behaviour of
//! φ is smooth, with adaptive Gauss–Kronrod panels.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::tail::TailSeries;
use super::log_cf_std;
use crate::quad::adaptive_gk;
use crate::{Error, Result};

/// Density value and its first two x-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityDerivs {
    pub f: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Below this u the integrand is replaced by its leading behaviour.
const U_FLOOR: f64 = 1e-14;
/// log-magnitude at which the integrand is truncated.
const LOG_CUTOFF: f64 = -42.0;
const RAY_STEPS: i32 = 16;
const TOL_REL: f64 = 1e-9;
/// Absolute tolerance at the origin, scaled by (1 + |x|)⁻² further out.
const TOL_ABS: f64 = 1e-14;
const MAX_PANELS: usize = 600;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Ray {
    /// ω = k·π/(2·RAY_STEPS)
    pub k: i32,
    pub tau_end: f64,
}

impl Ray {
    fn omega(&self) -> f64 {
        self.k as f64 * PI / (2.0 * RAY_STEPS as f64)
    }
}

#[inline]
fn exponent(alpha: f64, beta: f64, x: f64, omega: f64, tau: f64) -> (Complex64, Complex64) {
    let ln_s = Complex64::new(tau, omega);
    let s = ln_s.exp();
    let phi = log_cf_std(alpha, beta, s, ln_s) - Complex64::new(0.0, x) * s;
    (phi, s)
}

/// Pick the ray along which the integrand dies fastest without growing.
pub(crate) fn choose_ray(alpha: f64, beta: f64, x: f64, hint: Option<i32>) -> Option<Ray> {
    let kmin = -RAY_STEPS;
    let kmax = RAY_STEPS - 2;
    let range: Vec<i32> = match hint {
        Some(h) => ((h - 2).max(kmin)..=(h + 2).min(kmax)).collect(),
        None => (kmin..=kmax).collect(),
    };
    let mut best: Option<(f64, Ray)> = None;
    'cand: for k in range {
        let omega = k as f64 * PI / (2.0 * RAY_STEPS as f64);
        let mut tau = -4.0;
        let mut below = 0;
        let mut tau_end = f64::NAN;
        let mut phase_end = 0.0;
        while tau <= 40.0 {
            let (phi, _) = exponent(alpha, beta, x, omega, tau);
            if !phi.re.is_finite() || phi.re > 1.0 {
                continue 'cand;
            }
            if phi.re + tau < LOG_CUTOFF {
                if below == 0 {
                    tau_end = tau;
                    phase_end = phi.im;
                }
                below += 1;
                if below == 3 {
                    break;
                }
            } else {
                below = 0;
            }
            tau += 0.5;
        }
        if below < 3 {
            continue;
        }
        let cost = (tau_end - U_FLOOR.ln()) / 4.0 + phase_end.abs() / PI;
        if best.as_ref().map_or(true, |(c, _)| cost < *c) {
            best = Some((cost, Ray { k, tau_end }));
        }
    }
    best.map(|(_, r)| r)
}

/// Ray integral for x (any sign handled by the caller); returns the
/// derivatives and the ray that was used.
pub(crate) fn integrate(alpha: f64, beta: f64, x: f64, hint: Option<i32>) -> Result<(DensityDerivs, Ray)> {
    let ray = choose_ray(alpha, beta, x, hint)
        .or_else(|| hint.and_then(|_| choose_ray(alpha, beta, x, None)))
        .ok_or_else(|| Error::numerical(format!("no admissible inversion path at x={x}"), f64::NAN))?;
    integrate_on(alpha, beta, x, ray)
}

fn integrate_on(alpha: f64, beta: f64, x: f64, ray: Ray) -> Result<(DensityDerivs, Ray)> {
    let omega = ray.omega();
    let rot = Complex64::from_polar(1.0, omega);
    let t0 = U_FLOOR.ln();
    let t1 = ray.tau_end;
    let mut breaks: Vec<f64> = vec![-24.0, -12.0, -6.0, -3.0];
    let mut b = -1.5;
    while b < t1 {
        breaks.push(b);
        b += 1.0;
    }
    let ax = 1.0 + x.abs();
    let weights = [1.0, ax / 3.0, ax * ax / 10.0];
    let res = adaptive_gk(
        |tau| {
            let (phi, s) = exponent(alpha, beta, x, omega, tau);
            let term = rot * tau.exp() * phi.exp();
            let mis = Complex64::new(0.0, -1.0) * s;
            [term.re, (mis * term).re, (mis * mis * term).re]
        },
        t0,
        t1,
        &breaks,
        weights,
        TOL_ABS / (ax * ax),
        TOL_REL,
        MAX_PANELS,
    );
    // ∫₀^{u0} e^{iω}exp(Φ) du ≈ e^{iω}u0(1 − ix·e^{iω}u0/2)
    let head = rot * U_FLOOR * (Complex64::new(1.0, 0.0) - Complex64::new(0.0, x) * rot * (U_FLOOR / 2.0));
    let f = (res.value[0] + head.re) / PI;
    let d = DensityDerivs {
        f,
        d1: res.value[1] / PI,
        d2: res.value[2] / PI,
    };
    let rel = res.error / PI / f.abs();
    if !(f > 0.0) || !(rel < 1e-7) {
        return Err(Error::numerical(
            format!("density inversion did not converge at x={x} (α={alpha}, β={beta})"),
            rel,
        ));
    }
    Ok((d, ray))
}

fn gaussian(x: f64) -> DensityDerivs {
    let f = (-0.25 * x * x).exp() / (2.0 * PI.sqrt());
    DensityDerivs {
        f,
        d1: -0.5 * x * f,
        d2: (0.25 * x * x - 0.5) * f,
    }
}

/// Tail switch: the expansion is used where its own error estimate is below
/// this level.
pub(crate) const SERIES_REL_TOL: f64 = 1e-12;

/// f, f′, f″ of the standardized law (α, β, 1, 0) at x.
pub fn pdf_derivs_std(alpha: f64, beta: f64, x: f64) -> Result<DensityDerivs> {
    if !(alpha > 0.0 && alpha <= 2.0 && beta.abs() <= 1.0) {
        return Err(Error::domain(format!("invalid standardized law (α={alpha}, β={beta})")));
    }
    if !x.is_finite() {
        return Err(Error::domain("non-finite argument"));
    }
    if alpha == 2.0 {
        return Ok(gaussian(x));
    }
    let (xr, br, sign) = if x < 0.0 { (-x, -beta, -1.0) } else { (x, beta, 1.0) };
    let (d, _) = right_half(alpha, br, xr, None)?;
    Ok(DensityDerivs { f: d.f, d1: sign * d.d1, d2: d.d2 })
}

/// Evaluation at x ≥ 0 for α < 2. `hint` is the ray index used at a nearby
/// abscissa; the returned index (if any) can be passed on to the next call.
pub(crate) fn right_half(alpha: f64, beta: f64, x: f64, hint: Option<i32>) -> Result<(DensityDerivs, Option<i32>)> {
    if x > 10.0 {
        let tail = TailSeries::new(alpha, beta);
        if let Some((v, err)) = tail.eval(x) {
            if err < SERIES_REL_TOL {
                return Ok((DensityDerivs { f: v[0], d1: v[1], d2: v[2] }, hint));
            }
        }
    }
    let (d, ray) = integrate(alpha, beta, x, hint)?;
    Ok((d, Some(ray.k)))
}

pub(crate) fn log_pdf_std(alpha: f64, beta: f64, x: f64) -> Result<f64> {
    pdf_derivs_std(alpha, beta, x).map(|d| d.f.ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cauchy(x: f64) -> f64 {
        1.0 / (PI * (1.0 + x * x))
    }

    #[test]
    fn cauchy_closed_form() {
        for &x in &[0.0, 0.3, 1.0, 2.5, 7.0, 19.0, 150.0, 1e4, -3.0] {
            let d = pdf_derivs_std(1.0, 0.0, x).unwrap();
            assert!((d.f / cauchy(x) - 1.0).abs() < 1e-10, "x={x} f={} want {}", d.f, cauchy(x));
            let d1 = -2.0 * x / (PI * (1.0 + x * x).powi(2));
            assert!((d.d1 - d1).abs() < 1e-9 * d1.abs().max(d.f), "x={x}");
        }
    }

    #[test]
    fn gaussian_case() {
        let d = pdf_derivs_std(2.0, 0.0, 0.0).unwrap();
        assert!((d.f - 1.0 / (2.0 * PI.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn near_gaussian_matches_ray_path() {
        let d = pdf_derivs_std(1.999, 0.0, 0.5).unwrap();
        let g = gaussian(0.5);
        assert!((d.f - g.f).abs() < 1e-3);
    }

    #[test]
    fn levy_closed_form_in_s1_shift() {
        // α = 1/2, β = 1 is the Lévy law: S1 density sqrt(1/(2π)) y^{-3/2} e^{-1/(2y)}
        // at y = x − ζ with ζ = −tan(π/4) = −1. Boundary β is allowed here as an
        // oracle only.
        for &x in &[-0.5, 0.0, 1.0, 4.0] {
            let y: f64 = x + 1.0;
            let want = (1.0 / (2.0 * PI)).sqrt() * y.powf(-1.5) * (-0.5 / y).exp();
            let d = pdf_derivs_std(0.5, 1.0, x).unwrap();
            assert!((d.f / want - 1.0).abs() < 1e-8, "x={x} got {} want {want}", d.f);
        }
    }

    #[test]
    fn symmetric_and_mirror() {
        let a = pdf_derivs_std(1.3, 0.4, 2.2).unwrap();
        let b = pdf_derivs_std(1.3, -0.4, -2.2).unwrap();
        assert_eq!(a.f, b.f);
        assert_eq!(a.d1, -b.d1);
    }

    #[test]
    fn series_and_integral_agree_in_overlap() {
        for &(a, b) in &[(1.5, 0.0), (0.8, 0.5), (1.2, -0.5), (0.6, 0.3)] {
            let ts = TailSeries::new(a, b);
            for &x in &[30.0, 80.0, 300.0] {
                if let Some((v, err)) = ts.eval(x) {
                    if err < 1e-10 {
                        let (d, _) = integrate(a, b, x, None).unwrap();
                        assert!((d.f / v[0] - 1.0).abs() < 1e-8, "α={a} β={b} x={x}: {} vs {}", d.f, v[0]);
                    }
                }
            }
        }
    }
}
