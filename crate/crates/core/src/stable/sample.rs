//! Chambers–Mallows–Stuck generator.
//!
//! The classical construction produces the law with log characteristic
//! function −|s|^α(1 − iβ·sign(s)·tan(πα/2)); subtracting β·tan(πα/2) moves
//! it to the continuous parameterization used here. At α = 1 both agree.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;

use super::StableParams;
use crate::Result;

/// Within this distance of α = 1 the α = 1 form is used, avoiding the
/// cancellation between the generator output and the location shift.
const ALPHA_ONE_BAND: f64 = 1e-10;

/// One standardized (α, β, 1, 0) variate.
pub fn sample_std<R: Rng + ?Sized>(alpha: f64, beta: f64, rng: &mut R) -> f64 {
    let v = PI * (rng.random::<f64>() - 0.5);
    let w = -(1.0 - rng.random::<f64>()).ln();
    if alpha == 2.0 {
        // sin(2V)/sqrt(cos V)·(cos V/W)^{-1/2} = 2 sin V·sqrt(W)
        return 2.0 * v.sin() * w.sqrt();
    }
    if (alpha - 1.0).abs() < ALPHA_ONE_BAND {
        let a = FRAC_PI_2 + beta * v;
        return (a * v.tan() - beta * (FRAC_PI_2 * w * v.cos() / a).ln()) / FRAC_PI_2;
    }
    let t = beta * (FRAC_PI_2 * alpha).tan();
    let b = t.atan() / alpha;
    let s = (1.0 + t * t).powf(0.5 / alpha);
    let x1 = s * (alpha * (v + b)).sin() / v.cos().powf(1.0 / alpha)
        * ((v - alpha * (v + b)).cos() / w).powf((1.0 - alpha) / alpha);
    x1 - t
}

/// `n` independent draws from τ.
pub fn sample<R: Rng + ?Sized>(n: usize, tau: &StableParams, rng: &mut R) -> Result<Vec<f64>> {
    tau.validate()?;
    Ok((0..n)
        .map(|_| tau.mu + tau.sigma * sample_std(tau.alpha, tau.beta, rng))
        .collect())
}
