//! α-stable laws in the continuous (S0-type) parameterization
//!
//! `E exp(isZ) = exp{−σ^α|s|^α[1 + iβ sign(s) tan(πα/2)((σ|s|)^{1−α} − 1)] + iμs}`
//!
//! with the α = 1 member obtained as the continuous limit. Densities are
//! obtained by Fourier inversion along a rotated ray in the complex plane
//! ([`density`]); [`DensityTable`] caches the standardized log-density for one
//! (α, β) so that a likelihood over many residuals costs one table build plus
//! O(n) interpolations.

mod density;
mod fisher;
mod sample;
mod table;
mod tail;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use density::{pdf_derivs_std, DensityDerivs};
pub use fisher::{fisher_info, score_tau};
pub use sample::{sample, sample_std};
pub use table::{DensityTable, DEFAULT_RESOLUTION};
pub use tail::TailSeries;

/// Noise law τ = (α, β, σ, μ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
    pub mu: f64,
}

impl StableParams {
    pub fn new(alpha: f64, beta: f64, sigma: f64, mu: f64) -> Result<Self> {
        let p = StableParams { alpha, beta, sigma, mu };
        p.validate()?;
        Ok(p)
    }

    /// Standardized law (α, β, 1, 0).
    pub fn standard(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(alpha, beta, 1.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.alpha > 0.0
            && self.alpha <= 2.0
            && (-1.0..=1.0).contains(&self.beta)
            && self.sigma > 0.0
            && self.sigma.is_finite()
            && self.mu.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "invalid stable parameters (α={}, β={}, σ={}, μ={})",
                self.alpha, self.beta, self.sigma, self.mu
            )))
        }
    }

    /// Open interior α ∈ (0, 2), |β| < 1 required by the estimators.
    pub fn is_interior(&self) -> bool {
        self.validate().is_ok() && self.alpha < 2.0 && self.beta.abs() < 1.0
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.alpha, self.beta, self.sigma, self.mu]
    }

    pub fn from_array(a: [f64; 4]) -> Result<Self> {
        Self::new(a[0], a[1], a[2], a[3])
    }
}

/// tan(πα/2)·(s − s^α) for complex `s` in the right half plane, given
/// `ln s`. Continuous through α = 1, where it tends to (2/π)·s·ln s.
pub(crate) fn skew_term(alpha: f64, s: Complex64, ln_s: Complex64) -> Complex64 {
    let delta = alpha - 1.0;
    if delta.abs() < 1e-4 {
        // δ·cot(πδ/2) and expm1(δ ln s)/δ, both regular at δ = 0
        let h = 0.5 * PI * delta;
        let h2 = h * h;
        let dcot = (2.0 / PI) * (1.0 - h2 / 3.0 - h2 * h2 / 45.0);
        let z = ln_s * delta;
        let e = if z.norm() < 0.1 {
            let mut term = Complex64::new(1.0, 0.0);
            let mut acc = term;
            for k in 2..=10 {
                term *= z / k as f64;
                acc += term;
            }
            ln_s * acc
        } else {
            (z.exp() - 1.0) / delta
        };
        s * dcot * e
    } else if delta == 1.0 {
        Complex64::new(0.0, 0.0)
    } else {
        let t = (0.5 * PI * alpha).tan();
        (s - (ln_s * alpha).exp()) * t
    }
}

/// Log characteristic function of the standardized law at complex `s`
/// (principal branch, Re s > 0).
pub(crate) fn log_cf_std(alpha: f64, beta: f64, s: Complex64, ln_s: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    -(ln_s * alpha).exp() - i * beta * skew_term(alpha, s, ln_s)
}

/// Characteristic function E exp(isZ).
pub fn char_fn(s: f64, tau: &StableParams) -> Result<Complex64> {
    tau.validate()?;
    if !s.is_finite() {
        return Err(Error::domain("non-finite frequency"));
    }
    if s == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let v = tau.sigma * s.abs();
    let sv = Complex64::new(v, 0.0);
    let mut psi = log_cf_std(tau.alpha, tau.beta, sv, Complex64::new(v.ln(), 0.0));
    if s < 0.0 {
        psi = psi.conj();
    }
    Ok((psi + Complex64::new(0.0, tau.mu * s)).exp())
}

/// Tail constant c̃(α) = (∫₀^∞ t^{−α} sin t dt)^{−1} = (2/π)·Γ(α)·sin(πα/2).
pub fn tilde_c(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::domain(format!("tilde_c requires α in (0,2), got {alpha}")));
    }
    Ok(2.0 / PI * statrs::function::gamma::gamma(alpha) * (0.5 * PI * alpha).sin())
}

fn check_z(z: f64) -> Result<()> {
    if z.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("non-finite argument"))
    }
}

/// Natural log of the density at `z`.
///
/// With a table the standardized value is interpolated; the table must
/// belong to the same (α, β). Without one the inversion integral is evaluated
/// directly.
pub fn log_pdf(z: f64, tau: &StableParams, table: Option<&DensityTable>) -> Result<f64> {
    tau.validate()?;
    check_z(z)?;
    let x = (z - tau.mu) / tau.sigma;
    let lf = match table {
        Some(t) => {
            t.check_params(tau)?;
            t.log_pdf_std(x)
        }
        None => density::log_pdf_std(tau.alpha, tau.beta, x)?,
    };
    Ok(lf - tau.sigma.ln())
}

pub fn pdf(z: f64, tau: &StableParams, table: Option<&DensityTable>) -> Result<f64> {
    log_pdf(z, tau, table).map(f64::exp)
}

/// Distribution function; builds a table when none is supplied.
pub fn cdf(z: f64, tau: &StableParams, table: Option<&DensityTable>) -> Result<f64> {
    tau.validate()?;
    check_z(z)?;
    let owned;
    let t = match table {
        Some(t) => {
            t.check_params(tau)?;
            t
        }
        None => {
            owned = DensityTable::build(tau.alpha, tau.beta, DEFAULT_RESOLUTION)?;
            &owned
        }
    };
    Ok(t.cdf_std((z - tau.mu) / tau.sigma))
}

/// Quantile function by safeguarded root finding on the CDF.
pub fn quantile(q: f64, tau: &StableParams, table: Option<&DensityTable>) -> Result<f64> {
    tau.validate()?;
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::domain(format!("quantile level must lie in (0,1), got {q}")));
    }
    let owned;
    let t = match table {
        Some(t) => {
            t.check_params(tau)?;
            t
        }
        None => {
            owned = DensityTable::build(tau.alpha, tau.beta, DEFAULT_RESOLUTION)?;
            &owned
        }
    };
    Ok(tau.mu + tau.sigma * t.quantile_std(q)?)
}
