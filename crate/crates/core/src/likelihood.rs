//! Conditional log-likelihood and the unconstrained objective searched by
//! the simplex.

use serde::{Deserialize, Serialize};

use crate::ar::{validate_factored, FactoredArParams, RootCheck};
use crate::stable::{DensityTable, StableParams, DEFAULT_RESOLUTION};
use crate::{Error, Result};

/// Lower end of the α search range.
pub const ALPHA_MIN: f64 = 0.2;
/// Bound on |β| during the search.
pub const BETA_MAX: f64 = 0.999;
/// Objective value at infeasible points, before the violation term.
pub const PENALTY: f64 = -1e15;
/// Feasible objective values are floored here so that they always beat the
/// penalty branch.
pub const FEASIBLE_FLOOR: f64 = -1e14;

/// η = (θ₁..θ_p, α, β, σ, μ) with the noncausal order s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamVector {
    pub theta: Vec<f64>,
    pub tau: StableParams,
    pub s: usize,
}

impl ParamVector {
    pub fn new(theta: Vec<f64>, s: usize, tau: StableParams) -> Result<Self> {
        tau.validate()?;
        FactoredArParams::with_s(theta.clone(), s)?;
        Ok(ParamVector { theta, tau, s })
    }

    pub fn p(&self) -> usize {
        self.theta.len()
    }

    pub fn r(&self) -> usize {
        self.p() - self.s
    }

    /// η as a flat vector.
    pub fn eta(&self) -> Vec<f64> {
        let mut v = self.theta.clone();
        v.extend(self.tau.as_array());
        v
    }

    pub fn factored(&self) -> Result<FactoredArParams<f64>> {
        FactoredArParams::with_s(self.theta.clone(), self.s)
    }
}

/// Σ ln f(z; τ) through the standardized table.
pub fn sum_log_density(z: &[f64], tau: &StableParams, table: &DensityTable) -> f64 {
    let inv = 1.0 / tau.sigma;
    let s: f64 = z.iter().map(|&v| table.log_pdf_std((v - tau.mu) * inv)).sum();
    s - z.len() as f64 * tau.sigma.ln()
}

/// L for already validated factors with a matching table.
pub fn loglik_factored(x: &[f64], ar: &FactoredArParams<f64>, tau: &StableParams, table: &DensityTable) -> Result<f64> {
    let z = ar.residuals(x)?;
    let mut l = sum_log_density(&z, tau, table);
    if ar.s() > 0 {
        l += z.len() as f64 * ar.theta()[ar.p() - 1].abs().ln();
    }
    Ok(l)
}

/// Conditional log-likelihood over t = p+1..n. Without a table, one is built
/// at the default resolution.
pub fn cond_loglik(x: &[f64], eta: &ParamVector, table: Option<&DensityTable>) -> Result<f64> {
    eta.tau.validate()?;
    let ar = eta.factored()?;
    if x.len() <= eta.p() {
        return Err(Error::Input(format!("series of length {} too short for order {}", x.len(), eta.p())));
    }
    let owned;
    let table = match table {
        Some(t) => {
            t.check_params(&eta.tau)?;
            t
        }
        None => {
            owned = DensityTable::build(eta.tau.alpha, eta.tau.beta, DEFAULT_RESOLUTION)?;
            &owned
        }
    };
    loglik_factored(x, &ar, &eta.tau, table)
}

fn logistic(v: f64) -> f64 {
    if v >= 0.0 {
        1.0 / (1.0 + (-v).exp())
    } else {
        let e = v.exp();
        e / (1.0 + e)
    }
}

/// Maps raw ∈ ℝ^{p+4} to (θ, [α, β, σ, μ]).
pub fn from_raw(raw: &[f64]) -> (Vec<f64>, [f64; 4]) {
    let p = raw.len() - 4;
    let t = &raw[p..];
    let alpha = ALPHA_MIN + (2.0 - ALPHA_MIN) * logistic(t[0]);
    (raw[..p].to_vec(), [alpha, BETA_MAX * t[1].tanh(), t[2].exp(), t[3]])
}

/// Inverse of [`from_raw`]; α, β and σ must lie strictly inside their ranges.
pub fn to_raw(theta: &[f64], tau: &StableParams) -> Result<Vec<f64>> {
    let q = (tau.alpha - ALPHA_MIN) / (2.0 - ALPHA_MIN);
    if !(q > 0.0 && q < 1.0 && tau.beta.abs() < BETA_MAX && tau.sigma > 0.0) {
        return Err(Error::domain(format!("τ = {:?} outside the search ranges", tau.as_array())));
    }
    let mut raw = theta.to_vec();
    raw.extend([(q / (1.0 - q)).ln(), (tau.beta / BETA_MAX).atanh(), tau.sigma.ln(), tau.mu]);
    Ok(raw)
}

/// Penalized conditional log-likelihood on the raw scale for fixed (p, s).
#[derive(Debug, Clone)]
pub struct Objective<'a> {
    x: &'a [f64],
    p: usize,
    s: usize,
    resolution: f64,
}

impl<'a> Objective<'a> {
    pub fn new(x: &'a [f64], p: usize, s: usize, resolution: f64) -> Result<Self> {
        if s > p {
            return Err(Error::Config(format!("s = {s} exceeds p = {p}")));
        }
        if x.len() <= p {
            return Err(Error::Input(format!("series of length {} too short for order {p}", x.len())));
        }
        Ok(Objective { x, p, s, resolution })
    }

    pub fn dim(&self) -> usize {
        self.p + 4
    }

    /// Penalty for a violated root condition, more negative further out.
    pub fn penalty(check: RootCheck) -> f64 {
        PENALTY * (1.0 + check.violation().clamp(0.0, 1e3))
    }

    pub fn eval(&self, raw: &[f64]) -> f64 {
        if raw.len() != self.dim() || raw.iter().any(|v| !v.is_finite()) {
            return PENALTY * 1001.0;
        }
        let (theta, t) = from_raw(raw);
        let check = validate_factored(&theta, self.p - self.s, self.s);
        if !check.is_valid() {
            return Self::penalty(check);
        }
        let Ok(tau) = StableParams::from_array(t) else {
            return PENALTY;
        };
        let ar = match FactoredArParams::new(theta, self.p - self.s, self.s) {
            Ok(a) => a,
            Err(_) => return PENALTY,
        };
        let l = DensityTable::build(tau.alpha, tau.beta, self.resolution)
            .and_then(|tab| loglik_factored(self.x, &ar, &tau, &tab));
        match l {
            Ok(v) if v.is_finite() => v.max(FEASIBLE_FLOOR),
            Ok(v) if v == f64::INFINITY => PENALTY,
            Ok(_) => FEASIBLE_FLOOR,
            Err(_) => PENALTY,
        }
    }
}

/// [`Objective::eval`] at the default table resolution.
pub fn objective(x: &[f64], raw: &[f64], p: usize, s: usize) -> Result<f64> {
    Ok(Objective::new(x, p, s, DEFAULT_RESOLUTION)?.eval(raw))
}
