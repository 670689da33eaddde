//! Score of the noise law and its Fisher information.

use std::f64::consts::PI;

use nalgebra::Matrix4;
use statrs::function::gamma::digamma;

use super::density::{log_pdf_std, pdf_derivs_std};
use super::StableParams;
use crate::quad::gauss_legendre;
use crate::{Error, Result};

/// Base steps for the α and β differences (halved once for extrapolation).
const H_ALPHA: f64 = 2e-3;
const H_BETA: f64 = 2e-3;
/// Quadrature range in u = asinh(x); beyond it the first-order tail law is
/// integrated in closed form.
const U_MAX: f64 = 19.11;
const PANEL: f64 = 0.2;
const GL_POINTS: usize = 8;

fn richardson(g: impl Fn(f64) -> Result<f64>, h: f64) -> Result<f64> {
    let d1 = (g(h)? - g(-h)?) / (2.0 * h);
    let d2 = (g(0.5 * h)? - g(-0.5 * h)?) / h;
    Ok((4.0 * d2 - d1) / 3.0)
}

/// Standardized score (∂α, ∂β, ∂σ, ∂μ) at x together with the density.
fn score_std(alpha: f64, beta: f64, x: f64) -> Result<([f64; 4], f64)> {
    let d = pdf_derivs_std(alpha, beta, x)?;
    let g = d.d1 / d.f;
    let sa = richardson(|h| log_pdf_std(alpha + h, beta, x), H_ALPHA)?;
    let sb = richardson(|h| log_pdf_std(alpha, beta + h, x), H_BETA)?;
    Ok(([sa, sb, -1.0 - x * g, -g], d.f))
}

fn check_steps(tau: &StableParams) -> Result<()> {
    if tau.alpha - H_ALPHA <= 0.0 || tau.alpha + H_ALPHA >= 2.0 || tau.beta.abs() + H_BETA >= 1.0 {
        return Err(Error::Boundary(format!(
            "(α={}, β={}) too close to the boundary for centred differences",
            tau.alpha, tau.beta
        )));
    }
    Ok(())
}

/// ∂ ln f(z; τ)/∂(α, β, σ, μ). The σ and μ components are exact given f′;
/// α and β use extrapolated central differences.
pub fn score_tau(z: f64, tau: &StableParams) -> Result<[f64; 4]> {
    tau.validate()?;
    if !z.is_finite() {
        return Err(Error::domain("non-finite argument"));
    }
    check_steps(tau)?;
    let (s, _) = score_std(tau.alpha, tau.beta, (z - tau.mu) / tau.sigma)?;
    Ok([s[0], s[1], s[2] / tau.sigma, s[3] / tau.sigma])
}

/// Tail contribution ∫_X^∞ s sᵀ f dx under f ≈ c·x^{−α−1}, where the
/// score tends to (a − ln x, b, α, 0).
fn tail_block(alpha: f64, c: f64, a: f64, b: f64, x: f64) -> [[f64; 4]; 4] {
    let l = x.ln();
    let p = c * x.powf(-alpha);
    let m0 = p / alpha;
    let m1 = p * (alpha * l + 1.0) / (alpha * alpha);
    let m2 = p * (alpha * alpha * l * l + 2.0 * alpha * l + 2.0) / alpha.powi(3);
    let saa = a * a * m0 - 2.0 * a * m1 + m2;
    let sa1 = a * m0 - m1;
    let mut out = [[0.0; 4]; 4];
    out[0][0] = saa;
    out[0][1] = b * sa1;
    out[0][2] = alpha * sa1;
    out[1][1] = b * b * m0;
    out[1][2] = b * alpha * m0;
    out[2][2] = alpha * alpha * m0;
    for i in 0..4 {
        for j in 0..i {
            out[i][j] = out[j][i];
        }
    }
    out
}

/// Fisher information E[s sᵀ] of one observation, ordered (α, β, σ, μ).
pub fn fisher_info(tau: &StableParams) -> Result<Matrix4<f64>> {
    if !tau.is_interior() {
        return Err(Error::domain("Fisher information requires α in (0,2) and |β| < 1"));
    }
    check_steps(tau)?;
    let (alpha, beta) = (tau.alpha, tau.beta);
    let (nodes, weights) = gauss_legendre(GL_POINTS);
    let mut acc = [[0.0; 4]; 4];
    let panels = (2.0 * U_MAX / PANEL).round() as usize;
    let h = 2.0 * U_MAX / panels as f64;
    for k in 0..panels {
        let mid = -U_MAX + (k as f64 + 0.5) * h;
        for (t, w) in nodes.iter().zip(&weights) {
            let u = mid + 0.5 * h * t;
            let x = u.sinh();
            let (s, f) = score_std(alpha, beta, x)?;
            let wt = w * 0.5 * h * u.cosh() * f;
            for i in 0..4 {
                for j in i..4 {
                    acc[i][j] += wt * s[i] * s[j];
                }
            }
        }
    }
    let tc = super::tilde_c(alpha)?;
    // d/dα ln(α·c̃(α))
    let a = 1.0 / alpha + digamma(alpha) + 0.5 * PI / (0.5 * PI * alpha).tan();
    let x_end = U_MAX.sinh();
    let right = tail_block(alpha, alpha * tc * (1.0 + beta) / 2.0, a, 1.0 / (1.0 + beta), x_end);
    let left = tail_block(alpha, alpha * tc * (1.0 - beta) / 2.0, a, -1.0 / (1.0 - beta), x_end);
    let inv = [1.0, 1.0, 1.0 / tau.sigma, 1.0 / tau.sigma];
    let mut m = Matrix4::zeros();
    for i in 0..4 {
        for j in i..4 {
            // the μ-score vanishes in both tails; the σ-score keeps its sign
            let v = acc[i][j] + right[i][j] + left[i][j];
            m[(i, j)] = v * inv[i] * inv[j];
            m[(j, i)] = m[(i, j)];
        }
    }
    if m.iter().any(|v| !v.is_finite()) || m.cholesky().is_none() {
        return Err(Error::numerical("Fisher information is not positive definite", f64::NAN));
    }
    Ok(m)
}
