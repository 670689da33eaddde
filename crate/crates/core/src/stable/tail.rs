//! Power-law tail expansion of the standardized density.
//!
//! For y = x − ζ → ∞ with ζ = −β·tan(πα/2) and α ≠ 1,
//!
//! f(x) ~ (1/π) Σ_k (−1)^{k+1} A^k Γ(kα+1)/k! · sin(k(κ + πα/2)) · y^{−kα−1},
//!
//! A = (1 + β²tan²(πα/2))^{1/2}, κ = arctan(β·tan(πα/2)). The series converges
//! for α < 1 and is asymptotic for α > 1; its first term is the tail law
//! α·c̃(α)·(1+β)/2·x^{−α−1}. The left tail uses the mirrored law (α, −β).

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

const MAX_TERMS: usize = 24;

/// Right-tail expansion for one (α, β).
#[derive(Debug, Clone)]
pub struct TailSeries {
    alpha: f64,
    zeta: f64,
    /// Signed coefficients c_k of y^{−kα−1}, already divided by π.
    coef: Vec<f64>,
    /// |c_k| without the oscillating sine factor, for error control.
    envelope: Vec<f64>,
    /// Leading coefficient α·c̃(α)·(1+β)/2 (used when no series exists).
    leading: f64,
}

impl TailSeries {
    pub fn new(alpha: f64, beta: f64) -> Self {
        let leading = alpha * super::tilde_c(alpha.min(2.0 - 1e-15)).unwrap_or(0.0) * (1.0 + beta) / 2.0;
        if (alpha - 1.0).abs() < 1e-3 || alpha >= 2.0 {
            return TailSeries { alpha, zeta: 0.0, coef: Vec::new(), envelope: Vec::new(), leading };
        }
        let t = (0.5 * PI * alpha).tan();
        let bt = beta * t;
        let ln_a = 0.5 * (1.0 + bt * bt).ln();
        let kappa = bt.atan();
        let envelope: Vec<f64> = (1..=MAX_TERMS)
            .map(|k| {
                let kf = k as f64;
                (kf * ln_a + ln_gamma(kf * alpha + 1.0) - ln_gamma(kf + 1.0)).exp() / PI
            })
            .collect();
        let coef = envelope
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let kf = (i + 1) as f64;
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                sign * m * (kf * (kappa + 0.5 * PI * alpha)).sin()
            })
            .collect();
        TailSeries { alpha, zeta: -bt, coef, envelope, leading }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn leading(&self) -> f64 {
        self.leading
    }

    /// Density and first two derivatives at `x` with a relative error
    /// estimate, or `None` when the expansion is not usable there.
    pub fn eval(&self, x: f64) -> Option<([f64; 3], f64)> {
        if self.coef.is_empty() {
            return None;
        }
        let y = x - self.zeta;
        if y <= 1.0 {
            return None;
        }
        let ly = y.ln();
        let n = self.terms_at(ly)?;
        let mut acc = [0.0; 3];
        for (i, c) in self.coef[..n].iter().enumerate() {
            let k = (i + 1) as f64;
            let e = -k * self.alpha - 1.0;
            let term = c * (e * ly).exp();
            acc[0] += term;
            acc[1] += term * e / y;
            acc[2] += term * e * (e - 1.0) / (y * y);
        }
        if !(acc[0] > 0.0) {
            return None;
        }
        let k = (n + 1) as f64;
        let next = self.envelope.get(n).map_or(f64::INFINITY, |m| m * ((-k * self.alpha - 1.0) * ly).exp());
        Some((acc, next / acc[0]))
    }

    /// Number of terms to keep at log-distance `ly`: up to the smallest
    /// envelope term, or all of them when the envelope keeps shrinking.
    fn terms_at(&self, ly: f64) -> Option<usize> {
        let mut prev = f64::INFINITY;
        for (i, m) in self.envelope.iter().enumerate() {
            let k = (i + 1) as f64;
            let mag = m * (-k * self.alpha * ly).exp();
            if mag >= prev {
                return (i > 1).then_some(i - 1);
            }
            prev = mag;
        }
        Some(self.envelope.len() - 1)
    }

    /// Tail mass P(X > x) from the same expansion.
    pub fn survival(&self, x: f64) -> Option<f64> {
        if self.coef.is_empty() {
            let y = x;
            return (y > 0.0 && self.leading > 0.0).then(|| self.leading * y.powf(-self.alpha) / self.alpha);
        }
        let y = x - self.zeta;
        if y <= 1.0 {
            return None;
        }
        let ly = y.ln();
        let n = self.terms_at(ly)?;
        let acc: f64 = self.coef[..n]
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let k = (i + 1) as f64;
                c * (-k * self.alpha * ly).exp() / (k * self.alpha)
            })
            .sum();
        (acc > 0.0).then_some(acc)
    }

    /// First-order tail law, valid for every α including the continuous
    /// neighbourhood of 1.
    pub fn first_order(&self, x: f64) -> [f64; 3] {
        let e = -self.alpha - 1.0;
        let f = self.leading * x.powf(e);
        [f, f * e / x, f * e * (e - 1.0) / (x * x)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leading_term_dominates_far_out() {
        let s = TailSeries::new(1.5, 0.3);
        let (v, err) = s.eval(1e4).unwrap();
        let first = s.first_order(1e4)[0];
        assert!(err < 1e-8);
        assert!((v[0] / first - 1.0).abs() < 1e-3);
    }

    #[test]
    fn derivatives_consistent() {
        let s = TailSeries::new(0.7, -0.4);
        let x = 50.0;
        let h = 1e-3;
        let (v, _) = s.eval(x).unwrap();
        let (vp, _) = s.eval(x + h).unwrap();
        let (vm, _) = s.eval(x - h).unwrap();
        assert!(((vp[0] - vm[0]) / (2.0 * h) - v[1]).abs() < 1e-6 * v[1].abs());
        assert!(((vp[1] - vm[1]) / (2.0 * h) - v[2]).abs() < 1e-6 * v[2].abs());
    }
}
