//! Autoregressive polynomials in factored form.
//!
//! θ = (θ₁..θ_r, θ_{r+1}..θ_{r+s}) splits φ(z) into a causal factor
//! θ†(z) = 1 − θ₁z − … − θ_r z^r (roots outside the unit circle) and a
//! purely noncausal factor θ*(z) = 1 − θ_{r+1}z − … − θ_{r+s}z^s (roots inside).

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::Rng;

use crate::poly;
use crate::stable::{self, StableParams};
use crate::{Error, Real, Result};

/// Required distance of every root modulus from 1.
pub const ROOT_MARGIN: f64 = 1e-6;
/// Target ℓ¹ remainder for automatically truncated Laurent expansions.
pub const LAURENT_TOL: f64 = 1e-10;
pub const LAURENT_MAX_ORDER: usize = 10_000;

/// Outcome of checking a factorization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RootCheck {
    Valid,
    /// A causal root has modulus ≤ 1 + margin; carries the smallest modulus.
    CausalRootViolation { modulus: f64 },
    /// A noncausal root has modulus ≥ 1 − margin; carries the largest modulus.
    NoncausalRootViolation { modulus: f64 },
    /// s > 0 but θ_p = 0.
    DegenerateTopCoefficient,
}

impl RootCheck {
    pub fn is_valid(&self) -> bool {
        matches!(self, RootCheck::Valid)
    }

    /// Distance into the infeasible region (0 when valid).
    pub fn violation(&self) -> f64 {
        match *self {
            RootCheck::Valid => 0.0,
            RootCheck::CausalRootViolation { modulus } => 1.0 + ROOT_MARGIN - modulus,
            RootCheck::NoncausalRootViolation { modulus } => modulus - 1.0 + ROOT_MARGIN,
            RootCheck::DegenerateTopCoefficient => 1.0,
        }
    }
}

fn causal_coeffs<T: Real>(theta: &[T], r: usize) -> Vec<T> {
    std::iter::once(T::one()).chain(theta[..r].iter().map(|&t| -t)).collect()
}

fn noncausal_coeffs<T: Real>(theta: &[T], r: usize) -> Vec<T> {
    std::iter::once(T::one()).chain(theta[r..].iter().map(|&t| -t)).collect()
}

fn moduli<T: Real>(c: &[T]) -> Result<Vec<f64>> {
    Ok(poly::roots(c)?
        .into_iter()
        .map(|z: Complex<T>| z.norm().to_f64().unwrap_or(f64::NAN))
        .collect())
}

/// Classifies θ split as (r, s). Root-finding failures count as violations.
pub fn validate_factored<T: Real>(theta: &[T], r: usize, s: usize) -> RootCheck {
    if theta.len() != r + s || theta.iter().any(|t| !t.is_finite()) {
        return RootCheck::DegenerateTopCoefficient;
    }
    if s > 0 && theta[r + s - 1] == T::zero() {
        return RootCheck::DegenerateTopCoefficient;
    }
    if r > 0 {
        match moduli(&causal_coeffs(theta, r)) {
            Ok(m) => {
                let lo = m.iter().copied().fold(f64::INFINITY, f64::min);
                if !(lo > 1.0 + ROOT_MARGIN) {
                    return RootCheck::CausalRootViolation { modulus: if lo.is_nan() { 0.0 } else { lo } };
                }
            }
            Err(_) => return RootCheck::CausalRootViolation { modulus: 0.0 },
        }
    }
    if s > 0 {
        match moduli(&noncausal_coeffs(theta, r)) {
            Ok(m) => {
                let hi = m.iter().copied().fold(0.0, f64::max);
                if !(hi < 1.0 - ROOT_MARGIN) || m.iter().any(|v| v.is_nan()) {
                    return RootCheck::NoncausalRootViolation { modulus: hi.max(1.0) };
                }
            }
            Err(_) => return RootCheck::NoncausalRootViolation { modulus: 2.0 },
        }
    }
    RootCheck::Valid
}

/// φ(z) = 1 − φ₁z − … − φ_p z^p.
#[derive(Debug, Clone, PartialEq)]
pub struct ArPolynomial<T: Real> {
    phi: Vec<T>,
}

impl<T: Real> ArPolynomial<T> {
    /// Rejects polynomials with a root within the margin of the unit circle.
    pub fn new(phi: Vec<T>) -> Result<Self> {
        let c: Vec<T> = std::iter::once(T::one()).chain(phi.iter().map(|&v| -v)).collect();
        if moduli(&c)?.iter().any(|m| (m - 1.0).abs() <= ROOT_MARGIN) {
            return Err(Error::domain("AR polynomial has a root on the unit circle"));
        }
        Ok(ArPolynomial { phi })
    }

    pub fn phi(&self) -> &[T] {
        &self.phi
    }

    pub fn order(&self) -> usize {
        self.phi.len()
    }

    /// Number of roots inside the unit circle, i.e. the noncausal order.
    pub fn noncausal_order(&self) -> Result<usize> {
        let c: Vec<T> = std::iter::once(T::one()).chain(self.phi.iter().map(|&v| -v)).collect();
        Ok(moduli(&c)?.iter().filter(|&&m| m < 1.0).count())
    }
}

/// Two-sided expansions of 1/θ†, 1/θ* and 1/φ truncated at order K.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentCoeffs<T: Real> {
    /// π_j, j = 0..=K.
    pub pi: Vec<T>,
    /// χ_j, j = 0..=K (zero below s).
    pub chi: Vec<T>,
    /// ψ_j for j = −K..=K stored at index j + K.
    pub psi: Vec<T>,
    pub order: usize,
    /// ℓ¹ mass of the neglected π and χ terms (estimated).
    pub remainder: T,
    /// Set when the remainder exceeds the target tolerance.
    pub truncated: bool,
}

impl<T: Real> LaurentCoeffs<T> {
    pub fn psi_at(&self, j: isize) -> T {
        let k = self.order as isize;
        if j.abs() > k {
            T::zero()
        } else {
            self.psi[(j + k) as usize]
        }
    }
}

/// c_j(u) for j = −K..=K stored at index j + K.
#[derive(Debug, Clone, PartialEq)]
pub struct CjCoeffs<T: Real> {
    pub u: Vec<T>,
    pub c: Vec<T>,
    pub order: usize,
}

impl<T: Real> CjCoeffs<T> {
    pub fn at(&self, j: isize) -> T {
        let k = self.order as isize;
        if j.abs() > k {
            T::zero()
        } else {
            self.c[(j + k) as usize]
        }
    }
}

/// θ with its (r, s) split; always satisfies the root conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct FactoredArParams<T: Real> {
    theta: Vec<T>,
    r: usize,
    s: usize,
}

impl<T: Real> FactoredArParams<T> {
    pub fn new(theta: Vec<T>, r: usize, s: usize) -> Result<Self> {
        if theta.len() != r + s {
            return Err(Error::domain(format!("θ has {} entries but r + s = {}", theta.len(), r + s)));
        }
        match validate_factored(&theta, r, s) {
            RootCheck::Valid => Ok(FactoredArParams { theta, r, s }),
            other => Err(Error::domain(format!("invalid factorization: {other:?}"))),
        }
    }

    /// Order p with s noncausal coefficients.
    pub fn with_s(theta: Vec<T>, s: usize) -> Result<Self> {
        let p = theta.len();
        if s > p {
            return Err(Error::domain(format!("s = {s} exceeds p = {p}")));
        }
        Self::new(theta, p - s, s)
    }

    pub fn theta(&self) -> &[T] {
        &self.theta
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn p(&self) -> usize {
        self.r + self.s
    }

    /// Coefficients of θ†(z)·θ*(z) in ascending powers (constant term 1).
    fn filter(&self) -> Vec<T> {
        poly::mul(&causal_coeffs(&self.theta, self.r), &noncausal_coeffs(&self.theta, self.r))
    }

    /// φ = g(θ, s) by the convolution formula with θ₀ = −1.
    pub fn g_map(&self) -> ArPolynomial<T> {
        let p = self.p();
        let r = self.r as isize;
        let th = |k: isize| -> T {
            if k == 0 {
                -T::one()
            } else if k >= 1 && k as usize <= p {
                self.theta[k as usize - 1]
            } else {
                T::zero()
            }
        };
        let phi = (1..=p as isize)
            .map(|j| {
                if j <= r {
                    th(j) - (1..=j).map(|k| th(j - k) * th(r + k)).sum::<T>()
                } else {
                    -(j - r..=j).map(|k| th(j - k) * th(r + k)).sum::<T>()
                }
            })
            .collect();
        ArPolynomial { phi }
    }

    /// Σ(θ) = ∂g/∂θ. φ_j is −(coefficient j of θ†θ*), so ∂φ_j/∂θ_i is the
    /// coefficient of the other factor at the complementary lag.
    pub fn sigma_jacobian(&self) -> DMatrix<T> {
        let p = self.p();
        let a = causal_coeffs(&self.theta, self.r);
        let b = noncausal_coeffs(&self.theta, self.r);
        DMatrix::from_fn(p, p, |row, col| {
            let j = row + 1;
            let (other, lag) = if col < self.r { (&b, col + 1) } else { (&a, col + 1 - self.r) };
            if j >= lag && j - lag < other.len() {
                other[j - lag]
            } else {
                T::zero()
            }
        })
    }

    /// Z_t = θ†(B)θ*(B)X_t for t = p+1..n (n − p values).
    pub fn residuals(&self, x: &[T]) -> Result<Vec<T>> {
        let p = self.p();
        if x.len() <= p {
            return Err(Error::Input(format!("series of length {} too short for order {p}", x.len())));
        }
        let c = self.filter();
        Ok((p..x.len())
            .map(|t| c.iter().enumerate().map(|(k, &ck)| ck * x[t - k]).sum())
            .collect())
    }

    /// Inverts the filter on a noise path: forward recursion through
    /// 1/θ†(B), then backward recursion through 1/θ*(B) solving for the most
    /// lagged value, with zeros outside the horizon.
    pub fn filter_noise(&self, z: &[T]) -> Vec<T> {
        let n = z.len();
        let (r, s) = (self.r, self.s);
        let th = &self.theta;
        let mut y = z.to_vec();
        for t in 0..n {
            for k in 1..=r.min(t) {
                let v = th[k - 1] * y[t - k];
                y[t] += v;
            }
        }
        if s == 0 {
            return y;
        }
        let top = th[r + s - 1];
        let mut x = vec![T::zero(); n];
        for t in (s..n).rev() {
            let mut v = x[t] - y[t];
            for k in 1..s {
                v -= th[r + k - 1] * x[t - k];
            }
            x[t - s] = v / top;
        }
        x
    }

    fn laurent_at(&self, k: usize) -> Result<(Vec<T>, Vec<T>, T)> {
        let (r, s, p) = (self.r, self.s, self.p());
        let ext = 4 * k + 1;
        let pi = poly::series_inverse(&causal_coeffs(&self.theta, r), ext)?;
        let mut chi = vec![T::zero(); ext + s];
        if s == 0 {
            chi[0] = T::one();
        } else {
            // 1/θ*(z) = w^s/q(w), w = 1/z, q(w) = −θ_p − θ_{p−1}w − … + w^s
            let mut q: Vec<T> = (0..s).map(|i| -self.theta[p - 1 - i]).collect();
            q.push(T::one());
            let b = poly::series_inverse(&q, ext)?;
            for (m, v) in b.into_iter().enumerate() {
                chi[s + m] = v;
            }
        }
        chi.truncate(ext);
        let rem: T = pi[k + 1..].iter().chain(&chi[k + 1..]).map(|v| v.abs()).sum();
        Ok((pi[..=k].to_vec(), chi[..=k].to_vec(), rem))
    }

    /// Laurent coefficients at order `k`, or the smallest power-of-two
    /// multiple of 16 reaching the remainder target when `None`.
    pub fn laurent(&self, k: Option<usize>) -> Result<LaurentCoeffs<T>> {
        let tol = T::lit(LAURENT_TOL);
        let (k, (pi, chi, rem)) = match k {
            Some(k) => {
                if k < self.p() {
                    return Err(Error::Config(format!("Laurent order {k} below p = {}", self.p())));
                }
                (k, self.laurent_at(k)?)
            }
            None => {
                let mut k = 16.max(self.p());
                loop {
                    let out = self.laurent_at(k)?;
                    if out.2 <= tol || k >= LAURENT_MAX_ORDER {
                        break (k, out);
                    }
                    k = (2 * k).min(LAURENT_MAX_ORDER);
                }
            }
        };
        let ki = k as isize;
        let psi = (-ki..=ki)
            .map(|l| {
                // ψ_l = Σ_{j − m = l} π_j χ_m
                (0..=k)
                    .filter_map(|j| {
                        let m = j as isize - l;
                        (0..=ki).contains(&m).then(|| pi[j] * chi[m as usize])
                    })
                    .sum()
            })
            .collect();
        Ok(LaurentCoeffs { pi, chi, psi, order: k, remainder: rem, truncated: rem > tol })
    }

    /// c_j(u) with u′∂Z_t/∂θ = Σ_j c_j(u) Z_{t−j}.
    pub fn cj(&self, u: &[T], k: Option<usize>) -> Result<CjCoeffs<T>> {
        if u.len() != self.p() {
            return Err(Error::domain(format!("direction has {} entries, expected {}", u.len(), self.p())));
        }
        let l = self.laurent(k)?;
        let k = l.order;
        let ki = k as isize;
        let mut c = vec![T::zero(); 2 * k + 1];
        for i in 1..=self.r {
            for lag in i..=k {
                c[lag + k] -= u[i - 1] * l.pi[lag - i];
            }
        }
        for i in 1..=self.s {
            let ui = u[self.r + i - 1];
            for m in self.s..=k {
                let lag = i as isize - m as isize;
                if lag >= -ki {
                    c[(lag + ki) as usize] -= ui * l.chi[m];
                }
            }
        }
        Ok(CjCoeffs { u: u.to_vec(), c, order: k })
    }
}

impl FactoredArParams<f64> {
    /// Simulates n values: noise of length n + 2·burn + p is drawn from τ,
    /// passed through [`filter_noise`](Self::filter_noise), and the central
    /// stretch is returned.
    pub fn simulate<R: Rng + ?Sized>(&self, tau: &StableParams, n: usize, burn: usize, rng: &mut R) -> Result<Vec<f64>> {
        let z = stable::sample(n + 2 * burn + self.p(), tau, rng)?;
        let x = self.filter_noise(&z);
        Ok(x[burn..burn + n].to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use proptest::prelude::*;

    fn fap(theta: &[f64], r: usize, s: usize) -> FactoredArParams<f64> {
        FactoredArParams::new(theta.to_vec(), r, s).unwrap()
    }

    #[test]
    fn classification() {
        assert_eq!(validate_factored(&[0.5], 1, 0), RootCheck::Valid);
        assert_eq!(validate_factored(&[2.0], 0, 1), RootCheck::Valid);
        assert!(matches!(validate_factored(&[1.0], 1, 0), RootCheck::CausalRootViolation { .. }));
        assert!(matches!(validate_factored(&[0.5], 0, 1), RootCheck::NoncausalRootViolation { .. }));
        assert_eq!(validate_factored(&[0.5, 0.0], 1, 1), RootCheck::DegenerateTopCoefficient);
        assert!(validate_factored::<f64>(&[], 0, 0).is_valid());
        let v = validate_factored(&[1.0 / 0.9], 1, 0);
        assert!((v.violation() - (0.1 + ROOT_MARGIN)).abs() < 1e-12);
    }

    #[test]
    fn g_map_examples() {
        let g = fap(&[0.8, -2.0], 1, 1).g_map();
        assert!((g.phi()[0] + 1.2).abs() < 1e-15 && (g.phi()[1] - 1.6).abs() < 1e-15);
        let g = fap(&[0.7380, -2.8146], 1, 1).g_map();
        assert_eq!(format!("{:.4} {:.4}", g.phi()[0], g.phi()[1]), "-2.0766 2.0772");
        let g = fap(&[0.3, -0.2], 2, 0).g_map();
        assert_eq!(g.phi(), &[0.3, -0.2]);
    }

    #[test]
    fn jacobian_examples() {
        let j = fap(&[0.8, -2.0], 1, 1).sigma_jacobian();
        assert_eq!(j, DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 2.0, -0.8]));
        let j = fap(&[0.3, -0.2], 2, 0).sigma_jacobian();
        assert_eq!(j, DMatrix::identity(2, 2));
    }

    #[test]
    fn residual_examples() {
        let z = fap(&[0.5], 1, 0).residuals(&[1.0, 2.0, 0.5]).unwrap();
        assert_eq!(z, vec![1.5, -0.5]);
        let x = [0.3, -1.0, 2.0, 4.0];
        assert_eq!(fap(&[0.0, 0.0], 2, 0).residuals(&x).unwrap(), vec![2.0, 4.0]);
        assert!(fap(&[0.5], 1, 0).residuals(&[1.0]).is_err());
    }

    #[test]
    fn laurent_examples() {
        let l = fap(&[0.5], 1, 0).laurent(Some(20)).unwrap();
        for j in 0..=20 {
            assert!((l.pi[j] - 0.5f64.powi(j as i32)).abs() < 1e-15);
        }
        let l = fap(&[2.0], 0, 1).laurent(None).unwrap();
        assert!(!l.truncated);
        assert_eq!(l.chi[0], 0.0);
        for j in 1..=30 {
            assert!((l.chi[j] + 2f64.powi(-(j as i32))).abs() < 1e-15);
            assert!((l.psi_at(-(j as isize)) - l.chi[j]).abs() < 1e-15);
        }
        let short = fap(&[0.95], 1, 0).laurent(Some(4)).unwrap();
        assert!(short.truncated && short.remainder > 1.0);
    }

    #[test]
    fn psi_inverts_phi() {
        let f = fap(&[0.6, -0.3, 1.8], 2, 1);
        let l = f.laurent(None).unwrap();
        let c = f.filter();
        // Σ_k c_k ψ_{j−k} = δ_j
        for j in -10isize..=10 {
            let v: f64 = c.iter().enumerate().map(|(k, ck)| ck * l.psi_at(j - k as isize)).sum();
            let want = if j == 0 { 1.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-10, "j={j} v={v}");
        }
    }

    #[test]
    fn cj_identities() {
        let f = fap(&[0.5, 0.3, -0.5, 5.0], 2, 2);
        let u = [0.4, -1.1, 0.7, 2.0];
        let c = f.cj(&u, None).unwrap();
        assert!((c.at(0) - u[3] / 5.0).abs() < 1e-14);
        assert!((c.at(1) - (-u[0])).abs() < 1e-14);
        let l = f.laurent(None).unwrap();
        let want = -(u[2] * l.chi[2] + u[3] * l.chi[3]);
        assert!((c.at(-1) - want).abs() < 1e-14);
        let z = f.cj(&[0.0; 4], None).unwrap();
        assert!(z.c.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn cj_geometric_decay() {
        let f = fap(&[0.5, 2.0], 1, 1);
        let c = f.cj(&[1.0, -0.5], None).unwrap();
        // both factors decay at rate 1/2
        for j in 2..40isize {
            assert!(c.at(j).abs() <= 4.0 * 0.5f64.powi(j as i32) + 1e-15);
            assert!(c.at(-j).abs() <= 4.0 * 0.5f64.powi(j as i32) + 1e-15);
        }
    }

    #[test]
    fn impulse_response_noncausal() {
        let f = fap(&[2.0], 0, 1);
        let n = 200;
        let tt = 150;
        let mut z = vec![0.0; n];
        z[tt] = 1.0;
        let x = f.filter_noise(&z);
        for t in 0..n {
            let want = if t < tt { -2f64.powi(-((tt - t) as i32)) } else { 0.0 };
            assert!((x[t] - want).abs() < 1e-10);
        }
    }

    #[test]
    fn causal_recursion_identity() {
        let f = fap(&[0.5], 1, 0);
        let tau = StableParams::new(1.5, 0.0, 1.0, 0.0).unwrap();
        let x = f.simulate(&tau, 300, 100, &mut stream(1)).unwrap();
        let z = f.residuals(&x).unwrap();
        for t in 1..300 {
            assert!((x[t] - 0.5 * x[t - 1] - z[t - 1]).abs() < 1e-10);
        }
    }

    #[test]
    fn simulation_roundtrip() {
        for (theta, r, s) in [(vec![0.5], 1, 0), (vec![2.0], 0, 1), (vec![0.8, -2.0], 1, 1)] {
            let f = fap(&theta, r, s);
            for tau in [StableParams::new(0.8, 0.0, 1.0, 0.0).unwrap(), StableParams::new(1.5, 0.5, 1.0, 0.0).unwrap()] {
                let n = 500;
                let burn = 500;
                let z = stable::sample(n + 2 * burn + f.p(), &tau, &mut stream(4)).unwrap();
                let x = f.filter_noise(&z);
                let rec = f.residuals(&x).unwrap();
                let err = (burn..burn + n).map(|t| (rec[t - f.p()] - z[t]).abs()).fold(0.0, f64::max);
                let scale = z.iter().map(|v| v.abs()).fold(0.0, f64::max);
                assert!(err <= 1e-8 * scale.max(1.0), "{theta:?}: {err}");
            }
        }
    }

    fn valid_theta() -> impl Strategy<Value = (Vec<f64>, usize, usize)> {
        (0usize..=3, 0usize..=3)
            .prop_flat_map(|(r, s)| {
                (
                    proptest::collection::vec(1.2f64..4.0, r),
                    proptest::collection::vec(0.1f64..0.85, s),
                    proptest::collection::vec(prop::bool::ANY, r + s),
                )
            })
            .prop_map(|(cr, nr, sg)| {
                // real roots with random signs
                let mut a = vec![1.0];
                for (i, m) in cr.iter().enumerate() {
                    a = poly::mul(&a, &[1.0, if sg[i] { 1.0 } else { -1.0 } / m]);
                }
                let mut b = vec![1.0];
                for (i, m) in nr.iter().enumerate() {
                    b = poly::mul(&b, &[1.0, if sg[cr.len() + i] { 1.0 } else { -1.0 } / m]);
                }
                let theta: Vec<f64> = a[1..].iter().chain(&b[1..]).map(|v| -v).collect();
                (theta, cr.len(), nr.len())
            })
    }

    proptest! {
        #[test]
        fn g_map_is_polynomial_product((theta, r, s) in valid_theta()) {
            let f = FactoredArParams::new(theta, r, s).unwrap();
            let prod = f.filter();
            let g = f.g_map();
            for (j, v) in g.phi().iter().enumerate() {
                prop_assert!((v + prod[j + 1]).abs() < 1e-12);
            }
        }

        #[test]
        fn jacobian_matches_differences((theta, r, s) in valid_theta()) {
            prop_assume!(!theta.is_empty());
            let f = FactoredArParams::new(theta.clone(), r, s).unwrap();
            let jac = f.sigma_jacobian();
            let h = 1e-6;
            for i in 0..theta.len() {
                let mut tp = theta.clone();
                let mut tm = theta.clone();
                tp[i] += h;
                tm[i] -= h;
                let gp = FactoredArParams { theta: tp, r, s }.g_map();
                let gm = FactoredArParams { theta: tm, r, s }.g_map();
                for j in 0..theta.len() {
                    let d = (gp.phi()[j] - gm.phi()[j]) / (2.0 * h);
                    prop_assert!((d - jac[(j, i)]).abs() < 1e-7);
                }
            }
        }

        #[test]
        fn residuals_depend_only_on_product(x in proptest::collection::vec(-5.0f64..5.0, 8..20)) {
            // (1 − 0.5z)(1 − 0.25z) split as r=2,s=0 versus the expanded form
            let a = FactoredArParams::new(vec![0.75, -0.125], 2, 0).unwrap();
            let g = FactoredArParams::new(vec![0.5, 0.25], 1, 1);
            prop_assert!(g.is_err());
            let b = FactoredArParams::new(a.g_map().phi().to_vec(), 2, 0).unwrap();
            let za = a.residuals(&x).unwrap();
            let zb = b.residuals(&x).unwrap();
            for (u, v) in za.iter().zip(&zb) {
                prop_assert!((u - v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_precision_filter() {
        let f = FactoredArParams::<f32>::new(vec![0.5], 1, 0).unwrap();
        assert_eq!(f.residuals(&[1.0, 2.0, 0.5]).unwrap(), vec![1.5, -0.5]);
    }
}
