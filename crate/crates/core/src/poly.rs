//! Real polynomials in ascending-power coefficient form: products, power
//! series reciprocals and complex roots.

use num_complex::Complex;

use crate::{Error, Real, Result};

/// Coefficients of a(z)·b(z).
pub fn mul<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut c = vec![T::zero(); a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            c[i + j] += ai * bj;
        }
    }
    c
}

/// Horner evaluation at a complex point, with the derivative.
pub fn eval_with_derivative<T: Real>(c: &[T], z: Complex<T>) -> (Complex<T>, Complex<T>) {
    let mut p = Complex::new(T::zero(), T::zero());
    let mut d = p;
    for &ck in c.iter().rev() {
        d = d * z + p;
        p = p * z + Complex::new(ck, T::zero());
    }
    (p, d)
}

/// First `n` coefficients of the power series 1/q(z); requires q(0) ≠ 0.
pub fn series_inverse<T: Real>(q: &[T], n: usize) -> Result<Vec<T>> {
    let q0 = *q.first().ok_or_else(|| Error::domain("empty polynomial"))?;
    if q0 == T::zero() {
        return Err(Error::domain("series reciprocal needs a nonzero constant term"));
    }
    let mut b: Vec<T> = Vec::with_capacity(n);
    for m in 0..n {
        let mut acc = if m == 0 { T::one() } else { T::zero() };
        for k in 1..q.len().min(m + 1) {
            acc -= q[k] * b[m - k];
        }
        b.push(acc / q0);
    }
    Ok(b)
}

fn degree<T: Real>(c: &[T]) -> usize {
    c.iter().rposition(|&x| x != T::zero()).unwrap_or(0)
}

/// All complex roots by the Aberth–Ehrlich iteration. Trailing zero
/// coefficients are dropped, so a vanishing leading term lowers the degree.
pub fn roots<T: Real>(c: &[T]) -> Result<Vec<Complex<T>>> {
    let d = degree(c);
    if c.iter().any(|x| !x.is_finite()) {
        return Err(Error::domain("non-finite polynomial coefficient"));
    }
    if d == 0 {
        return Ok(Vec::new());
    }
    let c = &c[..=d];
    if d == 1 {
        return Ok(vec![Complex::new(-c[0] / c[1], T::zero())]);
    }
    let lead = c[d];
    let monic: Vec<T> = c.iter().map(|&x| x / lead).collect();
    // zero roots split off exactly
    let nz = monic.iter().position(|&x| x != T::zero()).unwrap_or(0);
    let core = &monic[nz..];
    let m = core.len() - 1;
    let mut z: Vec<Complex<T>> = Vec::with_capacity(d);
    if m > 0 {
        let radius = core[0].abs().powf(T::one() / T::from_usize(m).unwrap());
        let tau = T::TAU();
        z = (0..m)
            .map(|k| {
                let ang = tau * T::from_usize(k).unwrap() / T::from_usize(m).unwrap() + T::lit(0.4);
                Complex::from_polar(radius, ang)
            })
            .collect();
        let eps = T::epsilon() * T::lit(4.0);
        let mut converged = false;
        for _ in 0..500 {
            let mut max_step = T::zero();
            for i in 0..m {
                let (p, dp) = eval_with_derivative(core, z[i]);
                if p.norm() == T::zero() {
                    continue;
                }
                let ratio = p / dp;
                let mut sum = Complex::new(T::zero(), T::zero());
                for j in 0..m {
                    if j != i {
                        sum = sum + (z[i] - z[j]).inv();
                    }
                }
                let w = ratio / (Complex::new(T::one(), T::zero()) - ratio * sum);
                if w.re.is_finite() && w.im.is_finite() {
                    z[i] = z[i] - w;
                    max_step = max_step.max(w.norm() / z[i].norm().max(T::min_positive_value()));
                }
            }
            if max_step <= eps {
                converged = true;
                break;
            }
        }
        if !converged {
            // accept slow convergence at multiple roots if the residuals are small
            let scale: T = core.iter().map(|x| x.abs()).sum();
            let bad = z.iter().any(|&zi| {
                let r = zi.norm().max(T::one()).powi(m as i32);
                eval_with_derivative(core, zi).0.norm() > T::lit(1e3) * T::epsilon().sqrt() * scale * r
            });
            if bad {
                return Err(Error::numerical("polynomial root iteration did not converge", f64::NAN));
            }
        }
    }
    z.extend(std::iter::repeat(Complex::new(T::zero(), T::zero())).take(nz));
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn product_and_inverse() {
        assert_eq!(mul(&[1.0, -0.8], &[1.0, 2.0]), vec![1.0, 1.2, -1.6]);
        let b = series_inverse(&[1.0f64, -0.5], 6).unwrap();
        for (j, v) in b.iter().enumerate() {
            assert!((v - 0.5f64.powi(j as i32)).abs() < 1e-15);
        }
        assert!(series_inverse(&[0.0, 1.0], 3).is_err());
    }

    #[test]
    fn known_roots() {
        let mut r = roots(&[1.0f64, 1.2, -1.6]).unwrap();
        r.sort_by(|a: &Complex<f64>, b| a.norm().total_cmp(&b.norm()));
        assert!((r[0].re + 0.5).abs() < 1e-14 && (r[1].re - 1.25).abs() < 1e-14);
        let r = roots(&[1.0f64, 0.0, 1.0]).unwrap();
        assert!(r.iter().all(|z| (z.norm() - 1.0).abs() < 1e-14 && z.re.abs() < 1e-14));
        assert_eq!(roots(&[3.0, 0.0]).unwrap().len(), 0);
        let r = roots(&[0.0, 0.0, 1.0, 1.0]).unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(r.iter().filter(|z| z.norm() == 0.0).count(), 2);
    }

    #[test]
    fn single_precision() {
        let r = roots(&[1.0f32, -2.5, 1.0]).unwrap();
        let mut m: Vec<f32> = r.iter().map(|z| z.norm()).collect();
        m.sort_by(f32::total_cmp);
        assert!((m[0] - 0.5).abs() < 1e-5 && (m[1] - 2.0).abs() < 1e-5);
    }

    #[test]
    fn repeated_root() {
        // (1 − z/2)³
        let c = mul(&mul(&[1.0f64, -0.5], &[1.0, -0.5]), &[1.0, -0.5]);
        let r = roots(&c).unwrap();
        assert!(r.iter().all(|z| (z - Complex::new(2.0, 0.0)).norm() < 1e-4));
    }

    proptest! {
        #[test]
        fn roots_rebuild_polynomial(rs in proptest::collection::vec(-3.0f64..3.0, 1..7)) {
            prop_assume!(rs.iter().all(|r| r.abs() > 0.1));
            for w in rs.windows(2) {
                prop_assume!((w[0] - w[1]).abs() > 0.05);
            }
            let mut c = vec![1.0];
            for r in &rs {
                c = mul(&c, &[1.0, -1.0 / r]);
            }
            let found = roots(&c).unwrap();
            prop_assert_eq!(found.len(), rs.len());
            for r in &rs {
                let best = found.iter().map(|z| (z - Complex::new(*r, 0.0)).norm()).fold(f64::INFINITY, f64::min);
                prop_assert!(best < 1e-8 * r.abs().max(1.0), "root {} missing: {:?}", r, found);
            }
        }

        #[test]
        fn inverse_times_polynomial_is_one(q in proptest::collection::vec(-1.0f64..1.0, 1..5)) {
            let mut q = q;
            q.insert(0, 1.0);
            let b = series_inverse(&q, 12).unwrap();
            let prod = mul(&q, &b);
            prop_assert!((prod[0] - 1.0).abs() < 1e-12);
            for v in &prod[1..12] {
                prop_assert!(v.abs() < 1e-9 * (1.0 + b.iter().map(|x| x.abs()).fold(0.0, f64::max)));
            }
        }
    }
}
