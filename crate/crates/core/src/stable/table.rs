//! Interpolation table for the standardized log-density.
//!
//! Each side of the origin is tabulated separately as the right half of the
//! law (α, ±β), on nodes in u = asinh(x). Between nodes ln f is a quintic
//! Hermite interpolant built from ln f and its first two u-derivatives, which
//! the inversion integral returns at no extra cost. Nodes start on a coarse
//! uniform grid and intervals are bisected until the interpolant predicts the
//! directly computed midpoint to within the requested tolerance. Past the last
//! node the tail expansion takes over.

use super::density::{right_half, DensityDerivs};
use super::tail::TailSeries;
use super::StableParams;
use crate::quad::gauss_legendre;
use crate::{Error, Result};

/// Default refinement tolerance on ln f.
pub const DEFAULT_RESOLUTION: f64 = 1e-9;

const COARSE_STEP: f64 = 0.4;
const MIN_STEP: f64 = 1e-3;
/// Outermost node, asinh(1e8).
const U_CAP: f64 = 19.11;
/// The expansion replaces the table once its relative error is below this.
const SWITCH_TOL: f64 = 1e-11;
const GL_POINTS: usize = 8;

#[derive(Debug, Clone, Copy)]
struct Node {
    u: f64,
    /// ln f, d ln f/du, d² ln f/du²
    l: [f64; 3],
}

impl Node {
    fn new(u: f64, d: DensityDerivs) -> Self {
        let x = u.sinh();
        let c = u.cosh();
        let g1 = d.d1 / d.f;
        let g2 = d.d2 / d.f - g1 * g1;
        Node {
            u,
            l: [d.f.ln(), g1 * c, g2 * c * c + g1 * x],
        }
    }
}

fn hermite(a: &Node, b: &Node, u: f64) -> f64 {
    let h = b.u - a.u;
    let t = (u - a.u) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let t5 = t4 * t;
    let h00 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    let h10 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    let h20 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
    let h21 = 0.5 * (t3 - 2.0 * t4 + t5);
    let h11 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    let h01 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    a.l[0] * h00
        + h * (a.l[1] * h10 + b.l[1] * h11)
        + h * h * (a.l[2] * h20 + b.l[2] * h21)
        + b.l[0] * h01
}

/// Tabulated right half of one law, x ≥ 0.
#[derive(Debug, Clone)]
struct Half {
    nodes: Vec<Node>,
    tail: TailSeries,
    /// Whether the full expansion (rather than its first term) is used past the
    /// last node.
    series: bool,
    /// mass[i] = ∫ f over x ≥ x_i (tail included).
    mass: Vec<f64>,
}

impl Half {
    fn build(alpha: f64, beta: f64, tol: f64, gl: &(Vec<f64>, Vec<f64>)) -> Result<Self> {
        let tail = TailSeries::new(alpha, beta);
        // Tail switch: first coarse abscissa where the expansion is accurate.
        let mut u_end = U_CAP;
        let mut series = false;
        let mut u = 2.0;
        while u < U_CAP {
            if let Some((_, err)) = tail.eval(u.sinh()) {
                if err < SWITCH_TOL {
                    u_end = u;
                    series = true;
                    break;
                }
            }
            u += COARSE_STEP;
        }
        let n_coarse = (u_end / COARSE_STEP).ceil() as usize;
        let mut hint = None;
        let mut eval = |u: f64, hint: &mut Option<i32>| -> Result<Node> {
            let (d, k) = right_half(alpha, beta, u.sinh(), *hint)?;
            *hint = k.or(*hint);
            Ok(Node::new(u, d))
        };
        let mut nodes = vec![eval(0.0, &mut hint)?];
        for i in 1..=n_coarse {
            let ub = (i as f64 * u_end / n_coarse as f64).min(u_end);
            let b = eval(ub, &mut hint)?;
            let a = *nodes.last().unwrap();
            refine(&a, &b, tol, &mut nodes, &mut eval, &mut hint)?;
            nodes.push(b);
        }
        let mut half = Half { nodes, tail, series, mass: Vec::new() };
        let x_end = half.nodes.last().unwrap().u.sinh();
        let mut acc = half.tail_mass(x_end);
        let mut mass = vec![acc];
        for w in half.nodes.windows(2).rev() {
            acc += half.segment_mass(&w[0], &w[1], w[0].u, w[1].u, gl);
            mass.push(acc);
        }
        mass.reverse();
        half.mass = mass;
        Ok(half)
    }

    fn x_end(&self) -> f64 {
        self.nodes.last().unwrap().u.sinh()
    }

    fn tail_log_pdf(&self, x: f64) -> f64 {
        if self.series {
            if let Some((v, _)) = self.tail.eval(x) {
                return v[0].ln();
            }
        }
        self.tail.first_order(x)[0].ln()
    }

    fn tail_mass(&self, x: f64) -> f64 {
        if self.series {
            if let Some(m) = self.tail.survival(x) {
                return m;
            }
        }
        self.tail.leading() * x.powf(-self.tail.alpha()) / self.tail.alpha()
    }

    fn locate(&self, u: f64) -> usize {
        let i = self.nodes.partition_point(|n| n.u <= u);
        i.clamp(1, self.nodes.len() - 1) - 1
    }

    fn log_pdf(&self, x: f64) -> f64 {
        if x > self.x_end() {
            return self.tail_log_pdf(x);
        }
        let u = x.asinh();
        let i = self.locate(u);
        hermite(&self.nodes[i], &self.nodes[i + 1], u)
    }

    fn segment_mass(&self, a: &Node, b: &Node, lo: f64, hi: f64, gl: &(Vec<f64>, Vec<f64>)) -> f64 {
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        gl.0
            .iter()
            .zip(&gl.1)
            .map(|(t, w)| {
                let u = mid + half * t;
                w * (hermite(a, b, u).exp() * u.cosh())
            })
            .sum::<f64>()
            * half
    }

    /// ∫ f over [x, ∞), x ≥ 0.
    fn mass_above(&self, x: f64, gl: &(Vec<f64>, Vec<f64>)) -> f64 {
        if x > self.x_end() {
            return self.tail_mass(x);
        }
        let u = x.asinh();
        let i = self.locate(u);
        let (a, b) = (&self.nodes[i], &self.nodes[i + 1]);
        self.mass[i + 1] + self.segment_mass(a, b, u, b.u, gl)
    }
}

fn refine<F>(a: &Node, b: &Node, tol: f64, out: &mut Vec<Node>, eval: &mut F, hint: &mut Option<i32>) -> Result<()>
where
    F: FnMut(f64, &mut Option<i32>) -> Result<Node>,
{
    let um = 0.5 * (a.u + b.u);
    let m = eval(um, hint)?;
    let err = (hermite(a, b, um) - m.l[0]).abs();
    if err > 32.0 * tol && b.u - a.u > 2.0 * MIN_STEP {
        refine(a, &m, tol, out, eval, hint)?;
        out.push(m);
        refine(&m, b, tol, out, eval, hint)?;
    } else {
        out.push(m);
    }
    Ok(())
}

/// Standardized log-density of one (α, β), with distribution function and
/// quantiles. Immutable once built.
#[derive(Debug, Clone)]
pub struct DensityTable {
    alpha: f64,
    beta: f64,
    right: Option<Half>,
    left: Option<Half>,
    gl: (Vec<f64>, Vec<f64>),
}

impl DensityTable {
    /// Tabulates (α, β, 1, 0); `resolution` is the refinement tolerance on
    /// ln f at interval midpoints.
    pub fn build(alpha: f64, beta: f64, resolution: f64) -> Result<Self> {
        StableParams::standard(alpha, beta)?;
        if !(resolution > 0.0 && resolution < 1.0) {
            return Err(Error::Config(format!("table resolution must lie in (0,1), got {resolution}")));
        }
        let gl = gauss_legendre(GL_POINTS);
        if alpha == 2.0 {
            return Ok(DensityTable { alpha, beta, right: None, left: None, gl });
        }
        let right = Half::build(alpha, beta, resolution, &gl)?;
        let left = if beta == 0.0 { right.clone() } else { Half::build(alpha, -beta, resolution, &gl)? };
        Ok(DensityTable { alpha, beta, right: Some(right), left: Some(left), gl })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Node abscissae, increasing.
    pub fn grid(&self) -> Vec<f64> {
        match (&self.left, &self.right) {
            (Some(l), Some(r)) => l
                .nodes
                .iter()
                .rev()
                .map(|n| -n.u.sinh())
                .chain(r.nodes.iter().skip(1).map(|n| n.u.sinh()))
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Abscissae beyond which the tail expansion is used.
    pub fn tail_switch(&self) -> (f64, f64) {
        match (&self.left, &self.right) {
            (Some(l), Some(r)) => (-l.x_end(), r.x_end()),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn check_params(&self, tau: &StableParams) -> Result<()> {
        if tau.alpha == self.alpha && tau.beta == self.beta {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "density table built for (α={}, β={}) used with (α={}, β={})",
                self.alpha, self.beta, tau.alpha, tau.beta
            )))
        }
    }

    pub fn log_pdf_std(&self, x: f64) -> f64 {
        match (&self.left, &self.right) {
            (Some(l), Some(r)) => {
                if self.beta == 0.0 {
                    r.log_pdf(x.abs())
                } else if x >= 0.0 {
                    r.log_pdf(x)
                } else {
                    l.log_pdf(-x)
                }
            }
            _ => -0.25 * x * x - (2.0 * std::f64::consts::PI.sqrt()).ln(),
        }
    }

    pub fn pdf_std(&self, x: f64) -> f64 {
        self.log_pdf_std(x).exp()
    }

    /// ∫ f over ℝ from the table and its tails, before normalization.
    pub fn total_mass(&self) -> f64 {
        match (&self.left, &self.right) {
            (Some(l), Some(r)) => l.mass[0] + r.mass[0],
            _ => 1.0,
        }
    }

    /// Distribution function, normalized by [`total_mass`](Self::total_mass).
    pub fn cdf_std(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        match (&self.left, &self.right) {
            (Some(l), Some(r)) => {
                let total = self.total_mass();
                if x < 0.0 {
                    l.mass_above(-x, &self.gl) / total
                } else {
                    1.0 - r.mass_above(x, &self.gl) / total
                }
            }
            _ => 0.5 * statrs::function::erf::erfc(-x / 2.0),
        }
    }

    /// Quantile of the standardized law by bracketed Newton iteration.
    pub fn quantile_std(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::domain(format!("quantile level must lie in (0,1), got {q}")));
        }
        let (mut lo, mut hi) = (-1.0_f64, 1.0_f64);
        while self.cdf_std(lo) > q {
            lo *= 2.0;
            if lo < -1e300 {
                return Err(Error::numerical("quantile bracket diverged", q));
            }
        }
        while self.cdf_std(hi) < q {
            hi *= 2.0;
            if hi > 1e300 {
                return Err(Error::numerical("quantile bracket diverged", q));
            }
        }
        let mut x = 0.5 * (lo + hi);
        for _ in 0..200 {
            let g = self.cdf_std(x) - q;
            if g == 0.0 {
                return Ok(x);
            }
            if g > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let step = g / self.pdf_std(x);
            let mut next = x - step;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 1e-14 * (1.0 + x.abs()) || hi - lo <= 1e-15 * (1.0 + x.abs()) {
                return Ok(next);
            }
            x = next;
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stable::pdf_derivs_std;
    use std::f64::consts::PI;

    #[test]
    fn hermite_reproduces_quintic() {
        let p = |u: f64| [1.0 + u - 2.0 * u.powi(3) + 0.5 * u.powi(5), 1.0 - 6.0 * u * u + 2.5 * u.powi(4), -12.0 * u + 10.0 * u.powi(3)];
        let a = Node { u: 0.3, l: p(0.3) };
        let b = Node { u: 0.9, l: p(0.9) };
        for &u in &[0.3, 0.41, 0.6, 0.77, 0.9] {
            assert!((hermite(&a, &b, u) - p(u)[0]).abs() < 1e-13);
        }
    }

    #[test]
    fn cauchy_table() {
        let t = DensityTable::build(1.0, 0.0, DEFAULT_RESOLUTION).unwrap();
        let mut x = -20.0;
        while x <= 20.0 {
            let want = 1.0 / (PI * (1.0 + x * x));
            assert!((t.pdf_std(x) - want).abs() < 1e-8 * want.max(1e-3), "x={x}");
            assert!((t.cdf_std(x) - (0.5 + x.atan() / PI)).abs() < 1e-9, "x={x}");
            x += 0.037;
        }
    }

    #[test]
    fn interpolation_matches_direct() {
        for &(a, b) in &[(1.5, 0.0), (0.8, 0.5), (1.2, -0.5), (1.9, 0.3), (0.5, 0.9), (1.002, 0.6)] {
            let t = DensityTable::build(a, b, DEFAULT_RESOLUTION).unwrap();
            let (lo, hi) = t.tail_switch();
            let mut x = lo.max(-60.0);
            let mut worst: f64 = 0.0;
            while x < hi.min(60.0) {
                let d = pdf_derivs_std(a, b, x).unwrap();
                let r = (t.pdf_std(x) / d.f - 1.0).abs();
                worst = worst.max(r);
                x += 0.0731;
            }
            assert!(worst < 1e-8, "α={a} β={b} rel={worst}");
        }
    }

    #[test]
    fn normalized() {
        for &(a, b) in &[(1.5, 0.0), (0.8, -0.5), (1.0, 0.5), (1.9, 0.5)] {
            let t = DensityTable::build(a, b, DEFAULT_RESOLUTION).unwrap();
            assert!((t.total_mass() - 1.0).abs() < 1e-6, "α={a} β={b} mass={}", t.total_mass());
        }
    }

    #[test]
    fn symmetric_for_zero_skew() {
        let t = DensityTable::build(1.3, 0.0, DEFAULT_RESOLUTION).unwrap();
        for &x in &[0.1, 1.7, 9.3, 250.0, 1e5] {
            assert_eq!(t.log_pdf_std(x), t.log_pdf_std(-x));
        }
        let g = t.grid();
        for (a, b) in g.iter().zip(g.iter().rev()) {
            assert_eq!(*a, -*b);
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        let t = DensityTable::build(0.8, 0.3, DEFAULT_RESOLUTION).unwrap();
        for &q in &[1e-6, 0.01, 0.3, 0.5, 0.77, 0.999] {
            let x = t.quantile_std(q).unwrap();
            assert!((t.cdf_std(x) - q).abs() < 1e-12 * q.max(1e-3), "q={q}");
        }
    }

    #[test]
    fn gaussian_table() {
        let t = DensityTable::build(2.0, 0.0, DEFAULT_RESOLUTION).unwrap();
        assert!((t.pdf_std(0.0) - 1.0 / (2.0 * PI.sqrt())).abs() < 1e-15);
        assert!((t.quantile_std(0.975).unwrap() - 1.959963984540054 * 2f64.sqrt()).abs() < 1e-9);
    }
}
