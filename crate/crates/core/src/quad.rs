//! Adaptive Gauss–Kronrod quadrature and fixed Gauss–Legendre rules.

use std::collections::BinaryHeap;
use std::cmp::Ordering;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult<const N: usize> {
    pub value: [f64; N],
    /// Weighted error estimate (see [`adaptive_gk`]).
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Single 15-point Kronrod panel with the embedded 7-point Gauss estimate.
fn gk15<const N: usize, F: FnMut(f64) -> [f64; N]>(
    f: &mut F,
    a: f64,
    b: f64,
) -> ([f64; N], [f64; N]) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = [0.0; N];
    let mut g = [0.0; N];
    for i in 0..N {
        k[i] = WGK[7] * fc[i];
        g[i] = WG[3] * fc[i];
    }
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        for i in 0..N {
            let s = f1[i] + f2[i];
            k[i] += WGK[j] * s;
            if j % 2 == 1 {
                g[i] += WG[j / 2] * s;
            }
        }
    }
    let mut err = [0.0; N];
    for i in 0..N {
        k[i] *= h;
        err[i] = (k[i] - g[i] * h).abs();
    }
    (k, err)
}

struct Panel<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    err: f64,
}

impl<const N: usize> PartialEq for Panel<N> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl<const N: usize> Eq for Panel<N> {}
impl<const N: usize> PartialOrd for Panel<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Panel<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive G7K15 integration of a vector-valued integrand.
///
/// The scalar error of a panel is `Σ weights[i]·err[i]`; bisection continues
/// on the worst panel until the summed error is below
/// `max(tol_abs, tol_rel·|value[0]|)` or `max_panels` panels exist. `breaks` are initial subdivision points inside `(a, b)`.
pub fn adaptive_gk<const N: usize, F: FnMut(f64) -> [f64; N]>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    weights: [f64; N],
    tol_abs: f64,
    tol_rel: f64,
    max_panels: usize,
) -> QuadResult<N> {
    let mut heap = BinaryHeap::new();
    let mut pts = Vec::with_capacity(breaks.len() + 2);
    pts.push(a);
    pts.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    pts.push(b);
    let mut evals = 0;
    let mut total = [0.0; N];
    let mut total_err = 0.0;
    for w in pts.windows(2) {
        let (v, e) = gk15(&mut f, w[0], w[1]);
        evals += 15;
        let err = weighted(&e, &weights);
        for i in 0..N {
            total[i] += v[i];
        }
        total_err += err;
        heap.push(Panel { a: w[0], b: w[1], value: v, err });
    }
    let target = |v: &[f64; N]| tol_abs.max(tol_rel * v[0].abs());
    while total_err > target(&total) && heap.len() < max_panels {
        let worst = heap.pop().expect("heap nonempty");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(&mut f, worst.a, m);
        let (v2, e2) = gk15(&mut f, m, worst.b);
        evals += 30;
        let err1 = weighted(&e1, &weights);
        let err2 = weighted(&e2, &weights);
        for i in 0..N {
            total[i] += v1[i] + v2[i] - worst.value[i];
        }
        total_err += err1 + err2 - worst.err;
        heap.push(Panel { a: worst.a, b: m, value: v1, err: err1 });
        heap.push(Panel { a: m, b: worst.b, value: v2, err: err2 });
    }
    // re-sum to shed accumulated rounding from the incremental updates
    let mut value = [0.0; N];
    let mut err = 0.0;
    for p in heap.iter() {
        for i in 0..N {
            value[i] += p.value[i];
        }
        err += p.err;
    }
    QuadResult {
        value,
        error: err,
        evaluations: evals,
        converged: err <= target(&value),
    }
}

fn weighted<const N: usize>(e: &[f64; N], w: &[f64; N]) -> f64 {
    e.iter().zip(w).map(|(a, b)| a * b).sum()
}

/// Gauss–Legendre nodes and weights on [-1, 1] (Newton on the Legendre
/// recurrence).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}
