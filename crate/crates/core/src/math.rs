//! Scalar numerics shared across modules: normal distribution helpers,
//! adaptive Gauss-Kronrod quadrature and sample moments.

use crate::error::{Error, Result};

pub(crate) const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

pub fn norm_pdf(x: f64) -> f64 {
    libm::exp(-0.5 * x * x) / SQRT_2PI
}

pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / core::f64::consts::SQRT_2)
}

// Gauss-Kronrod 7/15 nodes on [-1, 1].
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
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * h, libm::fabs((kronrod - gauss) * h))
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Option<(f64, f64)> {
    let (est, err) = gk15(f, a, b);
    if err <= tol || (b - a) <= 1e-12 * (1.0 + libm::fabs(a)) {
        return Some((est, err));
    }
    if depth == 0 {
        return None;
    }
    let m = 0.5 * (a + b);
    let (l, le) = adapt(f, a, m, 0.5 * tol, depth - 1)?;
    let (r, re) = adapt(f, m, b, 0.5 * tol, depth - 1)?;
    Some((l + r, le + re))
}

/// Adaptive Gauss-Kronrod (7/15) integral of `f` over the finite interval
/// `[a, b]`, to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    match adapt(&f, a, b, tol, 40) {
        Some((v, _)) => Ok(v),
        None => {
            let (estimate, error) = gk15(&f, a, b);
            Err(Error::Quadrature { tol, estimate, error })
        }
    }
}

/// Mean, standard deviation, skewness and excess kurtosis of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub n: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

/// Two-pass sample moments. Returns `None` for fewer than two samples or a
/// zero-variance sample.
pub fn moments(xs: &[f64]) -> Option<Moments> {
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mean = xs.iter().sum::<f64>() / nf;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in xs {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;
    if m2 <= 0.0 {
        return None;
    }
    Some(Moments {
        n,
        mean,
        std_dev: libm::sqrt(m2 * nf / (nf - 1.0)),
        skewness: m3 / libm::pow(m2, 1.5),
        excess_kurtosis: m4 / (m2 * m2) - 3.0,
    })
}

/// Mean and batch-means standard error of a correlated series.
pub fn batch_mean_error(xs: &[f64], n_batches: usize) -> (f64, f64) {
    let n = xs.len();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let batches = n_batches.clamp(2, n.max(2));
    let len = n / batches;
    if len == 0 {
        return (mean, f64::NAN);
    }
    let means: alloc::vec::Vec<f64> =
        xs.chunks_exact(len).take(batches).map(|c| c.iter().sum::<f64>() / len as f64).collect();
    let b = means.len() as f64;
    let bm = means.iter().sum::<f64>() / b;
    let var = means.iter().map(|m| (m - bm) * (m - bm)).sum::<f64>() / (b - 1.0);
    (mean, libm::sqrt(var / b))
}
