//! Adaptive Gauss–Kronrod and composite Gauss–Legendre quadrature on
//! finite intervals, with compensated accumulation.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Kronrod abscissae on `[0, 1]`, descending; odd indices are Gauss points.
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
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
/// Gauss weights for `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then(other.a.total_cmp(&self.a))
    }
}

fn kronrod<F: FnMut(f64) -> Result<f64>>(f: &mut F, a: f64, b: f64) -> Result<Panel> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let fx = f(c - h * XGK[j])? + f(c + h * XGK[j])?;
        k += WGK[j] * fx;
        if j % 2 == 1 {
            g += WG[j / 2] * fx;
        }
    }
    let value = k * h;
    let error = ((k - g) * h).abs();
    if !value.is_finite() {
        return Err(Error::UnconvergedQuadrature(format!("non-finite integrand on [{a}, {b}]")));
    }
    Ok(Panel { a, b, value, error })
}

/// Globally adaptive 7/15-point Gauss–Kronrod on `[a, b]`: the panel with
/// the largest error is bisected until the total error is below
/// `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64, max_panels: usize) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument(format!("interval [{a}, {b}]")));
    }
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0, evals: 0 });
    }
    if b < a {
        let r = integrate(f, b, a, abs_tol, rel_tol, max_panels)?;
        return Ok(QuadResult { value: -r.value, ..r });
    }
    let mut heap = BinaryHeap::new();
    heap.push(kronrod(&mut f, a, b)?);
    let mut evals = 15;
    loop {
        let value: CompensatedSum = heap.iter().map(|p| p.value).collect();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        let value = value.value();
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(QuadResult { value, error, evals });
        }
        if heap.len() >= max_panels {
            return Err(Error::UnconvergedQuadrature(format!(
                "error {error:.3e} after {max_panels} panels on [{a}, {b}]"
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            return Err(Error::UnconvergedQuadrature(format!("panel at {mid} cannot be split")));
        }
        heap.push(kronrod(&mut f, worst.a, mid)?);
        heap.push(kronrod(&mut f, mid, worst.b)?);
        evals += 30;
    }
}

/// Nodes and weights of the `order`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre_rule(order: usize) -> Vec<(f64, f64)> {
    let n = order;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            dp = n as f64 * (x * p - p0) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite Gauss–Legendre with `panels` equal panels of `order` points.
pub fn gauss_legendre<F>(mut f: F, a: f64, b: f64, panels: usize, order: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let rule = gauss_legendre_rule(order);
    let h = (b - a) / panels as f64;
    let mut acc = CompensatedSum::new();
    for p in 0..panels {
        let c = a + (p as f64 + 0.5) * h;
        for &(x, w) in &rule {
            acc.add(0.5 * h * w * f(c + 0.5 * h * x)?);
        }
    }
    Ok(acc.value())
}
