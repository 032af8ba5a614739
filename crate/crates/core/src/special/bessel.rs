//! Modified Bessel functions `I_ν(z)`, `K_ν(z)` of complex order and real
//! argument `z > 0`.
//!
//! The power series is summed in double-double: for orders with large
//! negative real part the terms grow by many orders of magnitude before the
//! sum settles, and double precision alone loses every digit. Outside the
//! series box the uniform Airy-type approximation is used,
//!
//! `I_ν(λ) ≈ √2 λ^{-1/3} e^{-iπ/6} i^{-ν} (ζ/(α²+1))^{1/4} Ai(e^{-2πi/3} λ^{2/3} ζ)`,
//! `K_ν(λ) ≈ √2 π λ^{-1/3} i^{ν} (ζ/(α²+1))^{1/4} Ai(λ^{2/3} ζ)`,
//!
//! with `α = ν/λ`, whose relative error is `O(λ^{-1})` uniformly in
//! `arg α ∈ [0, π/2]`, including the turning point `α = i`.

use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use num_complex::Complex64;

use super::airy::airy_ai_scaled;
use super::gamma::log_gamma_unchecked;
use super::{EvalResult, Regime};
use crate::dd::{CDd, Dd};
use crate::error::{Error, Result};
use crate::phase;

/// Largest argument for which the series is attempted.
pub const SERIES_Z_MAX: f64 = 100.0;
/// Largest `|ν|` for which the series is attempted.
pub const SERIES_NU_MAX: f64 = 150.0;
/// `C` in the uniform-regime estimate `C/λ`.
pub const UNIFORM_ERROR_CONSTANT: f64 = 0.1;

const SERIES_MAX_TERMS: usize = 500;
const SERIES_ACCEPT: f64 = 1e-10;
const EXP_LIMIT: f64 = 709.0;
const EPS: f64 = f64::EPSILON;
const NEAR_INTEGER: f64 = 0.05;
const CIRCLE_RADIUS: f64 = 0.25;
const CIRCLE_POINTS: usize = 32;
const TURNING_RADIUS: f64 = 1e-3;
const CANCELLATION_LIMIT: f64 = 1e-4;

/// `I_order(z) = sum · e^{log_scale}`, kept apart so ratios never overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub sum: Complex64,
    pub log_scale: Complex64,
    pub est_rel_error: f64,
    pub terms: usize,
}

impl SeriesValue {
    pub fn value(&self) -> Result<Complex64> {
        if self.sum == Complex64::new(0.0, 0.0) {
            return Ok(self.sum);
        }
        let l = self.ln();
        if l.re > EXP_LIMIT {
            return Err(Error::MagnitudeOverflow(format!("|I| ≈ e^{:.1}", l.re)));
        }
        Ok(l.exp())
    }

    pub fn ln(&self) -> Complex64 {
        self.log_scale + self.sum.ln()
    }
}

fn validate(nu: Complex64, z: f64) -> Result<()> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::InvalidArgument(format!("argument z = {z} must be positive")));
    }
    if !(nu.re.is_finite() && nu.im.is_finite()) {
        return Err(Error::InvalidArgument(format!("order {nu}")));
    }
    Ok(())
}

fn is_negative_integer(nu: Complex64) -> bool {
    nu.im == 0.0 && nu.re < 0.0 && nu.re == nu.re.round()
}

/// Series `Σ (z/2)^{ν+2k} / (k! Γ(ν+k+1))` with terms built by the ratio
/// recurrence in double-double and the leading factor in log form.
pub(crate) fn series_detail(order: Complex64, z: f64) -> Result<SeriesValue> {
    validate(order, z)?;
    // I_{-m} = I_m; the leading terms of the raw sum vanish there.
    let order = if is_negative_integer(order) { -order } else { order };
    let log_scale = order * (z / 2.0).ln() - log_gamma_unchecked(order + 1.0);
    let half = Dd::new(z) / Dd::new(2.0);
    let q = half * half;
    let ore = Dd::new(order.re);
    let oim = Dd::new(order.im);
    let mut p = CDd::ONE;
    let mut s = CDd::ONE;
    let mut abs_sum = 1.0f64;
    let mut prev = 1.0f64;
    let mut small_run = 0;
    let k_min = (-order.re).max(0.0) + 1.0;
    let mut k = 1usize;
    loop {
        if k > SERIES_MAX_TERMS {
            return Err(Error::NoConvergenceWithinBudget {
                order: order.to_string(),
                z,
                terms: SERIES_MAX_TERMS,
            });
        }
        let kd = Dd::new(k as f64);
        let den = CDd::new((kd + ore) * kd, oim * kd);
        p = p.scale(q) / den;
        s = s + p;
        let size = p.norm_f64();
        abs_sum += size;
        let s_norm = s.norm_f64();
        if (k as f64) > k_min && size < 0.5 * prev && size < 1e-16 * s_norm {
            small_run += 1;
            if small_run == 3 {
                break;
            }
        } else {
            small_run = 0;
        }
        prev = size;
        k += 1;
    }
    let sum = s.to_c64();
    let s_norm = sum.norm();
    let est = if s_norm == 0.0 {
        f64::INFINITY
    } else {
        EPS + 4.0 * EPS * (log_scale.norm() + 1.0)
            + 2f64.powi(-104) * (k as f64 + 2.0) * abs_sum / s_norm
            + 2.0 * prev / s_norm
    };
    Ok(SeriesValue {
        sum,
        log_scale,
        est_rel_error: est,
        terms: k,
    })
}

/// Raw series value of `I_ν(z)` for any complex order.
pub fn bessel_i_series(nu: Complex64, z: f64) -> Result<Complex64> {
    series_detail(nu, z)?.value()
}

fn conj_result(r: EvalResult) -> EvalResult {
    EvalResult {
        value: r.value.conj(),
        ..r
    }
}

fn exp_checked(l: Complex64, what: &str) -> Result<Complex64> {
    if l.re > EXP_LIMIT {
        return Err(Error::MagnitudeOverflow(format!("{what} ≈ e^{:.1}", l.re)));
    }
    Ok(l.exp())
}

/// `log (ζ/(α²+1))^{1/4}`, analytic through the turning point `α = i`
/// where both factors vanish.
fn ln_quarter_ratio(alpha: Complex64) -> Result<Complex64> {
    // g is real on the imaginary axis near i, so g(-ᾱ) = conj g(α).
    let g = |a: Complex64| -> Result<Complex64> {
        let (pt, flip) = if a.re < 0.0 { (-a.conj(), true) } else { (a, false) };
        let p = phase::rho(pt, 1.0)?;
        let v = (p.zeta / (pt * pt + 1.0)).ln() / 4.0;
        Ok(if flip { v.conj() } else { v })
    };
    let center = Complex64::i();
    if (alpha - center).norm() > TURNING_RADIUS {
        return g(alpha);
    }
    // Taylor coefficients about i from samples on a circle of twice the radius.
    let n = 16;
    let r = 2.0 * TURNING_RADIUS;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        let u = Complex64::from_polar(1.0, 2.0 * PI * (j as f64 + 0.5) / n as f64);
        let v = g(center + u * r)?;
        let mut up = Complex64::new(1.0, 0.0);
        for c in coeffs.iter_mut() {
            *c += v * up / n as f64;
            up /= u;
        }
    }
    let h = (alpha - center) / r;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut hp = Complex64::new(1.0, 0.0);
    for c in &coeffs {
        acc += c * hp;
        hp *= h;
    }
    Ok(acc)
}

struct Uniform {
    ln_value: Complex64,
    est: f64,
    regime: Regime,
}

fn uniform_common(nu: Complex64, z: f64, for_i: bool) -> Result<Uniform> {
    let alpha = nu / z;
    let p = phase::rho(alpha, 1.0)?;
    let quarter = ln_quarter_ratio(p.alpha)?;
    let zr = z.powf(2.0 / 3.0) * p.zeta_abs();
    let arg = if for_i {
        p.zeta_arg() - 2.0 * PI / 3.0
    } else {
        p.zeta_arg()
    };
    let ai = airy_ai_scaled(Complex64::from_polar(zr, arg))?;
    let i = Complex64::i();
    let common = 0.5 * LN_2 - z.ln() / 3.0 + quarter + ai.ln();
    let ln_value = if for_i {
        common - i * (PI / 6.0) - i * FRAC_PI_2 * nu
    } else {
        common + PI.ln() + i * FRAC_PI_2 * nu
    };
    let psi = p.rho * z;
    let regime = if psi.norm() < 1.0 {
        Regime::TurningPoint
    } else {
        Regime::UniformAiry
    };
    Ok(Uniform {
        ln_value,
        est: UNIFORM_ERROR_CONSTANT / z + ai.est_rel_error,
        regime,
    })
}

fn require_right_half(nu: Complex64) -> Result<()> {
    if nu.re < 0.0 {
        return Err(Error::RegimeUnavailable(format!(
            "uniform formula needs Re ν ≥ 0, got {nu}"
        )));
    }
    Ok(())
}

/// Uniform Airy-type approximation of `I_ν(z)`, `Re ν ≥ 0`.
pub fn bessel_i_uniform(nu: Complex64, z: f64) -> Result<EvalResult> {
    validate(nu, z)?;
    require_right_half(nu)?;
    if nu.im < 0.0 {
        return bessel_i_uniform(nu.conj(), z).map(conj_result);
    }
    let u = uniform_common(nu, z, true)?;
    EvalResult::checked(exp_checked(u.ln_value, "I_ν")?, u.regime, u.est)
}

/// Uniform Airy-type approximation of `K_ν(z)`, `Re ν ≥ 0`.
pub fn bessel_k_uniform(nu: Complex64, z: f64) -> Result<EvalResult> {
    validate(nu, z)?;
    require_right_half(nu)?;
    if nu.im < 0.0 {
        return bessel_k_uniform(nu.conj(), z).map(conj_result);
    }
    let u = uniform_common(nu, z, false)?;
    EvalResult::checked(exp_checked(u.ln_value, "K_ν")?, u.regime, u.est)
}

fn in_series_box(nu: Complex64, z: f64) -> bool {
    z <= SERIES_Z_MAX && nu.norm() <= SERIES_NU_MAX
}

/// `I_ν(z)`: series inside the series box, uniform asymptotics outside it
/// (which needs `Re ν ≥ 0`).
pub fn bessel_i(nu: Complex64, z: f64) -> Result<EvalResult> {
    validate(nu, z)?;
    if nu.im < 0.0 {
        return bessel_i(nu.conj(), z).map(conj_result);
    }
    let series = if in_series_box(nu, z) {
        match series_detail(nu, z) {
            Ok(s) => {
                if s.est_rel_error <= SERIES_ACCEPT {
                    return EvalResult::checked(s.value()?, Regime::Series, s.est_rel_error);
                }
                Some(s)
            }
            Err(_) => None,
        }
    } else {
        None
    };
    if nu.re >= 0.0 {
        let uni = bessel_i_uniform(nu, z);
        match (uni, series) {
            (Ok(u), Some(s)) if s.est_rel_error < u.est_rel_error => {
                EvalResult::checked(s.value()?, Regime::Series, s.est_rel_error)
            }
            (Ok(u), _) => Ok(u),
            (Err(e), Some(s)) if s.est_rel_error <= 1.0 => {
                let _ = e;
                EvalResult::checked(s.value()?, Regime::Series, s.est_rel_error)
            }
            (Err(e), _) => Err(e),
        }
    } else {
        match series {
            Some(s) if s.est_rel_error <= 1.0 => {
                EvalResult::checked(s.value()?, Regime::Series, s.est_rel_error)
            }
            _ => Err(Error::RegimeUnavailable(format!(
                "I_ν({z}) with ν = {nu}: series inaccurate and Re ν < 0; use the reflection identity"
            ))),
        }
    }
}

/// `sin(πν)` accurate near integers.
pub(crate) fn sin_pi(nu: Complex64) -> Complex64 {
    let m = nu.re.round();
    let d = Complex64::new(nu.re - m, nu.im);
    let s = (d * PI).sin();
    if (m as i64) % 2 == 0 {
        s
    } else {
        -s
    }
}

/// `K_ν = π (I_{-ν} - I_ν) / (2 sin πν)` from the two series.
fn k_wronskian_point(nu: Complex64, z: f64) -> Result<(Complex64, f64)> {
    let a = series_detail(-nu, z)?;
    let b = series_detail(nu, z)?;
    let va = a.value()?;
    let vb = b.value()?;
    let diff = va - vb;
    let value = diff * PI / (2.0 * sin_pi(nu));
    let est = (va.norm() * a.est_rel_error + vb.norm() * b.est_rel_error) / diff.norm() + EPS;
    Ok((value, est))
}

fn k_wronskian(nu: Complex64, z: f64) -> Result<(Complex64, f64)> {
    let dist = Complex64::new(nu.re - nu.re.round(), nu.im).norm();
    if dist >= NEAR_INTEGER {
        return k_wronskian_point(nu, z);
    }
    // K is entire in ν: the circle mean equals the centre value.
    let mut acc = Complex64::new(0.0, 0.0);
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for j in 0..CIRCLE_POINTS {
        let th = 2.0 * PI * (j as f64 + 0.5) / CIRCLE_POINTS as f64;
        let (v, e) = k_wronskian_point(nu + Complex64::from_polar(CIRCLE_RADIUS, th), z)?;
        acc += v;
        worst = worst.max(e * v.norm());
        scale = scale.max(v.norm());
    }
    let value = acc / CIRCLE_POINTS as f64;
    let est = worst / value.norm() + EPS * scale / value.norm();
    Ok((value, est))
}

/// `K_ν(z) = ∫₀^∞ e^{-z cosh t} cosh(νt) dt` by the trapezoidal rule, which
/// converges geometrically for this analytic, rapidly decaying integrand.
fn k_integral(nu: Complex64, z: f64) -> Result<(Complex64, f64)> {
    let a = nu.re.abs();
    // Peak of the log-modulus -z cosh t + a t.
    let t_peak = (a / z).asinh();
    let peak = -z * t_peak.cosh() + a * t_peak;
    let log_mod = |t: f64| -z * t.cosh() + a * t;
    let mut t_max = t_peak + 1.0;
    while log_mod(t_max) > peak - 45.0 {
        t_max += 0.5;
    }
    let f = |t: f64| -> Complex64 {
        // cosh(νt) e^{-z cosh t - peak}, with the growing exponential folded in.
        let e1 = (Complex64::new(nu.re * t, nu.im * t) - z * t.cosh() - peak).exp();
        let e2 = (Complex64::new(-nu.re * t, -nu.im * t) - z * t.cosh() - peak).exp();
        (e1 + e2) * 0.5
    };
    let mut n = 64usize;
    let mut h = t_max / n as f64;
    let mut sum = f(0.0) * 0.5;
    let mut abs_sum = sum.norm();
    for j in 1..=n {
        let v = f(j as f64 * h);
        sum += v;
        abs_sum += v.norm();
    }
    let mut prev = sum * h;
    loop {
        // Halve the step: add the midpoints.
        let mut mid = Complex64::new(0.0, 0.0);
        let mut mid_abs = 0.0;
        for j in 0..n {
            let v = f((j as f64 + 0.5) * h);
            mid += v;
            mid_abs += v.norm();
        }
        sum += mid;
        abs_sum += mid_abs;
        n *= 2;
        h /= 2.0;
        let cur = sum * h;
        let change = (cur - prev).norm();
        let abs_int = abs_sum * h;
        if change <= 1e-15 * abs_int || n >= 1 << 16 {
            let value_norm = cur.norm();
            let est = (change + 4.0 * EPS * abs_int * (1.0 + peak.abs().max(1.0).ln()))
                / value_norm
                + EPS * (peak.abs() + 1.0);
            let l = cur.ln() + peak;
            return Ok((exp_checked(l, "K_ν")?, est));
        }
        prev = cur;
    }
}

/// `K_ν(z)`, the best of: the Wronskian of the two series, the integral
/// representation, and the uniform approximation.
pub fn bessel_k(nu: Complex64, z: f64) -> Result<EvalResult> {
    validate(nu, z)?;
    // K_{-ν} = K_ν and K_{ν̄}(z) = conj K_ν(z).
    let nu = if nu.re < 0.0 { -nu } else { nu };
    if nu.im < 0.0 {
        return bessel_k(nu.conj(), z).map(conj_result);
    }
    let mut best: Option<(Complex64, f64, Regime)> = None;
    let mut consider = |v: Complex64, e: f64, r: Regime| {
        if v.re.is_finite() && v.im.is_finite() && best.map_or(true, |b| e < b.1) {
            best = Some((v, e, r));
        }
    };
    if let Ok((v, e)) = k_integral(nu, z) {
        consider(v, e, Regime::Integral);
    }
    if in_series_box(nu, z) {
        if let Ok((v, e)) = k_wronskian(nu, z) {
            consider(v, e, Regime::Series);
        }
    }
    if let Ok(u) = bessel_k_uniform(nu, z) {
        consider(u.value, u.est_rel_error, u.regime);
    }
    match best {
        Some((v, e, r)) => EvalResult::checked(v, r, e),
        None => Err(Error::RegimeUnavailable(format!("K_ν({z}) with ν = {nu}"))),
    }
}

/// `I_{-ν}(z) = I_ν(z) + (2 sin πν / π) K_ν(z)` for `Re ν ≥ 0`.
pub fn bessel_i_neg(nu: Complex64, z: f64) -> Result<EvalResult> {
    validate(nu, z)?;
    if nu.re < 0.0 {
        return Err(Error::InvalidArgument(format!("bessel_i_neg needs Re ν ≥ 0, got {nu}")));
    }
    if nu.im < 0.0 {
        return bessel_i_neg(nu.conj(), z).map(conj_result);
    }
    let i = bessel_i(nu, z)?;
    let k = bessel_k(nu, z)?;
    let reflected = sin_pi(nu) * (2.0 / PI) * k.value;
    let value = i.value + reflected;
    let est = (i.value.norm() * i.est_rel_error + reflected.norm() * k.est_rel_error) / value.norm()
        + EPS;
    if !(est <= CANCELLATION_LIMIT) {
        return Err(Error::CatastrophicCancellation { est });
    }
    EvalResult::checked(value, Regime::Reflection, est)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn half_integer_closed_forms() {
        // I_{1/2}(z) = √(2/(πz)) sinh z, I_{-1/2}(z) = √(2/(πz)) cosh z,
        // K_{1/2}(z) = √(π/(2z)) e^{-z}.
        for z in [0.3, 1.0, 7.5, 40.0] {
            let pre = (2.0 / (PI * z)).sqrt();
            let ip = bessel_i_series(c(0.5, 0.0), z).unwrap();
            assert!(rel(ip, c(pre * z.sinh(), 0.0)) < 1e-14, "z = {z}");
            let im = bessel_i_series(c(-0.5, 0.0), z).unwrap();
            assert!(rel(im, c(pre * z.cosh(), 0.0)) < 1e-14, "z = {z}");
            let k = bessel_k(c(0.5, 0.0), z).unwrap();
            assert!(rel(k.value, c((PI / (2.0 * z)).sqrt() * (-z).exp(), 0.0)) < 1e-13, "z = {z}");
            let n = bessel_i_neg(c(0.5, 0.0), z).unwrap();
            assert!(rel(n.value, c(pre * z.cosh(), 0.0)) < 1e-12, "z = {z}");
        }
    }

    #[test]
    fn reference_values() {
        // Values from an arbitrary-precision evaluator.
        let cases = [
            (c(2.5, 3.0), 4.0, c(-6.498_920_282_090_951, -10.567_955_611_902_356)),
            (c(-30.5, 12.0), 20.0, c(-1.274_904_613_039_015_5e14, -2.955_066_504_004_524_4e14)),
            (c(40.0, 40.0), 60.0, c(2.675_187_242_410_055e23, -8.566_577_739_832_313e23)),
            (c(-55.3, 20.1), 45.0, c(5.000_573_682_604_665e18, 2.582_349_806_318_455e18)),
        ];
        for (nu, z, want) in cases {
            let got = bessel_i_series(nu, z).unwrap();
            assert!(rel(got, want) < 1e-11, "nu = {nu}: {got} vs {want}");
        }
    }

    #[test]
    fn negative_integer_order_equals_positive() {
        for m in 1..6 {
            let a = bessel_i_series(c(-(m as f64), 0.0), 3.7).unwrap();
            let b = bessel_i_series(c(m as f64, 0.0), 3.7).unwrap();
            assert!(rel(a, b) < 1e-15);
        }
    }

    #[test]
    fn small_argument_limit() {
        let nu = c(1.3, 0.7);
        let z: f64 = 1e-6;
        let lead = (nu * (z / 2.0).ln() - log_gamma_unchecked(nu + 1.0)).exp();
        assert!(rel(bessel_i_series(nu, z).unwrap(), lead) < 1e-11);
    }

    #[test]
    fn large_argument_law() {
        let z: f64 = 50.0;
        let v = bessel_i(c(0.0, 0.0), z).unwrap().value;
        let law = z.exp() / (2.0 * PI * z).sqrt();
        assert!((v.re / law - 1.0).abs() < 0.01);
        let k = bessel_k(c(0.0, 0.0), z).unwrap().value;
        let law = (PI / (2.0 * z)).sqrt() * (-z).exp();
        assert!((k.re / law - 1.0).abs() < 0.01);
    }

    #[test]
    fn series_budget_is_enforced() {
        assert!(matches!(
            series_detail(c(0.0, 0.0), 2000.0),
            Err(Error::NoConvergenceWithinBudget { .. })
        ));
    }

    #[test]
    fn uniform_matches_series_on_overlap() {
        for nu in [c(0.0, 0.0), c(30.0, 10.0), c(5.0, 80.0), c(0.01, 90.0), c(120.0, 60.0)] {
            let z = 90.0;
            let s = bessel_i_series(nu, z).unwrap();
            let u = bessel_i_uniform(nu, z).unwrap();
            assert!(rel(u.value, s) <= u.est_rel_error, "nu = {nu}");
            let ks = bessel_k(nu, z).unwrap();
            let ku = bessel_k_uniform(nu, z).unwrap();
            assert!(rel(ku.value, ks.value) <= ku.est_rel_error, "nu = {nu}");
        }
    }

    #[test]
    fn turning_point_regime_is_labelled() {
        let u = bessel_i_uniform(c(0.0, 50.0), 50.0).unwrap();
        assert_eq!(u.regime, Regime::TurningPoint);
        let u = bessel_i_uniform(c(10.0, 50.0), 50.0).unwrap();
        assert_eq!(u.regime, Regime::UniformAiry);
    }

    #[test]
    fn k_candidates_agree_near_integers() {
        for nu in [c(3.0, 0.0), c(3.01, 0.02), c(7.0, 0.0), c(0.0, 0.0)] {
            let (w, ew) = k_wronskian(nu, 5.0).unwrap();
            let (q, eq) = k_integral(nu, 5.0).unwrap();
            assert!(ew < 1e-9 && eq < 1e-13);
            assert!(rel(w, q) <= ew + eq, "nu = {nu}");
        }
    }

    #[test]
    fn reflection_at_integers_is_i() {
        for m in 1..5 {
            let nu = c(m as f64, 0.0);
            let a = bessel_i_neg(nu, 2.0).unwrap().value;
            let b = bessel_i(nu, 2.0).unwrap().value;
            assert!(rel(a, b) < 1e-15);
        }
    }

    #[test]
    fn uniform_rejects_left_half_plane() {
        assert!(matches!(
            bessel_i_uniform(c(-1.0, 2.0), 10.0),
            Err(Error::RegimeUnavailable(_))
        ));
        assert!(matches!(
            bessel_i(c(-300.0, 0.5), 200.0),
            Err(Error::RegimeUnavailable(_))
        ));
    }
}
