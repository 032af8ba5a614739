//! Per-mode kernels of the model end: outgoing and boundary solutions of
//! the coefficient equation `(-(x∂ₓ)² + nx∂ₓ + λ²x² - s(n-s)) u = 0`, the
//! resolvent coefficients `a_λ`, Poisson coefficients `b_λ` and scattering
//! eigenvalues `[S₀(s)]_λ`. Throughout `ν = s - n/2`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{bessel_i, bessel_i_neg, bessel_i_series, bessel_k, log_gamma, rgamma};

/// Kernels refuse arguments closer than this to one of their poles.
pub const POLE_RADIUS: f64 = 1e-6;
/// Below this `|ν|` the `λ = 0` boundary solution takes its limiting value.
const CRITICAL_RADIUS: f64 = 1e-6;
/// Near integers the Gamma-weighted form is averaged over a circle.
const INTEGER_RADIUS: f64 = 1e-3;
const CIRCLE_RADIUS: f64 = 1e-2;
const CIRCLE_POINTS: usize = 8;

/// A kernel value with the parameters it was evaluated at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeCoefficient {
    pub s: Complex64,
    pub nu: Complex64,
    pub lambda: f64,
    pub n: usize,
    pub value: Complex64,
}

impl ModeCoefficient {
    pub fn new(s: Complex64, lambda: f64, n: usize, value: Complex64) -> Self {
        ModeCoefficient {
            s,
            nu: nu_of(s, n),
            lambda,
            n,
            value,
        }
    }
}

fn nu_of(s: Complex64, n: usize) -> Complex64 {
    s - n as f64 / 2.0
}

fn check(lambda: f64, x: f64) -> Result<()> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("λ = {lambda} must be non-negative")));
    }
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::InvalidArgument(format!("x = {x} outside (0, 1]")));
    }
    Ok(())
}

fn xpow(x: f64, p: Complex64) -> Complex64 {
    (p * x.ln()).exp()
}

/// `I_ν(z)` for any complex order, through the reflection identity when
/// `Re ν < 0` and the series is not accurate enough.
pub fn bessel_i_any(nu: Complex64, z: f64) -> Result<Complex64> {
    if nu.re >= 0.0 {
        return Ok(bessel_i(nu, z)?.value);
    }
    match bessel_i(nu, z) {
        Ok(v) if v.est_rel_error < 1e-10 => Ok(v.value),
        _ => Ok(bessel_i_neg(-nu, z)?.value),
    }
}

/// `u⁺_λ(s;x) = x^{n/2} I_ν(λx)`, and `x^s` for `λ = 0`.
pub fn outgoing_solution(s: Complex64, lambda: f64, n: usize, x: f64) -> Result<Complex64> {
    check(lambda, x)?;
    if lambda == 0.0 {
        return Ok(xpow(x, s));
    }
    Ok(bessel_i_any(nu_of(s, n), lambda * x)? * x.powf(n as f64 / 2.0))
}

fn boundary_zero_mode(s: Complex64, n: usize, x: f64) -> Complex64 {
    let nu = nu_of(s, n);
    let half = x.powf(n as f64 / 2.0);
    if nu.norm() < CRITICAL_RADIUS {
        return Complex64::new(-half * x.ln(), 0.0);
    }
    (xpow(x, Complex64::new(n as f64, 0.0) - s) - xpow(x, s)) / (2.0 * nu)
}

/// `u⁰_λ(s;x) = (Γ(ν)Γ(1-ν)/2) x^{n/2} [I_ν(λ)I_{-ν}(λx) - I_{-ν}(λ)I_ν(λx)]`,
/// evaluated as `x^{n/2} [I_ν(λ)K_ν(λx) - K_ν(λ)I_ν(λx)]`, which is the same
/// function with no removable singularity at integer `ν`.
/// For `λ = 0` it is `(x^{n-s} - x^s)/(2ν)`, and `-x^{n/2} log x` at `s = n/2`.
pub fn boundary_solution(s: Complex64, lambda: f64, n: usize, x: f64) -> Result<Complex64> {
    check(lambda, x)?;
    if lambda == 0.0 {
        return Ok(boundary_zero_mode(s, n, x));
    }
    if x == 1.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    // The bracket is even in ν; the Re ν ≥ 0 side avoids cancellation.
    let nu = nu_of(s, n);
    let nu = if nu.re < 0.0 { -nu } else { nu };
    let i1 = bessel_i_any(nu, lambda)?;
    let ix = bessel_i_any(nu, lambda * x)?;
    let k1 = bessel_k(nu, lambda)?.value;
    let kx = bessel_k(nu, lambda * x)?.value;
    Ok((i1 * kx - k1 * ix) * x.powf(n as f64 / 2.0))
}

fn gamma_weighted_bracket(nu: Complex64, lambda: f64, n: usize, x: f64) -> Result<Complex64> {
    let ip1 = bessel_i_series(nu, lambda)?;
    let im1 = bessel_i_series(-nu, lambda)?;
    let ipx = bessel_i_series(nu, lambda * x)?;
    let imx = bessel_i_series(-nu, lambda * x)?;
    // Γ(ν)Γ(1-ν) = π / sin πν
    let g = PI / (nu * PI).sin();
    Ok(g / 2.0 * x.powf(n as f64 / 2.0) * (ip1 * imx - im1 * ipx))
}

/// `u⁰_λ` from the literal `I_{±ν}` form; near integer `ν` the removable
/// singularity is bridged by the mean over a small circle.
pub fn boundary_solution_i_path(s: Complex64, lambda: f64, n: usize, x: f64) -> Result<Complex64> {
    check(lambda, x)?;
    if lambda == 0.0 {
        return Ok(boundary_zero_mode(s, n, x));
    }
    let nu = nu_of(s, n);
    let near = Complex64::new(nu.re - nu.re.round(), nu.im).norm() < INTEGER_RADIUS;
    if !near {
        return gamma_weighted_bracket(nu, lambda, n, x);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..CIRCLE_POINTS {
        let th = 2.0 * PI * (k as f64 + 0.5) / CIRCLE_POINTS as f64;
        acc += gamma_weighted_bracket(nu + Complex64::from_polar(CIRCLE_RADIUS, th), lambda, n, x)?;
    }
    Ok(acc / CIRCLE_POINTS as f64)
}

/// Distance estimate from `ν` to the nearest zero of `μ ↦ I_μ(λ)`, by one
/// Newton step. Only meaningful for `Re ν < 0`; `I_ν(λ) ≠ 0` for `Re ν ≥ 0`.
fn zero_distance(nu: Complex64, lambda: f64) -> Result<f64> {
    let f = bessel_i_any(nu, lambda)?;
    let h = 1e-5 * nu.norm().max(1.0);
    let d = (bessel_i_any(nu + h, lambda)? - bessel_i_any(nu - h, lambda)?) / (2.0 * h);
    Ok(if d.norm() == 0.0 { f64::INFINITY } else { f.norm() / d.norm() })
}

fn inverse_i(nu: Complex64, lambda: f64) -> Result<Complex64> {
    if nu.re < 0.0 {
        let d = zero_distance(nu, lambda)?;
        if d < POLE_RADIUS {
            return Err(Error::ResonanceProximity(format!(
                "I_ν({lambda}) vanishes within {d:.1e} of ν = {nu}"
            )));
        }
    }
    Ok(bessel_i_any(nu, lambda)?.inv())
}

/// `a_λ(s;x,x') = A_λ(s) u⁺(min(x,x')) u⁰(max(x,x'))` with `A_λ = 1/I_ν(λ)`
/// and `A₀ = 1`.
pub fn resolvent_coeff(s: Complex64, lambda: f64, n: usize, x: f64, xp: f64) -> Result<Complex64> {
    check(lambda, x)?;
    check(lambda, xp)?;
    let (lo, hi) = if x <= xp { (x, xp) } else { (xp, x) };
    let a = if lambda == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        inverse_i(nu_of(s, n), lambda)?
    };
    Ok(a * outgoing_solution(s, lambda, n, lo)? * boundary_solution(s, lambda, n, hi)?)
}

fn poisson_prefactor(nu: Complex64, lambda: f64) -> Complex64 {
    (nu * (lambda / 2.0).ln()).exp() * rgamma(nu + 1.0)
}

/// `b_λ(s;x) = ((λ/2)^ν/Γ(ν+1)) x^{n/2}[K_ν(λx) - (K_ν(λ)/I_ν(λ)) I_ν(λx)]`,
/// and `(x^{n-s} - x^s)/(2ν)` for `λ = 0`.
pub fn poisson_coeff(s: Complex64, lambda: f64, n: usize, x: f64) -> Result<Complex64> {
    check(lambda, x)?;
    if lambda == 0.0 {
        return Ok(boundary_zero_mode(s, n, x));
    }
    let nu = nu_of(s, n);
    Ok(poisson_prefactor(nu, lambda) * boundary_solution(s, lambda, n, x)? * inverse_i(nu, lambda)?)
}

/// `b_λ(s;x) = (1/Γ(ν+1)) (λ/2)^ν u⁰_λ(x)/I_ν(λ)` with `u⁰` in its `I_{±ν}` form.
pub fn poisson_coeff_i_path(s: Complex64, lambda: f64, n: usize, x: f64) -> Result<Complex64> {
    check(lambda, x)?;
    if lambda == 0.0 {
        return Ok(boundary_zero_mode(s, n, x));
    }
    let nu = nu_of(s, n);
    Ok(poisson_prefactor(nu, lambda) * boundary_solution_i_path(s, lambda, n, x)? * inverse_i(nu, lambda)?)
}

fn integer_distance(nu: Complex64) -> f64 {
    Complex64::new(nu.re - nu.re.round(), nu.im).norm()
}

/// `[S₀(s)]_λ = (λ/2)^{2ν} (Γ(-ν)/Γ(ν)) I_{-ν}(λ)/I_ν(λ)`, and `-1` for `λ = 0`.
pub fn scattering_eigenvalue(s: Complex64, lambda: f64, n: usize) -> Result<Complex64> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("λ = {lambda}")));
    }
    if lambda == 0.0 {
        return Ok(Complex64::new(-1.0, 0.0));
    }
    let nu = nu_of(s, n);
    if nu.re >= 0.5 && integer_distance(nu) < POLE_RADIUS {
        return Err(Error::PoleProximity(format!("Γ(-ν) pole near ν = {nu}")));
    }
    match scattering_direct(nu, lambda) {
        Ok(v) => Ok(v),
        Err(e) if nu.re >= 0.0 => Err(e),
        Err(_) => {
            // No regime for I_ν(λ) here: use [S₀(s)]_λ [S₀(n-s)]_λ = 1.
            let other = scattering_eigenvalue(Complex64::new(n as f64, 0.0) - s, lambda, n)?;
            if other.norm() < POLE_RADIUS {
                return Err(Error::PoleProximity(format!("[S₀(s)]_λ near a pole at s = {s}")));
            }
            Ok(other.inv())
        }
    }
}

/// `-F(-ν)/F(ν)` with `F(μ) = Γ(μ+1)(λ/2)^{-μ} I_μ(λ)`.
fn scattering_direct(nu: Complex64, lambda: f64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let l = (lambda / 2.0).ln();
    let ln_plus = log_gamma(one + nu).map_err(|_| Error::PoleProximity(format!("Γ(1+ν) pole near ν = {nu}")))?;
    let ln_minus = log_gamma(one - nu).map_err(|_| Error::PoleProximity(format!("Γ(1-ν) pole near ν = {nu}")))?;
    let f_plus = bessel_i_any(nu, lambda)? * (ln_plus - nu * l).exp();
    let f_minus = bessel_i_any(-nu, lambda)? * (ln_minus + nu * l).exp();
    Ok(-f_minus / f_plus)
}

/// `S̃₀(s) = (Γ(s-n/2)/Γ(n/2-s)) [S₀(s)]_λ = (λ/2)^{2ν} I_{-ν}(λ)/I_ν(λ)`;
/// for `λ = 0` it is `-Γ(ν)/Γ(-ν)`.
pub fn normalized_scattering_eigenvalue(s: Complex64, lambda: f64, n: usize) -> Result<Complex64> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("λ = {lambda}")));
    }
    let nu = nu_of(s, n);
    if lambda == 0.0 {
        if nu.re <= 0.5 && integer_distance(nu) < POLE_RADIUS {
            return Err(Error::PoleProximity(format!("Γ(ν) pole near ν = {nu}")));
        }
        let ln = log_gamma(nu)? - log_gamma(-nu).unwrap_or(Complex64::new(f64::INFINITY, 0.0));
        return Ok(-ln.exp());
    }
    if nu.re < 0.0 {
        let d = zero_distance(nu, lambda)?;
        if d < POLE_RADIUS {
            return Err(Error::PoleProximity(format!(
                "I_ν({lambda}) vanishes within {d:.1e} of ν = {nu}"
            )));
        }
    }
    let ip = bessel_i_any(nu, lambda)?;
    let im = bessel_i_any(-nu, lambda)?;
    Ok((2.0 * nu * (lambda / 2.0).ln()).exp() * im / ip)
}

/// `|L u| / scale` for the coefficient operator
/// `L = -(x∂ₓ)² + nx∂ₓ + λ²x² - s(n-s)`, by central differences in `log x`.
pub fn ode_residual<F>(u: F, s: Complex64, lambda: f64, n: usize, x: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let y = x.ln();
    let u0 = u(x)?;
    let diffs = |h: f64| -> Result<(Complex64, Complex64)> {
        let um = u((y - h).exp())?;
        let up = u((y + h).exp())?;
        Ok(((up - 2.0 * u0 + um) / (h * h), (up - um) / (2.0 * h)))
    };
    // Richardson step on h = 2e-3, 1e-3.
    let (a2, a1) = diffs(2e-3)?;
    let (b2, b1) = diffs(1e-3)?;
    let d2 = (4.0 * b2 - a2) / 3.0;
    let d1 = (4.0 * b1 - a1) / 3.0;
    let nf = n as f64;
    let c = s * (Complex64::new(nf, 0.0) - s);
    let terms = [-d2, nf * d1, lambda * lambda * x * x * u0, -c * u0];
    let scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
    let sum: Complex64 = terms.iter().sum();
    Ok(if scale == 0.0 { 0.0 } else { sum.norm() / scale })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_mode_closed_forms() {
        let s = c(1.3, 0.4);
        let x: f64 = 0.37;
        assert!((outgoing_solution(s, 0.0, 2, x).unwrap() - xpow(x, s)).norm() < 1e-15);
        let critical = boundary_solution(c(1.0, 0.0), 0.0, 2, x).unwrap();
        assert!((critical.re + x * x.ln()).abs() < 1e-15);
        let b = poisson_coeff(s, 0.0, 2, x).unwrap();
        let want = (xpow(x, c(2.0, 0.0) - s) - xpow(x, s)) / (2.0 * (s - 1.0));
        assert!((b - want).norm() < 1e-14);
        assert_eq!(scattering_eigenvalue(s, 0.0, 2).unwrap(), c(-1.0, 0.0));
    }

    #[test]
    fn boundary_condition_at_one() {
        for (s, lambda) in [(c(0.8, 2.0), 3.0), (c(2.5, -1.0), 7.5), (c(3.0, 0.0), 1.0)] {
            assert_eq!(boundary_solution(s, lambda, 1, 1.0).unwrap(), c(0.0, 0.0));
            assert!(boundary_solution_i_path(s, lambda, 1, 1.0).unwrap().norm() < 1e-12);
            assert_eq!(resolvent_coeff(s, lambda, 1, 1.0, 0.4).unwrap(), c(0.0, 0.0));
            assert_eq!(poisson_coeff(s, lambda, 1, 1.0).unwrap(), c(0.0, 0.0));
        }
    }

    #[test]
    fn half_integer_boundary_solution() {
        // ν = 1/2 (n = 1, s = 1): u⁰ = x^{1/2} [I K - K I] with
        // I_{1/2}(z) = √(2/(πz)) sinh z, K_{1/2}(z) = √(π/(2z)) e^{-z}.
        let lambda: f64 = 2.3;
        for x in [0.1f64, 0.45, 0.9] {
            let i = |z: f64| (2.0 / (PI * z)).sqrt() * z.sinh();
            let k = |z: f64| (PI / (2.0 * z)).sqrt() * (-z).exp();
            let want = x.sqrt() * (i(lambda) * k(lambda * x) - k(lambda) * i(lambda * x));
            let got = boundary_solution(c(1.0, 0.0), lambda, 1, x).unwrap();
            assert!((got - c(want, 0.0)).norm() < 1e-10 * want.abs(), "x = {x}");
            let alt = boundary_solution_i_path(c(1.0, 0.0), lambda, 1, x).unwrap();
            assert!((alt - c(want, 0.0)).norm() < 1e-10 * want.abs(), "x = {x}");
        }
    }

    #[test]
    fn small_x_outgoing_asymptotics() {
        let (s, lambda, n) = (c(1.7, 0.9), 4.0f64, 2);
        let nu = s - 1.0;
        let x = 1e-5;
        let lead = xpow(x, s) * (nu * (lambda / 2.0).ln()).exp() * rgamma(nu + 1.0);
        let v = outgoing_solution(s, lambda, n, x).unwrap();
        assert!((v / lead - 1.0).norm() < 1e-8);
    }

    #[test]
    fn ode_residuals() {
        for (s, lambda, n) in [
            (c(1.2, 3.0), 2.0, 1),
            (c(0.3, -1.5), 5.5, 2),
            (c(2.0, 0.0), 0.0, 3),
            (c(1.5, 0.0), 3.0, 3),
            (c(-1.6, -3.5), 0.74, 3),
        ] {
            for x in [0.15, 0.5, 0.8] {
                let rp = ode_residual(|y| outgoing_solution(s, lambda, n, y), s, lambda, n, x).unwrap();
                let r0 = ode_residual(|y| boundary_solution(s, lambda, n, y), s, lambda, n, x).unwrap();
                assert!(rp < 1e-6 && r0 < 1e-6, "s = {s}, λ = {lambda}, x = {x}: {rp:.1e} {r0:.1e}");
            }
        }
    }

    #[test]
    fn resolvent_symmetry_and_jump() {
        for (s, lambda, n) in [(c(1.4, 0.7), 3.0, 1), (c(1.9, -2.0), 1.5, 2), (c(1.2, 0.3), 0.0, 2)] {
            let a = resolvent_coeff(s, lambda, n, 0.3, 0.7).unwrap();
            let b = resolvent_coeff(s, lambda, n, 0.7, 0.3).unwrap();
            assert_eq!(a, b);
            // Jump of ∂ₓa across x = x' is -x'^{n-1}.
            let xp: f64 = 0.55;
            let h = 1e-5;
            let d = |x0: f64, x1: f64| {
                (resolvent_coeff(s, lambda, n, x1, xp).unwrap() - resolvent_coeff(s, lambda, n, x0, xp).unwrap())
                    / (x1 - x0)
            };
            let right = d(xp + h, xp + 2.0 * h) * 2.0 - d(xp + 2.0 * h, xp + 3.0 * h);
            let left = d(xp - h, xp) * 2.0 - d(xp - 2.0 * h, xp - h);
            let jump = right - left;
            let want = -xp.powi(n as i32 - 1);
            assert!((jump - want).norm() < 1e-5, "jump {jump} vs {want}");
        }
    }

    #[test]
    fn resolvent_difference_identity() {
        // a(s) - a(n-s) = -(2s-n) b(s;x) b(n-s;x') for x < x'.
        for (s, lambda, n) in [(c(1.2, 0.5), 0.0, 2), (c(1.3, 1.1), 2.5, 1), (c(2.2, -0.7), 4.0, 3)] {
            let ns = c(n as f64, 0.0) - s;
            let (x, xp) = (0.35, 0.8);
            let lhs = resolvent_coeff(s, lambda, n, x, xp).unwrap() - resolvent_coeff(ns, lambda, n, x, xp).unwrap();
            let rhs = -(2.0 * s - n as f64) * poisson_coeff(s, lambda, n, x).unwrap() * poisson_coeff(ns, lambda, n, xp).unwrap();
            assert!((lhs - rhs).norm() < 1e-8 * lhs.norm().max(1e-300), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn scattering_functional_equation_and_unitarity() {
        for (s, lambda, n) in [(c(1.3, 0.8), 2.0, 2), (c(0.2, 3.0), 5.0, 1), (c(2.6, -1.2), 9.0, 3)] {
            let a = scattering_eigenvalue(s, lambda, n).unwrap();
            let b = scattering_eigenvalue(c(n as f64, 0.0) - s, lambda, n).unwrap();
            assert!((a * b - 1.0).norm() < 1e-9, "{}", a * b);
            let conj = scattering_eigenvalue(s.conj(), lambda, n).unwrap();
            assert!((conj - a.conj()).norm() < 1e-10 * a.norm());
        }
        for tau in [0.3, 2.0, 7.5] {
            let v = scattering_eigenvalue(c(1.0, tau), 3.0, 2).unwrap();
            assert!((v.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn scattering_tends_to_minus_one() {
        let lambda = 1.5;
        let mut prev = f64::INFINITY;
        for m in [10.0, 20.0, 40.0, 80.0] {
            let v = scattering_eigenvalue(c(0.5 + m, 0.3 * m), lambda, 1).unwrap();
            let d = (v + 1.0).norm();
            assert!(d < prev);
            assert!(d * m < 2.0 * lambda * lambda);
            prev = d;
        }
    }

    #[test]
    fn poles_are_refused() {
        assert!(matches!(scattering_eigenvalue(c(3.0, 0.0), 2.0, 2), Err(Error::PoleProximity(_))));
        // Conformal points s = n/2 - k stay regular after normalization.
        assert!(normalized_scattering_eigenvalue(c(-1.0, 0.0), 2.0, 2).unwrap().norm().is_finite());
    }

    #[test]
    fn poisson_two_paths() {
        for (s, lambda, n) in [(c(1.3, 0.4), 2.0, 2), (c(0.9, 2.5), 4.0, 1), (c(2.0, 0.0), 3.0, 2), (c(1.5, 0.0), 3.0, 1)] {
            for x in [0.2, 0.6] {
                let a = poisson_coeff(s, lambda, n, x).unwrap();
                let b = poisson_coeff_i_path(s, lambda, n, x).unwrap();
                assert!((a - b).norm() < 1e-9 * a.norm(), "s = {s}, x = {x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn normalized_scattering_has_poles_at_resonances() {
        let curve = crate::phase::trace_gamma(1e-3).unwrap();
        let lambda = 3.0;
        for z in crate::resonance::zeros_for_lambda(lambda, 6.0, &curve).unwrap() {
            let s = c(1.0, 0.0) - z.nu;
            let near = normalized_scattering_eigenvalue(s + 1e-4, lambda, 2).unwrap().norm();
            let nearer = normalized_scattering_eigenvalue(s + 1e-5, lambda, 2).unwrap().norm();
            // A simple pole: |value| grows like 1/distance.
            assert!((nearer / near - 10.0).abs() < 0.1, "ν = {}: {near:e} {nearer:e}", z.nu);
            let conj = normalized_scattering_eigenvalue(s.conj() + 1e-4, lambda, 2).unwrap();
            let direct = normalized_scattering_eigenvalue(s + 1e-4, lambda, 2).unwrap();
            assert!((conj - direct.conj()).norm() < 1e-9 * direct.norm());
        }
    }
}
