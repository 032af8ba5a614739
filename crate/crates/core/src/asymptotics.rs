//! Closed-form constants and counting laws for the model resonance set:
//! the `γ` line integral, the model counting constant, the auxiliary count
//! `M(r; θ₁, θ₂)`, `B(θ)`, `c_n`, the integrated-count bound and the
//! `κ_λ` diagnostic.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model_ops::poisson_coeff;
use crate::phase::{rho, GammaCurve};
use crate::quad::{gauss_legendre, integrate, CompensatedSum};
use crate::resonance::{Resonance, ZeroKind, GAMMA_MIN_MODULUS};
use crate::spectrum::{weyl_constant, CrossSection};

const MAX_PANELS: usize = 4000;
/// Log-grid used to bracket the support of `[-Re ρ]_+` along a ray.
const RAY_SCAN_MIN: f64 = 1e-3;
const RAY_SCAN_MAX: f64 = 1e3;
const RAY_SCAN_POINTS: usize = 600;

fn check_tol(quad_tol: f64) -> Result<()> {
    if !(quad_tol > 1e-14 && quad_tol < 1e-2) {
        return Err(Error::InvalidArgument(format!("quad_tol = {quad_tol} outside (1e-14, 1e-2)")));
    }
    Ok(())
}

/// `∫ |ρ'(α)| / |α|^{n+1} |dα|` over the part of `γ` with `t ∈ [t_lo, t_hi]`.
/// Along `γ̃` the arclength element is `π/|ρ'| dt`, so the integrand is
/// `π |γ̃(t)|^{-(n+1)}`.
pub fn gamma_integral_window(n: usize, curve: &GammaCurve, t_lo: f64, t_hi: f64, quad_tol: f64) -> Result<f64> {
    check_tol(quad_tol)?;
    let p = n as i32 + 1;
    let r = integrate(
        |t| Ok(PI * curve.point_at(t)?.norm().powi(-p)),
        t_lo,
        t_hi,
        quad_tol * 1e-3,
        quad_tol,
        MAX_PANELS,
    )?;
    Ok(r.value)
}

/// `∫_γ |ρ'(α)| / |α|^{n+1} |dα|`.
pub fn gamma_integral(n: usize, curve: &GammaCurve, quad_tol: f64) -> Result<f64> {
    gamma_integral_window(n, curve, 0.0, curve.t_end(), quad_tol)
}

/// Same integral as a trapezoid sum in arclength over the traced samples.
pub fn gamma_integral_samples(n: usize, curve: &GammaCurve) -> f64 {
    let p = n as i32 + 1;
    let f = |a: Complex64| crate::phase::rho_prime(a).map_or(0.0, |d| d.norm()) / a.norm().powi(p);
    curve
        .samples
        .windows(2)
        .map(|w| 0.5 * (f(w[0].alpha) + f(w[1].alpha)) * (w[1].alpha - w[0].alpha).norm())
        .collect::<CompensatedSum>()
        .value()
}

/// The bracketed coefficient of the model counting law, split into the
/// non-trivial (curve) and trivial (real axis) contributions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConstant {
    pub nontrivial: f64,
    pub trivial: f64,
    pub total: f64,
}

/// `[(2nW_Σ/((n+1)π)) ∫_γ |ρ'|/|α|^{n+1} |dα| + (W_Σ/(n+1)) α₀^{-n}]`.
pub fn model_counting_constant(cs: &CrossSection, curve: &GammaCurve, quad_tol: f64) -> Result<ModelConstant> {
    let n = cs.dim_n;
    let nf = n as f64;
    let w = weyl_constant(cs);
    let nontrivial = 2.0 * nf * w / ((nf + 1.0) * PI) * gamma_integral(n, curve, quad_tol)?;
    let trivial = w / (nf + 1.0) * curve.alpha0.powi(-(n as i32));
    Ok(ModelConstant {
        nontrivial,
        trivial,
        total: nontrivial + trivial,
    })
}

fn theta_window(curve: &GammaCurve, theta1: f64, theta2: f64) -> Result<(f64, f64)> {
    if !(0.0 <= theta1 && theta1 <= theta2 && theta2 <= FRAC_PI_2) {
        return Err(Error::InvalidArgument(format!(
            "need 0 ≤ θ₁ ≤ θ₂ ≤ π/2, got [{theta1}, {theta2}]"
        )));
    }
    // θ decreases along the curve, so θ₂ maps to the smaller t.
    Ok((curve.t_at_theta(theta2)?, curve.t_at_theta(theta1)?))
}

/// Leading term of `M(r; θ₁, θ₂)`:
/// `(nW_Σ/((n+1)π)) r^{n+1} ∫_{γ|[θ₁,θ₂]} |ρ'|/|α|^{n+1} |dα|`.
pub fn aux_count_asymptotic(
    cs: &CrossSection,
    curve: &GammaCurve,
    theta1: f64,
    theta2: f64,
    r: f64,
    quad_tol: f64,
) -> Result<f64> {
    let (t_lo, t_hi) = theta_window(curve, theta1, theta2)?;
    if t_lo >= t_hi {
        return Ok(0.0);
    }
    let nf = cs.dim_n as f64;
    let integral = gamma_integral_window(cs.dim_n, curve, t_lo, t_hi, quad_tol)?;
    Ok(nf * weyl_constant(cs) / ((nf + 1.0) * PI) * r.powf(nf + 1.0) * integral)
}

/// Exact count of solutions `ν = λγ̃(t_m)`, `t_m = (m - 1/4)/λ`, of the seed
/// equation with `λt_m ∈ λ(t(θ₂), t(θ₁)]` and `|ν| ≤ r`, weighted by the
/// multiplicity of `λ`.
pub fn aux_count_empirical(cs: &CrossSection, curve: &GammaCurve, theta1: f64, theta2: f64, r: f64) -> Result<u64> {
    let (t_lo, t_hi) = theta_window(curve, theta1, theta2)?;
    let needed = r / GAMMA_MIN_MODULUS;
    if cs.cutoff < needed {
        return Err(Error::SpectrumInsufficient(format!(
            "points with |ν| ≤ {r} come from λ up to {needed:.3}, spectrum complete only to {}",
            cs.cutoff
        )));
    }
    let mut total = 0u64;
    for line in cs.lambdas.iter().filter(|l| l.lambda > 0.0 && l.lambda <= needed) {
        let lambda = line.lambda;
        // m - 1/4 ∈ (λ t_lo, λ t_hi]
        let m_min = (lambda * t_lo + 0.25).floor() as i64 + 1;
        let m_max = (lambda * t_hi + 0.25).floor() as i64;
        for m in m_min.max(1)..=m_max {
            let t = (m as f64 - 0.25) / lambda;
            if t <= t_lo || t > t_hi {
                continue;
            }
            if lambda * curve.point_at(t)?.norm() <= r {
                total += line.mult;
            }
        }
    }
    Ok(total)
}

/// `Re ρ(x e^{iθ}, 1)` for `θ ∈ [0, π/2]`.
pub fn re_rho_ray(theta: f64, x: f64) -> Result<f64> {
    Ok(rho(Complex64::from_polar(x, theta), 1.0)?.rho.re)
}

/// `∫₀^∞ [-Re ρ(x e^{i|θ|})]_+ x^{-(n+2)} dx`. The support is bracketed on a
/// logarithmic grid and the unbounded piece mapped to `(0, 1]` by `x = x₀/u`.
pub fn ray_integral(n: usize, theta: f64, quad_tol: f64) -> Result<f64> {
    check_tol(quad_tol)?;
    let theta = theta.abs();
    if theta > FRAC_PI_2 * (1.0 + 1e-15) {
        return Err(Error::InvalidArgument(format!("|θ| = {theta} exceeds π/2")));
    }
    let theta = theta.min(FRAC_PI_2);
    if theta == FRAC_PI_2 {
        // ρ is real and non-negative below i and purely imaginary above it.
        return Ok(0.0);
    }
    let p = n as i32 + 2;
    let f = |x: f64| -> Result<f64> { Ok((-re_rho_ray(theta, x)?).max(0.0) * x.powi(-p)) };
    let ratio = (RAY_SCAN_MAX / RAY_SCAN_MIN).powf(1.0 / (RAY_SCAN_POINTS - 1) as f64);
    let mut xs = Vec::with_capacity(RAY_SCAN_POINTS);
    let mut x = RAY_SCAN_MIN;
    for _ in 0..RAY_SCAN_POINTS {
        xs.push(x);
        x *= ratio;
    }
    let vals: Vec<f64> = xs.iter().map(|&x| re_rho_ray(theta, x)).collect::<Result<_>>()?;
    if vals[0] <= 0.0 {
        return Err(Error::InvariantViolation(format!(
            "Re ρ ≤ 0 at x = {RAY_SCAN_MIN} on the ray θ = {theta}"
        )));
    }
    // Sign changes, refined by bisection.
    let mut cuts = Vec::new();
    for i in 1..xs.len() {
        if (vals[i] < 0.0) != (vals[i - 1] < 0.0) {
            let (mut lo, mut hi) = (xs[i - 1], xs[i]);
            let lo_neg = vals[i - 1] < 0.0;
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if (re_rho_ray(theta, mid)? < 0.0) == lo_neg {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-15 * hi {
                    break;
                }
            }
            cuts.push(0.5 * (lo + hi));
        }
    }
    let tail_negative = *vals.last().unwrap() < 0.0;
    let mut acc = CompensatedSum::new();
    let mut k = 0;
    while k < cuts.len() {
        let a = cuts[k];
        if k + 1 < cuts.len() {
            let b = cuts[k + 1];
            acc.add(integrate(f, a, b, quad_tol * 1e-3, quad_tol, MAX_PANELS)?.value);
            k += 2;
        } else {
            if !tail_negative {
                return Err(Error::InvariantViolation("unpaired sign change on a ray".into()));
            }
            // ∫_a^∞ f(x) dx = ∫_0^1 f(a/u) a/u² du
            let g = |u: f64| -> Result<f64> {
                if u == 0.0 {
                    return Ok(0.0);
                }
                Ok(f(a / u)? * a / (u * u))
            };
            acc.add(integrate(g, 0.0, 1.0, quad_tol * 1e-3, quad_tol, MAX_PANELS)?.value);
            k += 1;
        }
    }
    Ok(acc.value())
}

/// `B(θ) = 2nW_Σ ∫₀^∞ [-Re ρ(x e^{i|θ|})]_+ / x^{n+2} dx`.
pub fn b_theta(cs: &CrossSection, theta: f64, quad_tol: f64) -> Result<f64> {
    let n = cs.dim_n;
    Ok(2.0 * n as f64 * weyl_constant(cs) * ray_integral(n, theta, quad_tol)?)
}

/// The three summands of `c_n` and their total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CnConstant {
    pub n: usize,
    /// `(2n/((n+1)π)) ∫_γ |ρ'|/|α|^{n+1} |dα|`
    pub gamma_term: f64,
    /// `α₀^{-n}/(n+1)`
    pub trivial_term: f64,
    /// `(n(n+1)/π) ∫_{-π/2}^{π/2} ∫₀^∞ [-Re ρ(x e^{i|θ|})]_+ / x^{n+2} dx dθ`
    pub region_term: f64,
    pub total: f64,
    pub quad_tol: f64,
}

/// `c_n`, with the double integral evaluated literally as nested adaptive
/// quadrature over `θ ∈ [-π/2, π/2]`.
pub fn c_n_constant(n: usize, curve: &GammaCurve, quad_tol: f64) -> Result<CnConstant> {
    check_tol(quad_tol)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let nf = n as f64;
    let gamma_term = 2.0 * nf / ((nf + 1.0) * PI) * gamma_integral(n, curve, quad_tol)?;
    let trivial_term = curve.alpha0.powi(-(n as i32)) / (nf + 1.0);
    let inner_tol = quad_tol * 0.1;
    let mut double = CompensatedSum::new();
    for (a, b) in [(-FRAC_PI_2, 0.0), (0.0, FRAC_PI_2)] {
        let r = integrate(|th| ray_integral(n, th, inner_tol), a, b, quad_tol * 1e-3, quad_tol, MAX_PANELS)?;
        double.add(r.value);
    }
    let region_term = nf * (nf + 1.0) / PI * double.value();
    Ok(CnConstant {
        n,
        gamma_term,
        trivial_term,
        region_term,
        total: gamma_term + trivial_term + region_term,
        quad_tol,
    })
}

/// Region term of `c_n` through `B(θ)` on a fixed composite Gauss–Legendre
/// grid in `θ`: `((n+1)/(2π W_Σ)) ∫ B(θ) dθ` with `W_Σ = 1`.
pub fn region_term_from_grid(n: usize, panels: usize, order: usize, quad_tol: f64) -> Result<f64> {
    let nf = n as f64;
    let half = gauss_legendre(|th| Ok(2.0 * nf * ray_integral(n, th, quad_tol)?), 0.0, FRAC_PI_2, panels, order)?;
    Ok((nf + 1.0) / (2.0 * PI) * 2.0 * half)
}

/// `[2W_K + c_n W_Σ] a^{n+1}`.
pub fn main_bound(a: f64, w_k: f64, cs: &CrossSection, c_n: f64) -> f64 {
    (2.0 * w_k + c_n * weyl_constant(cs)) * a.powi(cs.dim_n as i32 + 1)
}

/// `(n+1) ∫₀^a N(t)/t dt = (n+1) Σ_{|ν| ≤ a} weight · log(a/|ν|)`.
pub fn integrated_count(resonances: &[Resonance], n: usize, a: f64) -> f64 {
    let s: CompensatedSum = resonances
        .iter()
        .filter(|z| z.nu.norm() <= a)
        .map(|z| z.weight() as f64 * (a / z.nu.norm()).ln())
        .collect();
    (n as f64 + 1.0) * s.value()
}

/// `κ_λ(s)` with `κ² = |2s-n|² ∫_{x₂}^{x₁} x^{-(n+1)}|b_λ(n-s;x)|² dx
/// ∫_{x₃}^{x₂} x^{-(n+1)}|b_λ(s;x)|² dx`.
pub fn kappa_lambda(s: Complex64, lambda: f64, n: usize, x1: f64, x2: f64, x3: f64, quad_tol: f64) -> Result<f64> {
    check_tol(quad_tol)?;
    if !(0.0 < x3 && x3 < x2 && x2 < x1 && x1 <= 1.0) {
        return Err(Error::InvalidArgument(format!("need 0 < x₃ < x₂ < x₁ ≤ 1, got {x3}, {x2}, {x1}")));
    }
    let nf = n as f64;
    if s.re < nf / 2.0 {
        return Err(Error::InvalidArgument(format!("Re s = {} below n/2", s.re)));
    }
    let p = n as i32 + 1;
    let weighted = |sv: Complex64, a: f64, b: f64| -> Result<f64> {
        let r = integrate(
            |x| Ok(poisson_coeff(sv, lambda, n, x)?.norm_sqr() * x.powi(-p)),
            a,
            b,
            0.0,
            quad_tol,
            MAX_PANELS,
        )?;
        Ok(r.value)
    };
    let outer = weighted(Complex64::new(nf, 0.0) - s, x2, x1)?;
    let inner = weighted(s, x3, x2)?;
    Ok((2.0 * s - nf).norm() * (outer * inner).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BThetaSample {
    pub theta: f64,
    /// `B(θ)/W_Σ`.
    pub b_per_wsigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub n: usize,
    pub alpha0: f64,
    /// `|ρ(α₀) - iπα₀/2|`.
    pub alpha0_residual: f64,
    pub gamma_integral: f64,
    pub c_n: CnConstant,
    /// Model counting constant divided by `W_Σ`.
    pub model_constant_per_wsigma: f64,
    pub b_theta: Vec<BThetaSample>,
    pub quad_tol: f64,
}

pub fn constants_report(n: usize, curve: &GammaCurve, quad_tol: f64, theta_samples: usize) -> Result<ConstantsReport> {
    let nf = n as f64;
    let gi = gamma_integral(n, curve, quad_tol)?;
    let c_n = c_n_constant(n, curve, quad_tol)?;
    let a0 = curve.alpha0;
    let alpha0_residual = (rho(Complex64::new(a0, 0.0), 1.0)?.rho - Complex64::new(0.0, PI * a0 / 2.0)).norm();
    let b_theta = (0..theta_samples)
        .map(|k| {
            let theta = FRAC_PI_2 * k as f64 / (theta_samples.max(2) - 1) as f64;
            Ok(BThetaSample {
                theta,
                b_per_wsigma: 2.0 * nf * ray_integral(n, theta, quad_tol)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConstantsReport {
        n,
        alpha0: a0,
        alpha0_residual,
        gamma_integral: gi,
        c_n,
        model_constant_per_wsigma: 2.0 * nf / ((nf + 1.0) * PI) * gi + a0.powi(-(n as i32)) / (nf + 1.0),
        b_theta,
        quad_tol,
    })
}

impl ConstantsReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("quantity,value\n");
        let rows = [
            ("n", self.n as f64),
            ("alpha0", self.alpha0),
            ("alpha0_residual", self.alpha0_residual),
            ("gamma_integral", self.gamma_integral),
            ("c_n_gamma_term", self.c_n.gamma_term),
            ("c_n_trivial_term", self.c_n.trivial_term),
            ("c_n_region_term", self.c_n.region_term),
            ("c_n", self.c_n.total),
            ("model_constant_per_wsigma", self.model_constant_per_wsigma),
            ("quad_tol", self.quad_tol),
        ];
        for (k, v) in rows {
            let _ = writeln!(s, "{k},{v:?}");
        }
        for b in &self.b_theta {
            let _ = writeln!(s, "b_theta_per_wsigma({:?}),{:?}", b.theta, b.b_per_wsigma);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountingSample {
    pub r: f64,
    pub n_empirical: u64,
    pub n_trivial: u64,
    pub n_nontrivial: u64,
    pub n_asymptotic: f64,
    pub trivial_asymptotic: f64,
    pub nontrivial_asymptotic: f64,
    /// `n_empirical / n_asymptotic`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountingReport {
    pub cross_section: String,
    pub dim_n: usize,
    pub constant: ModelConstant,
    pub samples: Vec<CountingSample>,
}

/// Empirical counts against `constant · r^{n+1}` and its two parts.
pub fn counting_report(
    cs: &CrossSection,
    resonances: &[Resonance],
    radii: &[f64],
    curve: &GammaCurve,
    quad_tol: f64,
) -> Result<CountingReport> {
    let constant = model_counting_constant(cs, curve, quad_tol)?;
    let p = cs.dim_n as i32 + 1;
    let samples = radii
        .iter()
        .map(|&r| {
            let count = |kind: ZeroKind| -> u64 {
                resonances
                    .iter()
                    .filter(|z| z.kind == kind && z.nu.norm() <= r)
                    .map(Resonance::weight)
                    .sum()
            };
            let n_trivial = count(ZeroKind::Trivial);
            let n_nontrivial = count(ZeroKind::Nontrivial);
            let rp = r.powi(p);
            let n_asymptotic = constant.total * rp;
            CountingSample {
                r,
                n_empirical: n_trivial + n_nontrivial,
                n_trivial,
                n_nontrivial,
                n_asymptotic,
                trivial_asymptotic: constant.trivial * rp,
                nontrivial_asymptotic: constant.nontrivial * rp,
                ratio: (n_trivial + n_nontrivial) as f64 / n_asymptotic,
            }
        })
        .collect();
    Ok(CountingReport {
        cross_section: cs.label.clone(),
        dim_n: cs.dim_n,
        constant,
        samples,
    })
}

impl CountingReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "r,n_empirical,n_trivial,n_nontrivial,n_asymptotic,trivial_asymptotic,nontrivial_asymptotic,ratio\n",
        );
        for c in &self.samples {
            let _ = writeln!(
                s,
                "{:?},{},{},{},{:?},{:?},{:?},{:?}",
                c.r, c.n_empirical, c.n_trivial, c.n_nontrivial, c.n_asymptotic, c.trivial_asymptotic,
                c.nontrivial_asymptotic, c.ratio
            );
        }
        s
    }
}
