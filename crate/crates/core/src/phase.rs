//! Phase functions of the uniform Bessel asymptotics and the level curve
//! `γ = {Re ρ = 0, Im ρ ≥ 0}`.
//!
//! `ρ(α, x) = √(α²+x²) + α log(ix / (α + √(α²+x²)))` on the closed first
//! quadrant of `α`. With the square root of a negative real taken as `+i√·`,
//! the principal branches of both the root and the logarithm are continuous
//! there, and `ρ` is real and positive on `[0, ix)`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SECTOR_TOL: f64 = 1e-12;
const TURNING_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseValue {
    pub rho: Complex64,
    /// `arg ρ` unwound into `[-π/4, 3π/2)`.
    pub rho_arg: f64,
    /// `(3ρ/2)^{2/3}` with `arg ζ = (2/3) rho_arg`.
    pub zeta: Complex64,
    pub alpha: Complex64,
    pub x: f64,
}

impl PhaseValue {
    pub fn zeta_arg(&self) -> f64 {
        self.rho_arg * (2.0 / 3.0)
    }

    pub fn zeta_abs(&self) -> f64 {
        (1.5 * self.rho.norm()).powf(2.0 / 3.0)
    }
}

fn sector_check(alpha: Complex64) -> Result<Complex64> {
    if !(alpha.re.is_finite() && alpha.im.is_finite()) {
        return Err(Error::InvalidArgument(format!("alpha = {alpha}")));
    }
    let tol = SECTOR_TOL * alpha.norm().max(1.0);
    if alpha.re < -tol || alpha.im < -tol {
        return Err(Error::BranchAmbiguity(format!(
            "alpha = {alpha} lies outside the closed first quadrant"
        )));
    }
    Ok(Complex64::new(alpha.re.max(0.0), alpha.im.max(0.0)))
}

/// `√(α² + x²)` continuous on the closed first quadrant.
fn root(alpha: Complex64, x2: f64) -> Complex64 {
    let q = alpha * alpha + x2;
    if q.im <= 0.0 && q.re < 0.0 {
        Complex64::new(0.0, (-q.re).sqrt())
    } else {
        q.sqrt()
    }
}

fn rho_raw(alpha: Complex64, x: f64) -> Complex64 {
    let s = root(alpha, x * x);
    let log = (Complex64::new(0.0, x) / (alpha + s)).ln();
    if alpha == Complex64::new(0.0, 0.0) {
        s
    } else {
        s + alpha * log
    }
}

fn unwind(rho: Complex64) -> f64 {
    let a = rho.arg();
    if a < -PI / 4.0 {
        a + 2.0 * PI
    } else {
        a
    }
}

/// `ρ(α, x)` and `ζ` for `arg α ∈ [0, π/2]`, `x > 0`.
pub fn rho(alpha: Complex64, x: f64) -> Result<PhaseValue> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::InvalidArgument(format!("x = {x} must be positive")));
    }
    let alpha = sector_check(alpha)?;
    let r = rho_raw(alpha, x);
    let rho_arg = unwind(r);
    let zeta = Complex64::from_polar((1.5 * r.norm()).powf(2.0 / 3.0), rho_arg * (2.0 / 3.0));
    Ok(PhaseValue {
        rho: r,
        rho_arg,
        zeta,
        alpha,
        x,
    })
}

/// `ψ(ν, λx) = λ ρ(ν/λ, x)`.
pub fn psi(nu: Complex64, lambda: f64, x: f64) -> Result<Complex64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("lambda = {lambda} must be positive")));
    }
    Ok(rho(nu / lambda, x)?.rho * lambda)
}

/// `dρ/dα` at `x = 1`, equal to `log(i / (α + √(α²+1)))`.
pub fn rho_prime(alpha: Complex64) -> Result<Complex64> {
    let alpha = sector_check(alpha)?;
    if (alpha - Complex64::i()).norm() < TURNING_TOL {
        return Err(Error::TurningPoint);
    }
    Ok(rho_prime_raw(alpha))
}

fn rho_prime_raw(alpha: Complex64) -> Complex64 {
    (Complex64::i() / (alpha + root(alpha, 1.0))).ln()
}

/// `Re ρ(a, 1)` for real `a ≥ 0`.
pub fn re_rho_real(a: f64) -> f64 {
    (1.0 + a * a).sqrt() - a * a.asinh()
}

/// Real endpoint `α₀` of `γ`: the root of `Re ρ(α, 1) = 0` in `[1, 2]`.
pub fn find_alpha0() -> f64 {
    let (mut lo, mut hi) = (1.0f64, 2.0f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if re_rho_real(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut a = 0.5 * (lo + hi);
    for _ in 0..3 {
        let step = re_rho_real(a) / (-a.asinh());
        a -= step;
        if step.abs() < 1e-16 {
            break;
        }
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaSample {
    pub t: f64,
    pub alpha: Complex64,
    pub theta: f64,
}

/// Samples of `γ̃(t)`, defined by `ρ(γ̃(t)) = iπt`, from `α = i` at `t = 0`
/// to `α = α₀` at `t = α₀/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaCurve {
    pub samples: Vec<GammaSample>,
    pub alpha0: f64,
    pub resolution: f64,
}

/// Leading behaviour of `γ̃` near `t = 0`: `ρ ≈ (2/3) i √(2i) η^{3/2}` with `η = α - i`.
fn local_seed(t: f64) -> Complex64 {
    let i = Complex64::i();
    let base = Complex64::new(3.0 * PI * t, 0.0) / (2.0 * (2.0 * i).sqrt());
    let r = base.norm().powf(2.0 / 3.0);
    let a = base.arg() * (2.0 / 3.0);
    let mut best = i;
    let mut best_err = f64::INFINITY;
    for k in 0..3 {
        let eta = Complex64::from_polar(r, a + 2.0 * PI * k as f64 / 3.0);
        let cand = i + eta;
        if cand.re <= 0.0 || cand.im < 0.0 {
            continue;
        }
        let err = (rho_raw(cand, 1.0) - i * PI * t).norm();
        if err < best_err {
            best_err = err;
            best = cand;
        }
    }
    best
}

/// Newton for `ρ(α) = iπt` starting at `alpha`.
fn correct(alpha: Complex64, t: f64) -> Option<Complex64> {
    let target = Complex64::new(0.0, PI * t);
    let clamp = |a: Complex64| Complex64::new(a.re.max(0.0), a.im.max(0.0));
    let mut a = clamp(alpha);
    let mut prev_step = f64::INFINITY;
    for k in 0..40 {
        let f = rho_raw(a, 1.0) - target;
        let d = rho_prime_raw(a);
        if d.norm() == 0.0 {
            return None;
        }
        let step = (f / d).norm();
        let next = clamp(a - f / d);
        if step <= 1e-15 * a.norm().max(1.0) {
            return Some(next);
        }
        // Rounding floor reached: steps stop shrinking while the residual is tiny.
        if k >= 3 && step >= 0.5 * prev_step && f.norm() < 1e-13 {
            return Some(a);
        }
        prev_step = step;
        a = next;
    }
    None
}

/// Trace `γ` with spatial step about `π · resolution`.
pub fn trace_gamma(resolution: f64) -> Result<GammaCurve> {
    if !(resolution > 1e-6 && resolution < 1e-1) {
        return Err(Error::InvalidArgument(format!(
            "resolution {resolution} outside (1e-6, 1e-1)"
        )));
    }
    let alpha0 = find_alpha0();
    let t_end = alpha0 / 2.0;
    let i = Complex64::i();
    let mut samples = vec![GammaSample {
        t: 0.0,
        alpha: i,
        theta: FRAC_PI_2,
    }];
    // First sample from the local series, where |η| ≈ resolution.
    let t1 = (2.0 * 2f64.sqrt() / (3.0 * PI)) * resolution.powf(1.5);
    let a1 = correct(local_seed(t1), t1).ok_or(Error::TraceDivergence { t: t1 })?;
    samples.push(GammaSample {
        t: t1,
        alpha: a1,
        theta: a1.arg(),
    });
    let mut t = t1;
    let mut alpha = a1;
    loop {
        let d = rho_prime_raw(alpha);
        let mut dt = resolution * d.norm().min(1.0);
        let last = t + dt >= t_end - 1e-3 * dt;
        if last {
            dt = t_end - t;
        }
        let slope = i * PI / d;
        let predicted = alpha + slope * dt;
        let next_t = t + dt;
        let next = correct(predicted, next_t).ok_or(Error::TraceDivergence { t: next_t })?;
        let jump = (next - predicted).norm();
        if jump > 0.5 * (slope * dt).norm() + 1e-12 {
            return Err(Error::TraceDivergence { t: next_t });
        }
        if last {
            if (next - alpha0).norm() > 1e-8 {
                return Err(Error::TraceDivergence { t: next_t });
            }
            samples.push(GammaSample {
                t: t_end,
                alpha: Complex64::new(alpha0, 0.0),
                theta: 0.0,
            });
            break;
        }
        samples.push(GammaSample {
            t: next_t,
            alpha: next,
            theta: next.arg(),
        });
        t = next_t;
        alpha = next;
    }
    Ok(GammaCurve {
        samples,
        alpha0,
        resolution,
    })
}

impl GammaCurve {
    pub fn t_end(&self) -> f64 {
        self.alpha0 / 2.0
    }

    /// Index `k` with `samples[k].t ≤ t ≤ samples[k+1].t`.
    fn bracket(&self, t: f64) -> usize {
        let k = self.samples.partition_point(|s| s.t <= t);
        k.clamp(1, self.samples.len() - 1) - 1
    }

    /// `γ̃(t)` for `t ∈ [0, α₀/2]`: cubic Hermite interpolation polished by Newton.
    pub fn point_at(&self, t: f64) -> Result<Complex64> {
        let t_end = self.t_end();
        if !(t >= 0.0 && t <= t_end * (1.0 + 1e-14)) {
            return Err(Error::InvalidArgument(format!("t = {t} outside [0, {t_end}]")));
        }
        if t == 0.0 {
            return Ok(Complex64::i());
        }
        if t >= t_end {
            return Ok(Complex64::new(self.alpha0, 0.0));
        }
        let k = self.bracket(t);
        let seed = if k == 0 {
            local_seed(t)
        } else {
            let (s0, s1) = (self.samples[k], self.samples[k + 1]);
            let h = s1.t - s0.t;
            let u = (t - s0.t) / h;
            let d0 = Complex64::i() * PI / rho_prime_raw(s0.alpha) * h;
            let d1 = Complex64::i() * PI / rho_prime_raw(s1.alpha) * h;
            let h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
            let h10 = u * (1.0 - u) * (1.0 - u);
            let h01 = u * u * (3.0 - 2.0 * u);
            let h11 = u * u * (u - 1.0);
            s0.alpha * h00 + d0 * h10 + s1.alpha * h01 + d1 * h11
        };
        correct(seed, t).ok_or(Error::TraceDivergence { t })
    }

    /// The parameter `t` at which `arg γ̃(t) = θ`, for `θ ∈ [0, π/2]`.
    pub fn t_at_theta(&self, theta: f64) -> Result<f64> {
        if !(0.0..=FRAC_PI_2).contains(&theta) {
            return Err(Error::InvalidArgument(format!("theta = {theta} outside [0, π/2]")));
        }
        if theta >= FRAC_PI_2 {
            return Ok(0.0);
        }
        if theta <= 0.0 {
            return Ok(self.t_end());
        }
        // θ decreases along the samples.
        let k = self.samples.partition_point(|s| s.theta > theta);
        let mut lo = self.samples[k.saturating_sub(1)].t;
        let mut hi = self.samples[k.min(self.samples.len() - 1)].t;
        for _ in 0..200 {
            if hi - lo <= 1e-15 * hi.max(1e-300) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if self.point_at(mid)?.arg() > theta {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// CSV with columns `t,re_alpha,im_alpha,theta`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,re_alpha,im_alpha,theta")?;
        for s in &self.samples {
            writeln!(out, "{:.17e},{:.17e},{:.17e},{:.17e}", s.t, s.alpha.re, s.alpha.im, s.theta)?;
        }
        Ok(())
    }
}
