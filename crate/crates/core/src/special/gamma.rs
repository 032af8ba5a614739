//! Complex log-Gamma on the principal branch (the continuation of the real
//! `ln Γ` from the positive axis, cut along the negative real axis).

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

const LN_PI: f64 = 1.144_729_885_849_400_2;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// B_{2k} / (2k (2k-1)) for k = 1..=10.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

const STIRLING_MIN_RE: f64 = 8.0;
const POLE_TOL: f64 = 1e-12;

/// `exp(z) - 1` without cancellation for small `|z|`.
fn expm1(z: Complex64) -> Complex64 {
    let (s, c) = z.im.sin_cos();
    let half = (0.5 * z.im).sin();
    Complex64::new(
        z.re.exp_m1() * c - 2.0 * half * half,
        z.re.exp() * s,
    )
}

/// `log sin(πz)` for `Im z ≥ 0`, continuous in the closed upper half-plane
/// and real on `(0, 1)`.
pub(crate) fn log_sin_pi_upper(z: Complex64) -> Complex64 {
    debug_assert!(z.im >= 0.0);
    let i = Complex64::i();
    // e^{2πiz} is invariant under integer shifts; reduce for accuracy.
    let reduced = Complex64::new(z.re - z.re.round(), z.im);
    let one_minus_q = -expm1(2.0 * PI * i * reduced);
    -i * PI * z + i * (PI / 2.0) - LN_2 + one_minus_q.ln()
}

fn stirling(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut corr = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING {
        corr += p * c;
        p *= inv2;
    }
    (z - 0.5) * z.ln() - z + HALF_LN_2PI + corr
}

/// Principal-branch `ln Γ(z)`.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidArgument(format!("log_gamma({z})")));
    }
    let nearest = z.re.round();
    if nearest <= 0.0 && (z - nearest).norm() < POLE_TOL {
        return Err(Error::PoleProximity(format!(
            "Gamma pole at {nearest}, argument {z}"
        )));
    }
    Ok(log_gamma_unchecked(z))
}

pub(crate) fn log_gamma_unchecked(z: Complex64) -> Complex64 {
    if z.im < 0.0 {
        return log_gamma_unchecked(z.conj()).conj();
    }
    if z.re < 0.5 {
        // Reflection: Γ(z)Γ(1-z) = π / sin(πz).
        return LN_PI - log_sin_pi_upper(z) - log_gamma_unchecked(Complex64::new(1.0, 0.0) - z);
    }
    let shift = (STIRLING_MIN_RE - z.re).ceil().max(0.0) as usize;
    // ln Π (z+k): modulus from a single log, argument as a sum of arguments.
    let mut prod = Complex64::new(1.0, 0.0);
    let mut arg = 0.0;
    for k in 0..shift {
        let f = z + k as f64;
        prod *= f;
        arg += f.arg();
    }
    stirling(z + shift as f64) - Complex64::new(prod.norm().ln(), arg)
}

/// `Γ(z)`.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    Ok(log_gamma(z)?.exp())
}

/// `1/Γ(z)`, entire: returns exactly zero at the poles of Γ.
pub fn rgamma(z: Complex64) -> Complex64 {
    let nearest = z.re.round();
    if nearest <= 0.0 && z.im == 0.0 && z.re == nearest {
        return Complex64::new(0.0, 0.0);
    }
    (-log_gamma_unchecked(z)).exp()
}

/// Real `ln Γ(x)` for `x > 0`.
pub fn ln_gamma_real(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    log_gamma_unchecked(Complex64::new(x, 0.0)).re
}
