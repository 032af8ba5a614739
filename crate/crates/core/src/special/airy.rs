//! Complex Airy function `Ai(w)`.
//!
//! `|w| ≤ 9`: Maclaurin series summed in double-double, which absorbs the
//! `e^{(4/3)|w|^{3/2}}` cancellation on the positive real axis.
//! `|w| > 9`, `|arg w| ≤ 2π/3`: large-argument expansion, optimally truncated.
//! `|w| > 9`, `|arg w| > 2π/3`: connection formula
//! `Ai(w) = e^{iπ/3} Ai(e^{-2πi/3} w) + e^{-iπ/3} Ai(e^{-4πi/3} w)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{EvalResult, Regime};
use crate::dd::{CDd, Dd};
use crate::error::{Error, Result};

pub(crate) const SERIES_RADIUS: f64 = 9.0;
const MAX_MODULUS: f64 = 1e4;
const EXP_LIMIT: f64 = 700.0;
const EPS: f64 = f64::EPSILON;

/// Ai(0) and -Ai'(0) as double-double.
const AI0: Dd = Dd {
    hi: 0.355_028_053_887_817_2,
    lo: 2.052_336_324_362_12e-17,
};
const AIP0: Dd = Dd {
    hi: 0.258_819_403_792_806_8,
    lo: -2.522_243_111_610_832e-17,
};

/// `Ai(w) = mantissa · e^{-xi}` with `xi = (2/3) w^{3/2}` on the principal branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledAiry {
    pub mantissa: Complex64,
    pub xi: Complex64,
    pub regime: Regime,
    pub est_rel_error: f64,
}

impl ScaledAiry {
    /// Natural log of `Ai(w)` (any branch; only `exp` of it is meaningful).
    pub fn ln(&self) -> Complex64 {
        self.mantissa.ln() - self.xi
    }
}

fn xi_of(w: Complex64) -> Complex64 {
    w * w.sqrt() * (2.0 / 3.0)
}

fn div_real(a: CDd, d: f64) -> CDd {
    let d = Dd::new(d);
    CDd::new(a.re / d, a.im / d)
}

/// Maclaurin series `Ai = c1 f - c2 g` with relative error estimate.
fn maclaurin(w: Complex64) -> (Complex64, f64) {
    let wd = CDd::from_c64(w);
    let w3 = wd * wd * wd;
    let mut a = CDd::ONE;
    let mut b = wd;
    let mut f = a;
    let mut g = b;
    let mut abs_sum = AI0.hi + AIP0.hi * w.norm();
    let mut k = 1usize;
    loop {
        let kf = k as f64;
        a = div_real(a * w3, (3.0 * kf) * (3.0 * kf - 1.0));
        b = div_real(b * w3, (3.0 * kf + 1.0) * (3.0 * kf));
        f = f + a;
        g = g + b;
        let ta = AI0.hi * a.norm_f64();
        let tb = AIP0.hi * b.norm_f64();
        abs_sum += ta + tb;
        if kf > w.norm() && ta + tb < 1e-34 * abs_sum {
            break;
        }
        k += 1;
    }
    let c1 = CDd::new(AI0, Dd::ZERO);
    let c2 = CDd::new(AIP0, Dd::ZERO);
    let value = (c1 * f - c2 * g).to_c64();
    let rounding = 2f64.powi(-104) * (3.0 * k as f64 + 4.0) * abs_sum;
    let est = EPS + rounding / value.norm();
    (value, est)
}

/// Large-argument expansion for `|arg w| ≤ 2π/3`, returned in scaled form.
fn asymptotic(w: Complex64) -> ScaledAiry {
    let xi = xi_of(w);
    let inv = xi.inv();
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut last = 1.0f64;
    for k in 1..=60 {
        let kf = k as f64;
        // u_k / u_{k-1}
        let ratio = (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        let next = term * (-inv) * ratio;
        let size = next.norm();
        if size > last {
            break;
        }
        sum += next;
        term = next;
        last = size;
        if size < 1e-17 * sum.norm() {
            break;
        }
    }
    let mantissa = sum / (2.0 * PI.sqrt() * w.powf(0.25));
    ScaledAiry {
        mantissa,
        xi,
        regime: Regime::Asymptotic,
        est_rel_error: 4.0 * EPS + last / sum.norm(),
    }
}

fn scaled_upper(w: Complex64) -> ScaledAiry {
    let r = w.norm();
    if r <= SERIES_RADIUS {
        let (value, est) = maclaurin(w);
        let xi = xi_of(w);
        return ScaledAiry {
            mantissa: value * xi.exp(),
            xi,
            regime: Regime::Series,
            est_rel_error: est,
        };
    }
    let theta = w.arg();
    if theta <= 2.0 * PI / 3.0 {
        return asymptotic(w);
    }
    let w1 = Complex64::from_polar(r, theta - 2.0 * PI / 3.0);
    let w2 = Complex64::from_polar(r, theta - 4.0 * PI / 3.0);
    let a1 = asymptotic(w1);
    let a2 = asymptotic(w2);
    let xi = xi_of(w);
    let p1 = Complex64::from_polar(1.0, PI / 3.0) * a1.mantissa * (xi - a1.xi).exp();
    let p2 = Complex64::from_polar(1.0, -PI / 3.0) * a2.mantissa * (xi - a2.xi).exp();
    let mantissa = p1 + p2;
    let est = (p1.norm() * a1.est_rel_error + p2.norm() * a2.est_rel_error) / mantissa.norm()
        + 4.0 * EPS * (p1.norm() + p2.norm()) / mantissa.norm();
    ScaledAiry {
        mantissa,
        xi,
        regime: Regime::Connection,
        est_rel_error: est,
    }
}

fn validate(w: Complex64) -> Result<()> {
    if !(w.re.is_finite() && w.im.is_finite()) || w.norm() >= MAX_MODULUS {
        return Err(Error::InvalidArgument(format!(
            "Airy argument {w} must be finite with modulus below {MAX_MODULUS}"
        )));
    }
    Ok(())
}

/// `Ai(w)` as mantissa and exponent, never overflowing.
pub fn airy_ai_scaled(w: Complex64) -> Result<ScaledAiry> {
    validate(w)?;
    if w.im < 0.0 {
        let s = scaled_upper(w.conj());
        return Ok(ScaledAiry {
            mantissa: s.mantissa.conj(),
            xi: s.xi.conj(),
            ..s
        });
    }
    Ok(scaled_upper(w))
}

/// `Ai(w)` for `|w| < 10^4`.
pub fn airy_ai(w: Complex64) -> Result<EvalResult> {
    validate(w)?;
    let conj = w.im < 0.0;
    let wu = if conj { w.conj() } else { w };
    let (mut value, regime, est) = if wu.norm() <= SERIES_RADIUS {
        let (v, e) = maclaurin(wu);
        (v, Regime::Series, e)
    } else {
        let s = scaled_upper(wu);
        if -s.xi.re > EXP_LIMIT {
            return Err(Error::MagnitudeOverflow(format!(
                "Ai({w}) grows like e^{:.1}",
                -s.xi.re
            )));
        }
        (s.mantissa * (-s.xi).exp(), s.regime, s.est_rel_error)
    };
    if conj {
        value = value.conj();
    }
    if w.im == 0.0 {
        value.im = 0.0;
    }
    EvalResult::checked(value, regime, est)
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
    fn reference_values() {
        // Values from an arbitrary-precision evaluator.
        let cases = [
            (c(0.0, 0.0), c(0.355_028_053_887_817_24, 0.0)),
            (c(1.0, 0.0), c(0.135_292_416_312_881_42, 0.0)),
            (c(-5.0, 0.0), c(0.350_761_009_024_114_3, 0.0)),
            (c(8.5, 0.0), c(1.099_700_975_519_550_7e-8, 0.0)),
            (c(12.0, 0.0), c(1.393_184_688_875_360_8e-13, 0.0)),
            (c(-30.0, 0.0), c(-0.087_968_188_456_842_16, 0.0)),
            (c(3.0, 4.0), c(0.014_554_546_690_944_635, -0.047_435_251_515_492_836)),
            (c(-6.0, 2.0), c(-18.015_579_029_207_557, 16.558_336_557_727_268)),
            (c(9.5, -1.0), c(-5.769_726_301_102_09e-10, 1.862_728_565_795_705_3e-11)),
            (c(-20.0, 5.0), c(412_260_594.923_949_7, 591_916_170.980_650_3)),
            (c(30.0, 30.0), c(1.931_990_556_450_945_7e-32, -1.826_761_356_460_088_6e-32)),
        ];
        for (w, want) in cases {
            let got = airy_ai(w).unwrap();
            assert!(rel(got.value, want) < 1e-12, "w = {w}: {} vs {want}", got.value);
            assert!(got.est_rel_error < 1e-10, "w = {w}: est {}", got.est_rel_error);
        }
    }

    #[test]
    fn near_first_zero() {
        let v = airy_ai(c(-2.338, 0.0)).unwrap().value;
        assert!(v.norm() < 1e-2);
        assert!((v.re - 7.531_737_652_344_918e-5).abs() < 1e-15);
    }

    #[test]
    fn real_argument_gives_real_value() {
        for x in [-40.0, -9.5, -3.0, 0.5, 9.5, 50.0] {
            assert_eq!(airy_ai(c(x, 0.0)).unwrap().value.im, 0.0);
        }
    }

    #[test]
    fn seam_is_continuous() {
        for k in 0..24 {
            let th = -PI + (k as f64 + 0.5) * PI / 12.0;
            let inside = airy_ai(Complex64::from_polar(SERIES_RADIUS * (1.0 - 1e-12), th)).unwrap();
            let outside = airy_ai(Complex64::from_polar(SERIES_RADIUS * (1.0 + 1e-12), th)).unwrap();
            assert!(rel(inside.value, outside.value) < 1e-10, "theta = {th}");
        }
    }

    #[test]
    fn scaled_matches_unscaled() {
        for w in [c(2.0, 1.0), c(-12.0, 3.0), c(15.0, -7.0), c(-100.0, 0.0)] {
            let s = airy_ai_scaled(w).unwrap();
            let v = airy_ai(w).unwrap().value;
            assert!(rel(s.mantissa * (-s.xi).exp(), v) < 1e-13, "w = {w}");
        }
    }

    #[test]
    fn growth_sector_overflow_is_an_error() {
        assert!(matches!(airy_ai(c(-1000.0, 500.0)), Err(Error::MagnitudeOverflow(_))));
        assert!(airy_ai_scaled(c(-1000.0, 500.0)).is_ok());
        assert!(airy_ai(c(2e4, 0.0)).is_err());
    }
}
