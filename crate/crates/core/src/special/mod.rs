//! Special functions on the paths the resonance computation needs: the
//! complex Airy function, modified Bessel functions of complex order and
//! positive real argument, and the complex log-Gamma function.

mod airy;
mod bessel;
mod gamma;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use airy::{airy_ai, airy_ai_scaled, ScaledAiry};
pub use bessel::{
    bessel_i, bessel_i_neg, bessel_i_series, bessel_i_uniform, bessel_k,
    bessel_k_uniform, SeriesValue, SERIES_NU_MAX, SERIES_Z_MAX, UNIFORM_ERROR_CONSTANT,
};
pub(crate) use bessel::series_detail;
pub use gamma::{gamma, ln_gamma_real, log_gamma, rgamma};

/// Which formula produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// Convergent power series (Bessel or Airy Maclaurin).
    Series,
    /// Uniform Airy-type asymptotics away from the turning point.
    UniformAiry,
    /// Uniform Airy-type asymptotics with `|ψ| < 1`.
    TurningPoint,
    /// Assembled through `I_{-ν} = I_ν + (2 sin πν / π) K_ν`.
    Reflection,
    /// Large-argument Airy expansion.
    Asymptotic,
    /// Airy connection formula across the sectors.
    Connection,
    /// Trapezoidal rule on `K_ν(z) = ∫ e^{-z cosh t} cosh νt dt`.
    Integral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub value: Complex64,
    pub regime: Regime,
    pub est_rel_error: f64,
}

impl EvalResult {
    pub(crate) fn checked(value: Complex64, regime: Regime, est: f64) -> crate::Result<Self> {
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(crate::Error::MagnitudeOverflow(format!(
                "{regime:?} value is not finite"
            )));
        }
        if !(est <= 1.0) {
            return Err(crate::Error::CatastrophicCancellation { est });
        }
        Ok(EvalResult {
            value,
            regime,
            est_rel_error: est.max(0.0),
        })
    }
}
