//! Resonances of the model hyperbolic end `(0,1] × Σ` with metric
//! `(dx² + h)/x²`, computed as zeros of `ν ↦ I_{-ν}(λ)` over the square-root
//! eigenvalues `λ` of the cross-section, together with the closed-form
//! counting asymptotics they are tested against.

pub mod asymptotics;
pub mod dd;
pub mod error;
pub mod model_ops;
pub mod phase;
pub mod quad;
pub mod resonance;
pub mod spectrum;
pub mod special;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Complex scalar used throughout.
pub type ComplexValue = Complex64;
