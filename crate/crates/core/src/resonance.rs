//! Model resonance set: per spectral value `λ`, the zeros of `ν ↦ I_{-ν}(λ)`
//! with `Re ν > 0`, found by seeding on the scaled curve `λγ`, Newton
//! refinement, a real sign scan for trivial zeros, and certified by the
//! argument principle.
//!
//! The objective is `G(ν) = I_{-ν}(λ) / I_ν(λ)`, held in log form. `I_ν(λ)`
//! has no zeros for `Re ν ≥ 0`, so `G` has exactly the zeros of `I_{-ν}(λ)`
//! there and never overflows. At a zero the two summands of the reflection
//! identity cancel, so `|G|` is the residual relative to the local scale.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::GammaCurve;
use crate::spectrum::CrossSection;
use crate::special::{bessel_i, bessel_k, series_detail};

/// Distance from the imaginary axis of the contour's left edge.
pub const AXIS_OFFSET: f64 = 1e-3;
/// Zeros closer than this are the same zero.
pub const DEDUP_TOL: f64 = 1e-6;
/// Accepted `|G|` at a refined zero.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// `|Im ν|` below this is read as a real zero.
pub const REAL_TOL: f64 = 1e-8;
const NEWTON_MAX: usize = 20;
const NEWTON_STEP_TOL: f64 = 1e-10;
const FD_STEP: f64 = 1e-5;
/// Grid spacing of the real sign scan.
const SCAN_STEP: f64 = 1.0 / 16.0;
/// Contour segments whose phase moves more than this are split.
const MAX_PHASE_STEP: f64 = PI / 4.0;
const CONTOUR_BUDGET: usize = 200_000;
/// Contours are kept at least this far from known zeros.
const CONTOUR_CLEARANCE: f64 = 0.05;
/// Minimal `|γ̃(t)|` over the curve, rounded down.
pub const GAMMA_MIN_MODULUS: f64 = 0.857;
const QUADTREE_MIN_SIZE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroKind {
    Trivial,
    Nontrivial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    /// Canonical representative with `Im ν ≥ 0`.
    pub nu: Complex64,
    /// `s = n/2 - ν`; zeros refined without a cross-section use `n = 0`.
    pub s: Complex64,
    pub lambda: f64,
    pub mult_lambda: u64,
    pub kind: ZeroKind,
    /// `|I_{-ν}(λ)| / |I_ν(λ)|` at `nu`.
    pub residual: f64,
    pub conjugate_pair: bool,
    /// Multiplicity of the zero itself (1 unless Newton stalls).
    pub order: u32,
    /// For a real zero, `ν - m` with `m` the nearest integer. It is kept
    /// separately because it can be far below the spacing of doubles at `m`.
    pub integer_offset: Option<f64>,
}

impl Resonance {
    /// Number of resonances this entry stands for.
    pub fn weight(&self) -> u64 {
        self.mult_lambda * self.order as u64 * if self.conjugate_pair { 2 } else { 1 }
    }
}

/// Rectangle `[re_min, re_max] × [im_min, im_max]` in the `ν`-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Rect> {
        if !(re_min < re_max && im_min < im_max) || ![re_min, re_max, im_min, im_max].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "rectangle [{re_min}, {re_max}] × [{im_min}, {im_max}]"
            )));
        }
        Ok(Rect {
            re_min,
            re_max,
            im_min,
            im_max,
        })
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re > self.re_min && z.re < self.re_max && z.im > self.im_min && z.im < self.im_max
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifiedRegion {
    pub rect: Rect,
    pub lambda: f64,
    pub winding_count: i64,
    pub zeros_inside: Vec<Resonance>,
}

/// `ln G(ν)` together with the estimated relative error of `G`.
#[derive(Debug, Clone, Copy)]
struct Objective {
    ln: Complex64,
    est: f64,
}

fn objective(lambda: f64, nu: Complex64) -> Result<Objective> {
    let minus = series_detail(-nu, lambda)?;
    let plus = series_detail(nu, lambda)?;
    if plus.sum == Complex64::new(0.0, 0.0) {
        return Err(Error::InvariantViolation(format!("I_ν({lambda}) vanished at ν = {nu}")));
    }
    if minus.sum == Complex64::new(0.0, 0.0) {
        return Ok(Objective {
            ln: Complex64::new(f64::NEG_INFINITY, 0.0),
            est: 0.0,
        });
    }
    Ok(Objective {
        ln: minus.ln() - plus.ln(),
        est: minus.est_rel_error + plus.est_rel_error,
    })
}

/// `G(ν) = I_{-ν}(λ) / I_ν(λ)` for `Re ν ≥ 0`.
pub fn ratio(lambda: f64, nu: Complex64) -> Result<Complex64> {
    let o = objective(lambda, nu)?;
    if o.ln.re > 700.0 {
        return Err(Error::MagnitudeOverflow(format!("|G| ≈ e^{:.1}", o.ln.re)));
    }
    Ok(o.ln.exp())
}

/// Residual `|I_{-ν}(λ)| / |I_ν(λ)|`.
pub fn residual(lambda: f64, nu: Complex64) -> Result<f64> {
    Ok(objective(lambda, nu)?.ln.re.exp())
}

fn canonical(nu: Complex64) -> Complex64 {
    if nu.im.abs() < REAL_TOL {
        Complex64::new(nu.re, 0.0)
    } else if nu.im < 0.0 {
        nu.conj()
    } else {
        nu
    }
}

/// Newton step `G/G'` with `G'` from a central difference.
fn newton_step(lambda: f64, nu: Complex64) -> Result<(Complex64, f64)> {
    let h = FD_STEP * nu.norm().max(1.0);
    let o = objective(lambda, nu)?;
    if o.ln.re == f64::NEG_INFINITY {
        return Ok((Complex64::new(0.0, 0.0), 0.0));
    }
    let up = objective(lambda, nu + h)?;
    let down = objective(lambda, nu - h)?;
    // G'/G from ratios of logs, so nothing overflows.
    let d = ((up.ln - o.ln).exp() - (down.ln - o.ln).exp()) / (2.0 * h);
    if !(d.re.is_finite() && d.im.is_finite()) || d.norm() == 0.0 {
        return Err(Error::NoConvergence {
            seed: format!("{nu} (degenerate derivative)"),
        });
    }
    Ok((d.inv(), o.ln.re.exp()))
}

fn build(lambda: f64, nu: Complex64, residual: f64, kind: ZeroKind) -> Resonance {
    Resonance {
        nu,
        s: -nu,
        lambda,
        mult_lambda: 1,
        kind,
        residual,
        conjugate_pair: nu.im > 0.0,
        order: 1,
        integer_offset: None,
    }
}

fn classify(nu: Complex64) -> Result<ZeroKind> {
    if nu.re <= DEDUP_TOL {
        return Err(Error::ImaginaryAxisZero(format!("{nu}")));
    }
    Ok(if nu.im == 0.0 {
        ZeroKind::Trivial
    } else {
        ZeroKind::Nontrivial
    })
}

fn newton(lambda: f64, seed: Complex64, basin: f64) -> Result<Complex64> {
    let mut nu = seed;
    for _ in 0..NEWTON_MAX {
        let (step, _) = newton_step(lambda, nu)?;
        nu -= step;
        if (nu - seed).norm() > basin {
            return Err(Error::EscapedBasin { seed: format!("{seed}") });
        }
        if nu.re < -1.0 {
            return Err(Error::EscapedBasin { seed: format!("{seed}") });
        }
        if step.norm() < NEWTON_STEP_TOL * nu.norm().max(1.0) {
            return Ok(nu);
        }
    }
    Err(Error::NoConvergence { seed: format!("{seed}") })
}

/// Basin radius around an asymptotic seed.
pub fn basin_radius(lambda: f64) -> f64 {
    (2.0 * lambda.cbrt()).max(1.0)
}

/// Newton refinement of a zero of `I_{-ν}(λ)` from `seed`, canonicalized to
/// `Im ν ≥ 0`. The residual is scale-free, `|I_{-ν}(λ)| / |I_ν(λ)|`.
pub fn refine_zero(lambda: f64, seed: Complex64) -> Result<Resonance> {
    refine_within(lambda, seed, basin_radius(lambda))
}

fn refine_within(lambda: f64, seed: Complex64, basin: f64) -> Result<Resonance> {
    if !(lambda > 0.0) || seed.norm() == 0.0 {
        return Err(Error::InvalidArgument(format!("refine_zero(λ = {lambda}, seed = {seed})")));
    }
    let seed = if seed.re < 0.0 { -seed } else { seed };
    let nu = canonical(newton(lambda, seed, basin)?);
    let res = residual(lambda, nu)?;
    if !(res < RESIDUAL_TOL) {
        return Err(Error::NoConvergence {
            seed: format!("{seed} (residual {res:.2e})"),
        });
    }
    let kind = classify(nu)?;
    Ok(build(lambda, nu, res, kind))
}

/// Asymptotic seeds `λ γ̃((m - 1/4)/λ)` for `m ≥ 1`, `(m - 1/4)/λ ≤ α₀/2`,
/// kept when `|ν| ≤ r_max + margin`.
pub fn seed_nontrivial(lambda: f64, r_max: f64, curve: &GammaCurve) -> Result<Vec<Complex64>> {
    if !(lambda > 0.0 && r_max > 0.0) {
        return Err(Error::InvalidArgument(format!("λ = {lambda}, r_max = {r_max}")));
    }
    let margin = basin_radius(lambda);
    let t_end = curve.t_end();
    let mut out = Vec::new();
    let mut m = 1usize;
    loop {
        let t = (m as f64 - 0.25) / lambda;
        if t > t_end {
            break;
        }
        let nu = curve.point_at(t)? * lambda;
        if nu.norm() <= r_max + margin {
            out.push(nu);
        }
        m += 1;
    }
    Ok(out)
}

/// Real `G` on the real axis.
fn real_g(lambda: f64, nu: f64) -> Result<f64> {
    let o = objective(lambda, Complex64::new(nu, 0.0))?;
    if o.ln.re == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    // The imaginary part of ln G is a multiple of π on the real axis.
    let sign = if o.ln.im.rem_euclid(2.0 * PI).cos() >= 0.0 { 1.0 } else { -1.0 };
    Ok(sign * o.ln.re.exp().min(f64::MAX))
}

fn bisect_real(lambda: f64, mut lo: f64, mut hi: f64, mut g_lo: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < 1e-13 * mid.max(1.0) {
            break;
        }
        let g = real_g(lambda, mid)?;
        if g == 0.0 {
            return Ok(mid);
        }
        if (g > 0.0) == (g_lo > 0.0) {
            lo = mid;
            g_lo = g;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `ln K_m(λ)` for an integer `m ≥ 0` by upward recurrence, rescaled as it runs.
fn ln_bessel_k_int(m: u64, lambda: f64) -> Result<f64> {
    let mut a = bessel_k(Complex64::new(0.0, 0.0), lambda)?.value.re;
    if m == 0 {
        return Ok(a.ln());
    }
    let mut b = bessel_k(Complex64::new(1.0, 0.0), lambda)?.value.re;
    let mut scale = 0.0;
    for k in 1..m {
        let c = a + 2.0 * k as f64 / lambda * b;
        a = b;
        b = c;
        if b > 1e200 {
            scale += b.ln();
            a /= b;
            b = 1.0;
        }
    }
    Ok(b.ln() + scale)
}

/// A real zero next to an integer `m` written as `m + δ`, where
/// `sin πδ = (-1)^{m+1} (π/2) I_{m+δ}(λ) / K_{m+δ}(λ)`, with its residual
/// `|I_{-ν}(λ)| / |I_ν(λ)|` evaluated in the same split form.
/// `None` when `approx` is not close enough to an integer for this to pay.
fn near_integer_zero(lambda: f64, approx: f64) -> Result<Option<(f64, f64, f64)>> {
    let m = approx.round();
    if m < 1.0 || (approx - m).abs() > 1e-4 {
        return Ok(None);
    }
    let sign = if m as u64 % 2 == 0 { -1.0 } else { 1.0 };
    let ln_i = series_detail(Complex64::new(m, 0.0), lambda)?.ln().re;
    let ln_k = ln_bessel_k_int(m as u64, lambda)?;
    let mut delta = sign * (ln_i - ln_k - 2f64.ln()).exp();
    let mut ln_q = ln_k - ln_i;
    if delta.abs() > 1e-12 {
        for _ in 0..8 {
            let nu = Complex64::new(m + delta, 0.0);
            let q = bessel_k(nu, lambda)?.value.re / bessel_i(nu, lambda)?.value.re;
            let next = (sign * 0.5 * PI / q).asin() / PI;
            ln_q = q.ln();
            let done = (next - delta).abs() <= 1e-15 * delta.abs();
            delta = next;
            if done {
                break;
            }
        }
    }
    if delta == 0.0 || !delta.is_finite() {
        return Ok(None);
    }
    // I_{-ν}/I_ν = 1 + (2/π) sin(πν) K_ν/I_ν with sin πν = (-1)^m sin πδ.
    let t = -sign * (2.0 / PI) * (PI * delta).sin().signum() * ((PI * delta).sin().abs().ln() + ln_q).exp();
    Ok(Some((m, delta, (1.0 + t).abs())))
}

/// Real zeros of `I_{-ν}(λ)` in `(0, r_max]`: sign scan on a fine grid, then
/// bisection and a Newton polish. Real zeros of both families are returned;
/// away from the transition band all of them sit near integers.
pub fn find_real_zeros(lambda: f64, r_max: f64) -> Result<Vec<Resonance>> {
    if !(lambda > 0.0 && r_max > 0.0) {
        return Err(Error::InvalidArgument(format!("λ = {lambda}, r_max = {r_max}")));
    }
    let steps = (r_max / SCAN_STEP).ceil() as usize;
    let mut out = Vec::new();
    // I_{-ν}(λ) > 0 on [0, 1) so the scan may start at the first grid point.
    let mut prev_x = SCAN_STEP;
    let mut prev_g = real_g(lambda, prev_x)?;
    for i in 2..=steps {
        let x = (i as f64 * SCAN_STEP).min(r_max);
        let g = real_g(lambda, x)?;
        if (g > 0.0) != (prev_g > 0.0) || g == 0.0 {
            let root = bisect_real(lambda, prev_x, x, prev_g)?;
            let polished = refine_within(lambda, Complex64::new(root, 0.0), SCAN_STEP)
                .map(|r| r.nu)
                .unwrap_or(Complex64::new(root, 0.0));
            let approx = if polished.im == 0.0 { polished.re } else { root };
            let (nu, offset, res) = match near_integer_zero(lambda, approx)? {
                Some((m, delta, res)) => (Complex64::new(m + delta, 0.0), delta, res),
                None => {
                    let nu = Complex64::new(approx, 0.0);
                    (nu, approx - approx.round(), residual(lambda, nu)?)
                }
            };
            if offset == 0.0 {
                return Err(Error::InvariantViolation(format!("zero at integer order {}", nu.re)));
            }
            let mut z = build(lambda, nu, res, ZeroKind::Trivial);
            z.integer_offset = Some(offset);
            out.push(z);
        }
        prev_x = x;
        prev_g = g;
    }
    Ok(out)
}

/// Trivial zeros: real zeros bracketed by `[m - 1/2, m + 1/2]` for integers
/// `max(1, λα₀(1-ε)) ≤ m ≤ r_max`, `ε = 0.05`.
pub fn find_trivial(lambda: f64, r_max: f64, alpha0: f64) -> Result<Vec<Resonance>> {
    if !(r_max >= 1.0) {
        return Err(Error::InvalidArgument(format!("r_max = {r_max} must be ≥ 1")));
    }
    let start = (lambda * alpha0 * 0.95).max(1.0).ceil();
    let lo = start - 0.5;
    Ok(find_real_zeros(lambda, r_max + 0.5)?
        .into_iter()
        .filter(|z| z.nu.re >= lo && z.nu.re <= r_max + 0.5)
        .collect())
}

/// `ln G` and its derivative at a contour node.
#[derive(Debug, Clone, Copy)]
struct Node {
    z: Complex64,
    ln: Complex64,
    dln: Complex64,
}

fn node(lambda: f64, z: Complex64) -> Result<Node> {
    let o = objective(lambda, z)?;
    if o.ln.re == f64::NEG_INFINITY || o.est > 1e-3 {
        return Err(Error::BoundaryTooClose(format!("G unresolved at {z}")));
    }
    let h = 1e-6 * z.norm().max(1.0);
    let up = objective(lambda, z + h)?;
    let down = objective(lambda, z - h)?;
    let diff = up.ln - down.ln;
    let dln = Complex64::new(diff.re, wrap(diff.im)) / (2.0 * h);
    if !(dln.re.is_finite() && dln.im.is_finite()) {
        return Err(Error::BoundaryTooClose(format!("log-derivative unresolved at {z}")));
    }
    Ok(Node { z, ln: o.ln, dln })
}

/// Change of `arg G` along a polyline. Each accepted segment has a phase
/// step below `MAX_PHASE_STEP` both by endpoint difference and by the
/// log-derivative at either end, so no full turn can hide between nodes.
fn phase_change(lambda: f64, path: &[Complex64], budget: &mut usize) -> Result<f64> {
    let mut total = 0.0;
    let mut a = node(lambda, path[0])?;
    for &z in &path[1..] {
        let b = node(lambda, z)?;
        total += segment_phase(lambda, a, b, budget, 0)?;
        a = b;
    }
    Ok(total)
}

fn wrap(d: f64) -> f64 {
    let r = (d + PI).rem_euclid(2.0 * PI) - PI;
    if r == -PI {
        PI
    } else {
        r
    }
}

fn segment_phase(lambda: f64, a: Node, b: Node, budget: &mut usize, depth: usize) -> Result<f64> {
    let dz = b.z - a.z;
    let d = wrap(b.ln.im - a.ln.im);
    let predicted = (0.5 * (a.dln + b.dln) * dz).im;
    let smooth = a.dln.norm() * dz.norm() < MAX_PHASE_STEP
        && b.dln.norm() * dz.norm() < MAX_PHASE_STEP
        && (d - predicted).abs() < 0.1;
    if smooth {
        return Ok(d);
    }
    if depth > 50 || dz.norm() < 1e-10 * a.z.norm().max(1.0) {
        return Err(Error::BoundaryTooClose(format!("phase unresolved near {}", a.z)));
    }
    *budget = budget.checked_sub(1).ok_or_else(|| {
        Error::BudgetExceeded(format!("contour needs more than {CONTOUR_BUDGET} evaluations"))
    })?;
    let m = node(lambda, a.z + 0.5 * dz)?;
    Ok(segment_phase(lambda, a, m, budget, depth + 1)? + segment_phase(lambda, m, b, budget, depth + 1)?)
}

fn polyline(points: &[Complex64], pieces: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(points.len() * pieces);
    for w in points.windows(2) {
        for k in 0..pieces {
            out.push(w[0] + (w[1] - w[0]) * (k as f64 / pieces as f64));
        }
    }
    out.push(*points.last().unwrap());
    out
}

fn winding_to_count(total: f64, full_turns: f64) -> Result<i64> {
    let n = total / full_turns;
    let r = n.round();
    if (n - r).abs() > 1e-6 {
        return Err(Error::BoundaryTooClose(format!("non-integer winding {n}")));
    }
    Ok(r as i64)
}

/// Number of zeros of `I_{-ν}(λ)` in an open rectangle of the right half-plane.
/// A rectangle symmetric about the real axis is traced on its upper half only.
pub fn winding_number(lambda: f64, rect: &Rect) -> Result<i64> {
    if rect.re_min < 0.0 {
        return Err(Error::InvalidArgument("rectangle must lie in Re ν ≥ 0".into()));
    }
    let mut budget = CONTOUR_BUDGET;
    let symmetric = (rect.im_min + rect.im_max).abs() < 1e-15;
    if symmetric {
        let h = rect.im_max;
        let path = polyline(
            &[
                Complex64::new(rect.re_max, 0.0),
                Complex64::new(rect.re_max, h),
                Complex64::new(rect.re_min, h),
                Complex64::new(rect.re_min, 0.0),
            ],
            8,
        );
        return winding_to_count(phase_change(lambda, &path, &mut budget)?, PI);
    }
    let c = rect.corners();
    let path = polyline(&[c[0], c[1], c[2], c[3], c[0]], 8);
    winding_to_count(phase_change(lambda, &path, &mut budget)?, 2.0 * PI)
}

/// Number of zeros (with conjugates) in `{|ν| < radius, Re ν > AXIS_OFFSET}`,
/// from the upper half of the contour and conjugation symmetry.
pub fn count_in_half_disc(lambda: f64, radius: f64) -> Result<i64> {
    if !(radius > 2.0 * AXIS_OFFSET) {
        return Err(Error::InvalidArgument(format!("radius {radius}")));
    }
    let top = (radius * radius - AXIS_OFFSET * AXIS_OFFSET).sqrt();
    let end = top.atan2(AXIS_OFFSET);
    let arc_pieces = ((radius * end).ceil() as usize).max(8);
    let mut path: Vec<Complex64> = (0..=arc_pieces)
        .map(|k| Complex64::from_polar(radius, end * k as f64 / arc_pieces as f64))
        .collect();
    let seg_pieces = (top.ceil() as usize).max(8);
    for k in 1..=seg_pieces {
        path.push(Complex64::new(AXIS_OFFSET, top * (1.0 - k as f64 / seg_pieces as f64)));
    }
    let mut budget = CONTOUR_BUDGET;
    winding_to_count(phase_change(lambda, &path, &mut budget)?, PI)
}

/// Argument-principle certificate for a rectangle in the open upper half
/// plane: its winding number and the zeros inside, found by subdivision.
pub fn certify(lambda: f64, rect: &Rect) -> Result<CertifiedRegion> {
    if rect.re_min < 0.0 || rect.im_min <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "certification rectangle must lie in Re ν ≥ 0, Im ν > 0: {rect:?}"
        )));
    }
    let count = winding_number(lambda, rect)?;
    let zeros = quadtree(lambda, rect, count, 0)?;
    Ok(CertifiedRegion {
        rect: *rect,
        lambda,
        winding_count: count,
        zeros_inside: zeros,
    })
}

/// Zeros inside an upper half-plane `rect` known to hold `count` of them.
fn quadtree(lambda: f64, rect: &Rect, count: i64, depth: usize) -> Result<Vec<Resonance>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if count < 0 {
        return Err(Error::InvariantViolation(format!("negative winding {count} on {rect:?}")));
    }
    let w = rect.re_max - rect.re_min;
    let h = rect.im_max - rect.im_min;
    let centre = Complex64::new(rect.re_min + 0.5 * w, rect.im_min + 0.5 * h);
    let small = w.max(h) < QUADTREE_MIN_SIZE;
    if count == 1 || small {
        if let Ok(mut z) = refine_within(lambda, centre, w.hypot(h)) {
            if rect.contains(z.nu) {
                z.order = count as u32;
                return Ok(vec![z]);
            }
        }
        if small {
            return Err(Error::NoConvergence {
                seed: format!("{centre} (cell of size {:.1e} holding {count} zeros)", w.max(h)),
            });
        }
    }
    // Split near the middle; a cut through a zero is retried off-centre.
    for shift in [0.0, 0.0371, -0.0533, 0.1127] {
        let xm = rect.re_min + (0.5 + shift) * w;
        let ym = rect.im_min + (0.5 - shift) * h;
        let cells = [
            Rect { re_min: rect.re_min, re_max: xm, im_min: rect.im_min, im_max: ym },
            Rect { re_min: xm, re_max: rect.re_max, im_min: rect.im_min, im_max: ym },
            Rect { re_min: rect.re_min, re_max: xm, im_min: ym, im_max: rect.im_max },
            Rect { re_min: xm, re_max: rect.re_max, im_min: ym, im_max: rect.im_max },
        ];
        let counts: Result<Vec<i64>> = cells.iter().map(|c| winding_number(lambda, c)).collect();
        let counts = match counts {
            Ok(c) => c,
            Err(Error::BoundaryTooClose(_)) => continue,
            Err(e) => return Err(e),
        };
        if counts.iter().sum::<i64>() != count {
            continue;
        }
        let mut out = Vec::new();
        for (cell, &c) in cells.iter().zip(&counts) {
            out.extend(quadtree(lambda, cell, c, depth + 1)?);
        }
        return Ok(out);
    }
    Err(Error::BoundaryTooClose(format!("no clean subdivision of {rect:?}")))
}

/// Zeros of `I_{-ν}(λ)` for one `λ` with `|ν| ≤ r_max`, certified by the
/// winding number on a half-disc of radius slightly above `r_max`.
pub fn zeros_for_lambda(lambda: f64, r_max: f64, curve: &GammaCurve) -> Result<Vec<Resonance>> {
    let mut radius = r_max + 0.25;
    let mut zeros = collect_candidates(lambda, radius + CONTOUR_CLEARANCE + 0.5, curve)?;
    // Keep the contour clear of every zero found so far.
    for _ in 0..50 {
        if zeros.iter().all(|z| (z.nu.norm() - radius).abs() >= CONTOUR_CLEARANCE) {
            break;
        }
        radius += 0.1;
    }
    if radius > r_max + 5.0 + CONTOUR_CLEARANCE {
        zeros = collect_candidates(lambda, radius + CONTOUR_CLEARANCE + 0.5, curve)?;
    }
    let weight = |zs: &[Resonance]| -> i64 {
        zs.iter()
            .filter(|z| z.nu.norm() < radius)
            .map(|z| z.order as i64 * if z.conjugate_pair { 2 } else { 1 })
            .sum()
    };
    let count = count_in_half_disc(lambda, radius)?;
    if weight(&zeros) != count {
        log::info!(
            "λ = {lambda}: winding {count}, seeded search found {}; subdividing",
            weight(&zeros)
        );
        let rect = Rect {
            re_min: AXIS_OFFSET,
            re_max: radius,
            im_min: QUADTREE_FLOOR,
            im_max: radius,
        };
        let inner = winding_number(lambda, &rect)?;
        for z in quadtree(lambda, &rect, inner, 0)? {
            insert_unique(&mut zeros, z);
        }
        if weight(&zeros) != count {
            return Err(Error::InvariantViolation(format!(
                "λ = {lambda}: winding {count} on radius {radius}, {} zeros located",
                weight(&zeros)
            )));
        }
    }
    zeros.retain(|z| z.nu.norm() <= r_max);
    zeros.sort_by(|a, b| a.nu.im.total_cmp(&b.nu.im).then(a.nu.re.total_cmp(&b.nu.re)));
    Ok(zeros)
}

/// Cells of the fallback search start this far above the real axis.
const QUADTREE_FLOOR: f64 = 1e-4;

fn insert_unique(zeros: &mut Vec<Resonance>, z: Resonance) {
    if zeros.iter().all(|o| (o.nu - z.nu).norm() >= DEDUP_TOL) {
        zeros.push(z);
    }
}

fn collect_candidates(lambda: f64, reach: f64, curve: &GammaCurve) -> Result<Vec<Resonance>> {
    let mut zeros = find_real_zeros(lambda, reach)?;
    for seed in seed_nontrivial(lambda, reach, curve)? {
        match refine_zero(lambda, seed) {
            Ok(z) => insert_unique(&mut zeros, z),
            Err(Error::ImaginaryAxisZero(s)) => return Err(Error::ImaginaryAxisZero(s)),
            Err(e) => log::debug!("λ = {lambda}: seed {seed} rejected: {e}"),
        }
    }
    Ok(zeros)
}

/// Smallest `λ` that must be present for every zero with `|ν| ≤ r_max`.
pub fn required_cutoff(r_max: f64) -> f64 {
    (r_max + 1.0) / GAMMA_MIN_MODULUS
}

/// The model resonance set up to `|ν| ≤ r_max`: union over `λ > 0` of the
/// certified zeros, tagged with the multiplicity of `λ`, in ascending
/// `(λ, Im ν, Re ν)` order.
pub fn resonance_set(cs: &CrossSection, r_max: f64, curve: &GammaCurve) -> Result<Vec<Resonance>> {
    if !(r_max > 0.0 && r_max.is_finite()) {
        return Err(Error::InvalidArgument(format!("r_max = {r_max}")));
    }
    let needed = required_cutoff(r_max);
    if cs.cutoff < needed {
        return Err(Error::SpectrumInsufficient(format!(
            "zeros with |ν| ≤ {r_max} come from λ up to {needed:.3}, spectrum complete only to {}",
            cs.cutoff
        )));
    }
    let half_n = cs.dim_n as f64 / 2.0;
    let lines: Vec<_> = cs
        .lambdas
        .iter()
        .filter(|l| l.lambda > 0.0 && l.lambda <= needed)
        .copied()
        .collect();
    let per_line: Result<Vec<Vec<Resonance>>> = lines
        .par_iter()
        .map(|line| {
            let zs = zeros_for_lambda(line.lambda, r_max, curve)?;
            Ok(zs
                .into_iter()
                .map(|mut z| {
                    z.mult_lambda = line.mult;
                    z.s = Complex64::new(half_n, 0.0) - z.nu;
                    z
                })
                .collect())
        })
        .collect();
    Ok(per_line?.into_iter().flatten().collect())
}

/// Weighted count `Σ weight` over resonances with `|ν| ≤ r`.
pub fn counting_function(resonances: &[Resonance], r: f64) -> u64 {
    resonances.iter().filter(|z| z.nu.norm() <= r).map(Resonance::weight).sum()
}

/// CSV with columns `lambda, mult, re_nu, im_nu, re_s, im_s, kind, residual, conjugate_pair`.
pub fn resonances_to_csv(resonances: &[Resonance]) -> String {
    let mut s = String::from("lambda,mult,re_nu,im_nu,re_s,im_s,kind,residual,conjugate_pair\n");
    for z in resonances {
        let kind = match z.kind {
            ZeroKind::Trivial => "trivial",
            ZeroKind::Nontrivial => "nontrivial",
        };
        let _ = writeln!(
            s,
            "{:?},{},{:?},{:?},{:?},{:?},{},{:e},{}",
            z.lambda,
            z.mult_lambda * z.order as u64,
            z.nu.re,
            z.nu.im,
            z.s.re,
            z.s.im,
            kind,
            z.residual,
            z.conjugate_pair
        );
    }
    s
}
