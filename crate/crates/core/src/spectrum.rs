//! Spectral data of the cross-section `(Σ, h)`: square roots `λ` of the
//! Laplace eigenvalues with multiplicities.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::ln_gamma_real;

/// Eigenvalues closer than this are merged into one line.
pub const MERGE_TOL: f64 = 1e-10;
/// Cap on enumerated lattice vectors for flat tori.
pub const TORUS_BUDGET: usize = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralLine {
    pub lambda: f64,
    pub mult: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossSection {
    pub dim_n: usize,
    pub volume: f64,
    pub lambdas: Vec<SpectralLine>,
    /// Largest `λ` up to which the list is complete.
    pub cutoff: f64,
    pub label: String,
}

/// `W_Σ = Vol(Σ) / ((4π)^{n/2} Γ(n/2 + 1))`.
pub fn weyl_constant(cs: &CrossSection) -> f64 {
    let n = cs.dim_n as f64;
    cs.volume / ((4.0 * PI).powf(n / 2.0) * ln_gamma_real(n / 2.0 + 1.0).exp())
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r as u64
}

/// Unit round `Sⁿ`: `λ_l = √(l(l+n-1))` with the dimension of degree-`l`
/// spherical harmonics as multiplicity, for `l = 0..=l_max`.
pub fn sphere_spectrum(n: usize, l_max: usize) -> Result<CrossSection> {
    if n == 0 || l_max == 0 {
        return Err(Error::InvalidArgument(format!(
            "sphere needs n ≥ 1 and l_max ≥ 1 (got n = {n}, l_max = {l_max})"
        )));
    }
    let nn = n as u64;
    let lambdas: Vec<SpectralLine> = (0..=l_max as u64)
        .map(|l| {
            let mult = binomial(l + nn, nn) - if l >= 2 { binomial(l + nn - 2, nn) } else { 0 };
            SpectralLine {
                lambda: ((l * (l + nn - 1)) as f64).sqrt(),
                mult,
            }
        })
        .collect();
    let np1 = (n + 1) as f64;
    let volume = 2.0 * PI.powf(np1 / 2.0) / ln_gamma_real(np1 / 2.0).exp();
    let cutoff = lambdas.last().map_or(0.0, |l| l.lambda);
    Ok(CrossSection {
        dim_n: n,
        volume,
        lambdas,
        cutoff,
        label: format!("sphere S^{n}"),
    })
}

/// Merge a sorted list of `λ` values into lines.
fn merge_sorted(values: &[f64]) -> Vec<SpectralLine> {
    let mut out: Vec<SpectralLine> = Vec::new();
    let mut anchor = f64::NEG_INFINITY;
    for &v in values {
        match out.last_mut() {
            Some(last) if v - anchor <= MERGE_TOL => last.mult += 1,
            _ => {
                anchor = v;
                out.push(SpectralLine { lambda: v, mult: 1 });
            }
        }
    }
    out
}

/// Flat torus `∏ ℝ/(L_i ℤ)`: all `λ = 2π |(k_i / L_i)|` up to `cutoff`.
pub fn torus_spectrum(lengths: &[f64], cutoff: f64) -> Result<CrossSection> {
    if lengths.is_empty() || lengths.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
        return Err(Error::InvalidArgument(format!("torus lengths {lengths:?}")));
    }
    if !(cutoff > 0.0 && cutoff.is_finite()) {
        return Err(Error::InvalidArgument(format!("cutoff {cutoff}")));
    }
    let freqs: Vec<f64> = lengths.iter().map(|l| 2.0 * PI / l).collect();
    // Lattice points in the ellipsoid, estimated by its volume plus the box.
    let expected: f64 = freqs.iter().map(|w| 2.0 * cutoff / w + 1.0).product();
    if expected > TORUS_BUDGET as f64 * 4.0 {
        return Err(Error::CutoffTooLarge(format!(
            "about {expected:.3e} lattice vectors in the box for cutoff {cutoff}"
        )));
    }
    let r2 = cutoff * cutoff * (1.0 + 1e-12);
    let mut sq = Vec::new();
    fn walk(freqs: &[f64], rem: f64, acc: f64, out: &mut Vec<f64>, budget: usize) -> Result<()> {
        match freqs.split_first() {
            None => {
                if out.len() >= budget {
                    return Err(Error::CutoffTooLarge(format!("more than {budget} lattice vectors")));
                }
                out.push(acc);
                Ok(())
            }
            Some((&w, rest)) => {
                let kmax = (rem.sqrt() / w).floor() as i64;
                for k in -kmax..=kmax {
                    let e = (k as f64 * w).powi(2);
                    if e <= rem {
                        walk(rest, rem - e, acc + e, out, budget)?;
                    }
                }
                Ok(())
            }
        }
    }
    walk(&freqs, r2, 0.0, &mut sq, TORUS_BUDGET)?;
    let mut values: Vec<f64> = sq.into_iter().map(f64::sqrt).collect();
    values.sort_by(f64::total_cmp);
    let volume = lengths.iter().product();
    Ok(CrossSection {
        dim_n: lengths.len(),
        volume,
        lambdas: merge_sorted(&values),
        cutoff,
        label: format!("torus {lengths:?}"),
    })
}

/// Circle of length `2π`: `λ = k` with multiplicity 2 for `k ≥ 1`.
pub fn circle_spectrum(cutoff: f64) -> Result<CrossSection> {
    let mut cs = torus_spectrum(&[2.0 * PI], cutoff)?;
    cs.label = "circle".to_string();
    Ok(cs)
}

impl CrossSection {
    /// `N_h(r) = Σ_{λ ≤ r} mult`.
    pub fn counting(&self, r: f64) -> u64 {
        self.lambdas.iter().take_while(|l| l.lambda <= r).map(|l| l.mult).sum()
    }

    /// Spectrum of `c·h`: `λ ↦ λ/√c`, `Vol ↦ c^{n/2} Vol`.
    pub fn with_metric_scaled(&self, c: f64) -> Result<CrossSection> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidArgument(format!("metric scale {c}")));
        }
        let s = c.sqrt();
        Ok(CrossSection {
            dim_n: self.dim_n,
            volume: self.volume * c.powf(self.dim_n as f64 / 2.0),
            lambdas: self
                .lambdas
                .iter()
                .map(|l| SpectralLine {
                    lambda: l.lambda / s,
                    mult: l.mult,
                })
                .collect(),
            cutoff: self.cutoff / s,
            label: format!("{} scaled by {c}", self.label),
        })
    }

    /// Truncate to `λ ≤ cutoff`.
    pub fn truncated(&self, cutoff: f64) -> CrossSection {
        CrossSection {
            lambdas: self.lambdas.iter().copied().filter(|l| l.lambda <= cutoff).collect(),
            cutoff: cutoff.min(self.cutoff),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim_n == 0 {
            return Err(Error::InvariantViolation("dimension must be positive".into()));
        }
        if !(self.volume > 0.0 && self.volume.is_finite()) {
            return Err(Error::InvariantViolation(format!("volume {}", self.volume)));
        }
        match self.lambdas.first() {
            Some(l) if l.lambda == 0.0 => {}
            _ => return Err(Error::InvariantViolation("λ = 0 is missing".into())),
        }
        for w in self.lambdas.windows(2) {
            if !(w[1].lambda > w[0].lambda) {
                return Err(Error::InvariantViolation(format!(
                    "λ values not strictly increasing at {}",
                    w[1].lambda
                )));
            }
        }
        if self.lambdas.iter().any(|l| l.mult == 0 || !l.lambda.is_finite()) {
            return Err(Error::InvariantViolation("zero multiplicity or non-finite λ".into()));
        }
        Ok(())
    }

    /// CSV text: metadata comments, header `lambda,mult`, one row per line.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "#dim={}", self.dim_n);
        let _ = writeln!(s, "#volume={:?}", self.volume);
        let _ = writeln!(s, "#cutoff={:?}", self.cutoff);
        let _ = writeln!(s, "#label={}", self.label);
        s.push_str("lambda,mult\n");
        for l in &self.lambdas {
            let _ = writeln!(s, "{:?},{}", l.lambda, l.mult);
        }
        s
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn from_csv(text: &str) -> Result<CrossSection> {
        let mut dim = None;
        let mut volume = None;
        let mut cutoff = None;
        let mut label = String::from("file");
        let mut header = false;
        let mut rows: Vec<(f64, u64)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: line_no, msg };
            if let Some(meta) = line.strip_prefix('#') {
                let (key, value) = meta
                    .split_once('=')
                    .ok_or_else(|| perr(format!("metadata without '=': {line}")))?;
                let value = value.trim();
                match key.trim() {
                    "dim" => dim = Some(value.parse::<usize>().map_err(|e| perr(format!("dim: {e}")))?),
                    "volume" => volume = Some(value.parse::<f64>().map_err(|e| perr(format!("volume: {e}")))?),
                    "cutoff" => cutoff = Some(value.parse::<f64>().map_err(|e| perr(format!("cutoff: {e}")))?),
                    "label" => label = value.to_string(),
                    _ => {}
                }
                continue;
            }
            if !header {
                let cols: Vec<&str> = line.split(',').map(str::trim).collect();
                if cols != ["lambda", "mult"] {
                    return Err(perr(format!("expected header 'lambda,mult', found '{line}'")));
                }
                header = true;
                continue;
            }
            let (a, b) = line
                .split_once(',')
                .ok_or_else(|| perr(format!("expected two columns: {line}")))?;
            let lambda: f64 = a.trim().parse().map_err(|e| perr(format!("lambda: {e}")))?;
            let mult: i64 = b.trim().parse().map_err(|e| perr(format!("mult: {e}")))?;
            if mult <= 0 {
                return Err(Error::InvariantViolation(format!(
                    "line {line_no}: multiplicity {mult} must be positive"
                )));
            }
            if !(lambda >= 0.0 && lambda.is_finite()) {
                return Err(Error::InvariantViolation(format!("line {line_no}: λ = {lambda}")));
            }
            rows.push((lambda, mult as u64));
        }
        if !header {
            return Err(Error::Parse {
                line: 0,
                msg: "missing 'lambda,mult' header".into(),
            });
        }
        let dim = dim.ok_or(Error::Parse {
            line: 0,
            msg: "missing #dim".into(),
        })?;
        let volume = volume.ok_or(Error::Parse {
            line: 0,
            msg: "missing #volume".into(),
        })?;
        rows.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut lambdas: Vec<SpectralLine> = Vec::new();
        let mut anchor = f64::NEG_INFINITY;
        for (lambda, mult) in rows {
            match lambdas.last_mut() {
                Some(last) if lambda - anchor <= MERGE_TOL => last.mult += mult,
                _ => {
                    anchor = lambda;
                    lambdas.push(SpectralLine { lambda, mult });
                }
            }
        }
        let cutoff = cutoff.unwrap_or_else(|| lambdas.last().map_or(0.0, |l| l.lambda));
        let cs = CrossSection {
            dim_n: dim,
            volume,
            lambdas,
            cutoff,
            label,
        };
        cs.validate()?;
        Ok(cs)
    }
}

pub fn load_spectrum(path: impl AsRef<Path>) -> Result<CrossSection> {
    CrossSection::from_csv(&std::fs::read_to_string(path)?)
}
