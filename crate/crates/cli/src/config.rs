//! Run configuration shared by the command line and the report writers.

use std::path::PathBuf;

use anyhow::{bail, ensure, Context, Result};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use warpres::resonance::required_cutoff;
use warpres::spectrum::{circle_spectrum, load_spectrum, sphere_spectrum, torus_spectrum, CrossSection};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Spectrum,
    Resonances,
    Count,
    Constants,
    Btheta,
    Eval,
    Verify,
    Plot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Sphere,
    Torus,
    Circle,
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Kernel {
    Outgoing,
    Boundary,
    Resolvent,
    Poisson,
    Scattering,
    NormalizedScattering,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossSectionSpec {
    pub shape: Shape,
    /// Dimension `n` of the cross-section.
    pub dim: usize,
    pub lmax: Option<usize>,
    pub lengths: Vec<f64>,
    pub spectrum_file: Option<PathBuf>,
    /// Spectral cutoff; by default just enough for `r_max`.
    pub cutoff: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalRequest {
    pub kernel: Kernel,
    pub s_re: f64,
    pub s_im: f64,
    pub lambda: f64,
    pub x: f64,
    pub xp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub cross_section: CrossSectionSpec,
    pub r_max: f64,
    pub quad_tol: f64,
    /// Worker threads; `None` lets rayon decide. Results do not depend on it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub format: Format,
    /// Radii for `count`; by default six evenly spaced up to `r_max`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    /// Number of `θ` samples for `constants` and `btheta`.
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eval: Option<EvalRequest>,
    /// Extra SVG written by `resonances`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot: Option<PathBuf>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        ensure!(self.r_max > 0.0 && self.r_max.is_finite(), "--rmax must be positive, got {}", self.r_max);
        ensure!(
            self.quad_tol > 1e-14 && self.quad_tol < 1e-2,
            "--quad-tol must lie in (1e-14, 1e-2), got {}",
            self.quad_tol
        );
        ensure!(self.cross_section.dim >= 1, "--dim must be at least 1");
        ensure!(self.threads != Some(0), "--threads must be positive");
        ensure!(self.samples >= 2, "--samples must be at least 2");
        if self.format == Format::Svg {
            ensure!(
                matches!(self.command, Command::Resonances | Command::Plot),
                "svg output is only available for resonances and plot"
            );
        }
        if self.command == Command::Eval {
            ensure!(self.eval.is_some(), "eval needs --kernel");
        }
        match self.cross_section.shape {
            Shape::Torus => ensure!(
                !self.cross_section.lengths.is_empty(),
                "torus needs --lengths"
            ),
            Shape::File => ensure!(
                self.cross_section.spectrum_file.is_some(),
                "file shape needs --spectrum-file"
            ),
            _ => {}
        }
        Ok(())
    }

    /// The config as echoed in reports: output location and thread count
    /// are left out so that reports do not depend on them.
    pub fn echo(&self) -> RunConfig {
        RunConfig {
            threads: None,
            out: None,
            ..self.clone()
        }
    }

    /// Spectral cutoff needed by the command.
    fn needed_cutoff(&self) -> f64 {
        self.cross_section.cutoff.unwrap_or_else(|| match self.command {
            Command::Spectrum | Command::Btheta | Command::Constants => self.r_max,
            _ => required_cutoff(self.r_max),
        })
    }

    pub fn cross_section(&self) -> Result<CrossSection> {
        let spec = &self.cross_section;
        let cutoff = self.needed_cutoff();
        let cs = match spec.shape {
            Shape::Sphere => {
                let l_max = match spec.lmax {
                    Some(l) => l,
                    None => sphere_lmax(spec.dim, cutoff),
                };
                sphere_spectrum(spec.dim, l_max)?
            }
            Shape::Circle => {
                if spec.dim != 1 {
                    bail!("the circle has dimension 1, got --dim {}", spec.dim);
                }
                circle_spectrum(cutoff)?
            }
            Shape::Torus => {
                if spec.lengths.len() != spec.dim {
                    bail!("--lengths has {} entries for --dim {}", spec.lengths.len(), spec.dim);
                }
                torus_spectrum(&spec.lengths, cutoff)?
            }
            Shape::File => {
                let path = spec.spectrum_file.as_ref().expect("validated");
                load_spectrum(path).with_context(|| format!("reading {}", path.display()))?
            }
        };
        Ok(cs)
    }
}

/// Smallest `l_max` with `√(l(l+n-1)) ≥ cutoff`.
fn sphere_lmax(n: usize, cutoff: f64) -> usize {
    let mut l = 1usize;
    while ((l * (l + n - 1)) as f64).sqrt() < cutoff {
        l += 1;
    }
    l
}
