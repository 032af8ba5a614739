//! Front end for the `warpres` library: builds cross-sections from a
//! [`RunConfig`], runs one command and renders its report.

pub mod config;
pub mod plot;
pub mod verify;

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{Context, Result};
use serde::Serialize;
use warpres::asymptotics::{b_theta, constants_report, counting_report};
use warpres::model_ops::{
    boundary_solution, normalized_scattering_eigenvalue, outgoing_solution, poisson_coeff, resolvent_coeff,
    scattering_eigenvalue, ModeCoefficient,
};
use warpres::phase::{trace_gamma, GammaCurve};
use warpres::resonance::{resonance_set, resonances_to_csv, Resonance};
use warpres::Complex64;

pub use config::{Command, CrossSectionSpec, EvalRequest, Format, Kernel, RunConfig, Shape};

/// Step of the traced level curve used by every command.
pub const CURVE_RESOLUTION: f64 = 1e-3;

/// What a run produced: the main report, any side files, and whether the
/// run counts as a success for the exit status.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub report: String,
    pub side_files: Vec<(PathBuf, String)>,
    pub success: bool,
}

impl Output {
    fn ok(report: String) -> Output {
        Output { report, side_files: Vec::new(), success: true }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool_version: &'static str,
    config: RunConfig,
    result: &'a T,
}

/// JSON report carrying the tool version and the config echo.
pub fn json_report<T: Serialize>(config: &RunConfig, result: &T) -> Result<String> {
    let env = Envelope { tool_version: env!("CARGO_PKG_VERSION"), config: config.echo(), result };
    let mut s = serde_json::to_string_pretty(&env)?;
    s.push('\n');
    Ok(s)
}

fn curve() -> Result<GammaCurve> {
    trace_gamma(CURVE_RESOLUTION).context("tracing the level curve γ")
}

fn render<T: Serialize>(config: &RunConfig, value: &T, csv: impl FnOnce() -> String) -> Result<String> {
    match config.format {
        Format::Json => json_report(config, value),
        _ => Ok(csv()),
    }
}

fn resonances(config: &RunConfig) -> Result<(Vec<Resonance>, usize, String)> {
    let cs = config.cross_section()?;
    let set = resonance_set(&cs, config.r_max, &curve()?)
        .with_context(|| format!("computing resonances of {} up to |ν| ≤ {}", cs.label, config.r_max))?;
    log::info!("{} resonance entries from {}", set.len(), cs.label);
    Ok((set, cs.dim_n, cs.label))
}

fn plot_title(label: &str, n: usize, r_max: f64) -> String {
    format!("Resonances of (0,1] × {label} (n = {n}), |s - n/2| ≤ {r_max}")
}

/// Run one command.
pub fn run(config: &RunConfig) -> Result<Output> {
    config.validate()?;
    match config.command {
        Command::Spectrum => {
            let cs = config.cross_section()?;
            Ok(Output::ok(render(config, &cs, || cs.to_csv())?))
        }
        Command::Resonances | Command::Plot => {
            let (set, n, label) = resonances(config)?;
            let svg = || plot::resonance_svg(&set, n, &plot_title(&label, n, config.r_max));
            let report = if config.command == Command::Plot || config.format == Format::Svg {
                svg()
            } else {
                render(config, &set, || resonances_to_csv(&set))?
            };
            let mut out = Output::ok(report);
            if let Some(path) = &config.plot {
                out.side_files.push((path.clone(), svg()));
            }
            Ok(out)
        }
        Command::Count => {
            let cs = config.cross_section()?;
            let curve = curve()?;
            let set = resonance_set(&cs, config.r_max, &curve)?;
            let radii = config
                .radii
                .clone()
                .unwrap_or_else(|| (1..=6).map(|k| config.r_max * k as f64 / 6.0).collect());
            let report = counting_report(&cs, &set, &radii, &curve, config.quad_tol)?;
            Ok(Output::ok(render(config, &report, || report.to_csv())?))
        }
        Command::Constants => {
            let report = constants_report(config.cross_section.dim, &curve()?, config.quad_tol, config.samples)?;
            Ok(Output::ok(render(config, &report, || report.to_csv())?))
        }
        Command::Btheta => {
            let cs = config.cross_section()?;
            let samples = (0..config.samples)
                .map(|k| {
                    let theta = FRAC_PI_2 * k as f64 / (config.samples - 1) as f64;
                    Ok((theta, b_theta(&cs, theta, config.quad_tol)?))
                })
                .collect::<Result<Vec<(f64, f64)>>>()?;
            Ok(Output::ok(render(config, &samples, || {
                let mut s = String::from("theta,b_theta\n");
                for (t, b) in &samples {
                    let _ = writeln!(s, "{t:?},{b:?}");
                }
                s
            })?))
        }
        Command::Eval => {
            let req = config.eval.expect("validated");
            let value = evaluate(&req, config.cross_section.dim)?;
            Ok(Output::ok(render(config, &value, || {
                format!(
                    "kernel,re_s,im_s,lambda,n,x,xp,re_value,im_value\n{},{:?},{:?},{:?},{},{:?},{:?},{:?},{:?}\n",
                    kernel_name(req.kernel),
                    req.s_re,
                    req.s_im,
                    req.lambda,
                    config.cross_section.dim,
                    req.x,
                    req.xp,
                    value.value.re,
                    value.value.im
                )
            })?))
        }
        Command::Verify => {
            let outcomes = verify::run_suite(config.seed, &curve()?);
            let success = outcomes.iter().all(|o| o.passed);
            let report = render(config, &outcomes, || {
                let mut s = String::from("check,worst,tolerance,points,skipped,passed\n");
                for o in &outcomes {
                    let m = &o.measurement;
                    let _ = writeln!(s, "{},{:e},{:e},{},{},{}", m.name, m.worst, o.tolerance, m.points, m.skipped, o.passed);
                }
                s
            })?;
            Ok(Output { report, side_files: Vec::new(), success })
        }
    }
}

fn kernel_name(k: Kernel) -> &'static str {
    match k {
        Kernel::Outgoing => "outgoing",
        Kernel::Boundary => "boundary",
        Kernel::Resolvent => "resolvent",
        Kernel::Poisson => "poisson",
        Kernel::Scattering => "scattering",
        Kernel::NormalizedScattering => "normalized-scattering",
    }
}

/// Pointwise value of one model kernel.
pub fn evaluate(req: &EvalRequest, n: usize) -> Result<ModeCoefficient> {
    let s = Complex64::new(req.s_re, req.s_im);
    let (l, x) = (req.lambda, req.x);
    let value = match req.kernel {
        Kernel::Outgoing => outgoing_solution(s, l, n, x)?,
        Kernel::Boundary => boundary_solution(s, l, n, x)?,
        Kernel::Resolvent => resolvent_coeff(s, l, n, x, req.xp)?,
        Kernel::Poisson => poisson_coeff(s, l, n, x)?,
        Kernel::Scattering => scattering_eigenvalue(s, l, n)?,
        Kernel::NormalizedScattering => normalized_scattering_eigenvalue(s, l, n)?,
    };
    Ok(ModeCoefficient::new(s, l, n, value))
}
