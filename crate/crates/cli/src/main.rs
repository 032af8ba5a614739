use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use warpres_cli::{run, Command, CrossSectionSpec, EvalRequest, Format, Kernel, RunConfig, Shape};

/// Resonances of a model hyperbolic end and their counting asymptotics.
#[derive(Debug, Parser)]
#[command(name = "warpres", version)]
struct Args {
    /// What to compute.
    #[arg(value_enum)]
    command: Command,
    #[arg(long, value_enum, default_value = "sphere")]
    shape: Shape,
    /// Dimension of the cross-section.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Highest sphere harmonic; by default enough for --rmax.
    #[arg(long)]
    lmax: Option<usize>,
    /// Torus side lengths, comma separated.
    #[arg(long, value_delimiter = ',')]
    lengths: Vec<f64>,
    /// CSV spectrum for --shape file.
    #[arg(long)]
    spectrum_file: Option<PathBuf>,
    /// Spectral cutoff; by default just enough for --rmax.
    #[arg(long)]
    cutoff: Option<f64>,
    /// Radius `|s - n/2|` up to which resonances are found.
    #[arg(long = "rmax", default_value_t = 12.0)]
    r_max: f64,
    #[arg(long, default_value_t = 1e-8)]
    quad_tol: f64,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Radii for `count`, comma separated.
    #[arg(long, value_delimiter = ',')]
    radii: Option<Vec<f64>>,
    /// Number of θ samples for `constants` and `btheta`.
    #[arg(long, default_value_t = 17)]
    samples: usize,
    /// Also write the resonance plot to this SVG file.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Kernel for `eval`.
    #[arg(long, value_enum)]
    kernel: Option<Kernel>,
    /// Spectral parameter as `re,im`.
    #[arg(long, value_parser = parse_complex, default_value = "1.5,0.5", allow_hyphen_values = true)]
    s: (f64, f64),
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 0.5)]
    x: f64,
    #[arg(long, default_value_t = 0.25)]
    xp: f64,
}

fn parse_complex(text: &str) -> Result<(f64, f64), String> {
    let (re, im) = text.split_once(',').unwrap_or((text, "0"));
    let f = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok((f(re)?, f(im)?))
}

impl Args {
    fn into_config(self) -> RunConfig {
        let eval = self.kernel.map(|kernel| EvalRequest {
            kernel,
            s_re: self.s.0,
            s_im: self.s.1,
            lambda: self.lambda,
            x: self.x,
            xp: self.xp,
        });
        RunConfig {
            command: self.command,
            cross_section: CrossSectionSpec {
                shape: self.shape,
                dim: self.dim,
                lmax: self.lmax,
                lengths: self.lengths,
                spectrum_file: self.spectrum_file,
                cutoff: self.cutoff,
            },
            r_max: self.r_max,
            quad_tol: self.quad_tol,
            threads: self.threads,
            seed: self.seed,
            out: self.out,
            format: self.format,
            radii: self.radii,
            samples: self.samples,
            eval,
            plot: self.plot,
        }
    }
}

fn execute(config: &RunConfig) -> Result<bool> {
    config.validate()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = config.threads {
        pool = pool.num_threads(t);
    }
    let pool = pool.build().context("starting the worker pool")?;
    let output = pool.install(|| run(config))?;
    match &config.out {
        Some(path) => fs::write(path, &output.report).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().lock().write_all(output.report.as_bytes())?,
    }
    for (path, text) in &output.side_files {
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
        log::info!("wrote {}", path.display());
    }
    Ok(output.success)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("WARPRES_LOG", "warn")).init();
    let config = Args::parse().into_config();
    match execute(&config) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("warpres: some checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("warpres: {e:#}");
            ExitCode::from(2)
        }
    }
}
