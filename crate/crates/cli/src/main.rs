//! `connint`: moments, area densities, maxima, the measure scan and the
//! verification suite from the command line.
//!
//! Exit codes: 0 on success, 1 when a computation fails or a check misses its
//! tolerance, 2 on invalid usage or configuration.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{KindArg, RegionArg, Report, VariantArg};
use config::{Format, Overrides, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "connint", version, about = "Connection-integral moments, area densities and measure factors")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML file with run settings; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Output file; relative paths resolve against the output directory.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Default output directory.
    #[arg(long, global = true, env = "CONNINT_OUT_DIR")]
    out_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    gamma: Option<f64>,
    /// Working precision in bits for extended-precision arithmetic.
    #[arg(long, global = true)]
    bits: Option<usize>,
    #[arg(long, global = true)]
    abs_tol: Option<f64>,
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Smallest |v| on the grid.
    #[arg(long)]
    t_min: Option<f64>,
    /// Largest |v| on the grid.
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Moment table: closed form, generating-function route and density quadrature.
    Moments {
        #[arg(long, value_enum, default_value = "arcsin")]
        kind: KindArg,
        #[arg(long)]
        kmin: Option<usize>,
        #[arg(long)]
        kmax: Option<usize>,
    },
    /// Area density sampled along a physical ray.
    Density {
        #[arg(long, value_enum, default_value = "spacelike")]
        region: RegionArg,
        #[arg(long, value_enum, default_value = "arcsin")]
        variant: VariantArg,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Euclidean density on the physical slice.
    EuclideanDensity {
        /// Real Euclidean parameter; without it, the continuation of --gamma is used.
        #[arg(long)]
        gamma_e: Option<f64>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Local maxima of the density against the predicted spectrum.
    Maxima {
        #[arg(long, value_enum, default_value = "spacelike")]
        region: RegionArg,
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 20_000)]
        grid_points: usize,
    },
    /// Acceptance suite with pass/fail lines and residuals.
    Verify {
        /// Run every criterion (the default when none is named).
        #[arg(long)]
        all: bool,
        /// Criterion number, repeatable.
        #[arg(long = "criterion", value_parser = clap::value_parser!(u8).range(1..=10))]
        criteria: Vec<u8>,
    },
    /// Flattening exponents of the length-weighted measure.
    MeasureScan {
        #[arg(long, value_delimiter = ',', default_value = "0,4,10,18,19,20,22")]
        n: Vec<u32>,
        #[arg(long, default_value_t = 4)]
        decades: u32,
        #[arg(long, default_value_t = 32)]
        samples_per_decade: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Moments { .. } => "moments",
            Command::Density { .. } => "density",
            Command::EuclideanDensity { .. } => "euclidean-density",
            Command::Maxima { .. } => "maxima",
            Command::Verify { .. } => "verify",
            Command::MeasureScan { .. } => "measure-scan",
        }
    }
}

fn flag_overrides(cli: &Cli) -> Overrides {
    let c = &cli.common;
    let mut o = Overrides {
        gamma: c.gamma,
        bits: c.bits,
        abs_tol: c.abs_tol,
        rel_tol: c.rel_tol,
        seed: c.seed,
        format: c.format,
        output: c.output.clone(),
        out_dir: c.out_dir.clone(),
        ..Default::default()
    };
    match &cli.command {
        Command::Moments { kmin, kmax, .. } => {
            o.kmin = *kmin;
            o.kmax = *kmax;
        }
        Command::Density { grid, .. } | Command::EuclideanDensity { grid, .. } => {
            o.t_min = grid.t_min;
            o.t_max = grid.t_max;
            o.points = grid.points;
        }
        _ => {}
    }
    o
}

fn run(cli: &Cli, cfg: &RunConfig) -> anyhow::Result<Report> {
    match &cli.command {
        Command::Moments { kind, .. } => commands::moments(cfg, *kind),
        Command::Density { region, variant, .. } => commands::density(cfg, *region, *variant),
        Command::EuclideanDensity { gamma_e, .. } => commands::euclidean_density(cfg, *gamma_e),
        Command::Maxima { region, n, grid_points } => commands::maxima(cfg, *region, *n, *grid_points),
        Command::Verify { criteria, .. } => commands::verify(cfg, criteria),
        Command::MeasureScan {
            n,
            decades,
            samples_per_decade,
        } => commands::measure_scan(cfg, n, *decades, *samples_per_decade),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let file = match cli.common.config.as_deref().map(Overrides::from_file).transpose() {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cfg = match RunConfig::resolve(file.as_ref(), &flag_overrides(&cli)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let report = match run(&cli, &cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let dest = cfg.destination(cli.command.name());
    if let Err(e) = report.table.emit(cfg.format, dest.as_deref()) {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    if report.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        for f in &report.failures {
            eprintln!("check failed: {f}");
        }
        ExitCode::from(1)
    }
}
