use std::f64::consts::FRAC_PI_4;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use unruh_steering::report::{self, AnalysisOptions, Quantity, SweepSpec};
use unruh_steering::Qubit;

#[derive(Parser, Debug)]
#[command(
    name = "unruh-steering",
    version,
    about = "Correlations of Werner states under the fermionic Unruh channel"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// All quantities at one (p, r) point, as JSON.
    Analyze {
        /// Werner mixing weight, 0..=1.
        #[arg(long)]
        p: f64,
        #[command(flatten)]
        r: RArg,
        /// Also run the measurement-sweep and quadrature oracles.
        #[arg(long)]
        with_oracles: bool,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CSV over a (p, r) grid, p outer and r inner.
    Sweep {
        /// p_steps x r_steps, e.g. 50x50.
        #[arg(long, default_value = "11x9")]
        grid: String,
        /// Lowest p on the grid.
        #[arg(long, default_value_t = 0.0)]
        p_min: f64,
        /// Highest p on the grid.
        #[arg(long, default_value_t = 1.0)]
        p_max: f64,
        /// Lowest r on the grid, in radians.
        #[arg(long, default_value_t = 0.0)]
        r_min: f64,
        /// Highest r on the grid, in radians.
        #[arg(long, default_value_t = FRAC_PI_4)]
        r_max: f64,
        /// Comma-separated subset of concurrence,concurrence_eq17,chsh_M,msc,r_c,thresholds.
        #[arg(long, value_delimiter = ',')]
        quantities: Vec<Quantity>,
        /// Also run the measurement-sweep and quadrature oracles.
        #[arg(long)]
        with_oracles: bool,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Surface point cloud of a steering ellipsoid.
    Ellipsoid {
        /// Werner mixing weight, 0..=1.
        #[arg(long)]
        p: f64,
        #[command(flatten)]
        r: RArg,
        /// Which qubit is steered: first (inertial) or second (accelerated).
        #[arg(long, default_value = "first")]
        steered: Qubit,
        /// Number of surface points, at least 8.
        #[arg(long, default_value_t = 400)]
        samples: usize,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct RArg {
    /// Acceleration parameter in radians, 0..=pi/4.
    #[arg(long, conflicts_with = "r_frac")]
    r: Option<f64>,
    /// Acceleration parameter as a fraction of pi/4.
    #[arg(long)]
    r_frac: Option<f64>,
}

impl RArg {
    fn radians(&self) -> Result<f64> {
        match (self.r, self.r_frac) {
            (Some(r), None) => Ok(r),
            (None, Some(frac)) => {
                if !(0.0..=1.0).contains(&frac) {
                    bail!("--r-frac must lie in [0, 1], got {frac}");
                }
                Ok(frac * FRAC_PI_4)
            }
            _ => bail!("one of --r or --r-frac is required"),
        }
    }
}

fn parse_grid(grid: &str) -> Result<(usize, usize)> {
    let (p, r) = grid
        .split_once(['x', 'X', '*'])
        .with_context(|| format!("--grid expects P_STEPSxR_STEPS, got `{grid}`"))?;
    Ok((
        p.trim().parse().context("invalid p_steps in --grid")?,
        r.trim().parse().context("invalid r_steps in --grid")?,
    ))
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze {
            p,
            r,
            with_oracles,
            out,
        } => {
            let opts = AnalysisOptions {
                with_oracles,
                ..AnalysisOptions::default()
            };
            let record = report::analyze(p, r.radians()?, &opts)?;
            let mut json = report::analysis_json(&record);
            json.push('\n');
            emit(&json, out.as_ref())
        }
        Command::Sweep {
            grid,
            p_min,
            p_max,
            r_min,
            r_max,
            quantities,
            with_oracles,
            out,
        } => {
            let (p_steps, r_steps) = parse_grid(&grid)?;
            let spec = SweepSpec {
                p_min,
                p_max,
                p_steps,
                r_min,
                r_max,
                r_steps,
                quantities: if quantities.is_empty() {
                    Quantity::ALL.to_vec()
                } else {
                    quantities
                },
                with_oracles,
            };
            emit(&report::sweep_csv(&spec)?, out.as_ref())
        }
        Command::Ellipsoid {
            p,
            r,
            steered,
            samples,
            out,
        } => emit(&report::ellipsoid_csv(p, r.radians()?, steered, samples)?, out.as_ref()),
    }
}
