mod build_map;
mod eval;
mod localize;
mod simulate;

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::Vector3;

use gridbelief_core::{fit_prior, MapModel, PriorParams, VoxelStatsGrid};

pub use build_map::cmd_build_map;
pub use eval::cmd_eval;
pub use localize::cmd_localize;
pub use simulate::cmd_simulate;

/// Grid mapping with conjugate map posteriors, and localization on top.
#[derive(Debug, Parser)]
#[command(name = "gridbelief", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a voxel statistics map from a scan log.
    BuildMap(build_map::BuildMapArgs),
    /// Run the particle filter over a scan log against a built map.
    Localize(localize::LocalizeArgs),
    /// Run the corridor simulation sweep.
    Simulate(simulate::SimulateArgs),
    /// Evaluate MLM-vs-FMP likelihood and KL metrics on a scan log.
    Eval(eval::EvalArgs),
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::BuildMap(args) => cmd_build_map(&args),
        Command::Localize(args) => cmd_localize(&args),
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Eval(args) => cmd_eval(&args),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Reflection,
    Decay,
}

impl From<ModelArg> for MapModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Reflection => MapModel::Reflection,
            ModelArg::Decay => MapModel::Decay,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Full-map-posterior likelihood.
    Fmp,
    /// Most-likely-map likelihood.
    Mlm,
}

/// `--prior` flag: how prior hyperparameters are chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PriorArg {
    /// Beta(1,1) — flat over reflection probabilities.
    Uniform,
    /// Gamma(1,0) — improper uninformative over decay rates.
    Uninformative,
    /// Fit (alpha, beta) to the empirical moments of the ML map.
    MomentMatched,
    Fixed {
        alpha: f64,
        beta: f64,
    },
}

impl FromStr for PriorArg {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(PriorArg::Uniform),
            "uninformative" => Ok(PriorArg::Uninformative),
            "moment-matched" => Ok(PriorArg::MomentMatched),
            other => {
                let Some(rest) = other.strip_prefix("fixed=") else {
                    bail!(
                        "unknown prior {other:?} (expected uniform, uninformative, \
                         moment-matched, or fixed=ALPHA,BETA)"
                    );
                };
                let (a, b) = rest
                    .split_once(',')
                    .ok_or_else(|| anyhow!("fixed prior needs ALPHA,BETA, got {rest:?}"))?;
                Ok(PriorArg::Fixed {
                    alpha: a.trim().parse().context("parsing prior alpha")?,
                    beta: b.trim().parse().context("parsing prior beta")?,
                })
            }
        }
    }
}

impl PriorArg {
    /// Concrete hyperparameters for a model, fitting against `grid` when
    /// moment matching is requested.
    pub fn resolve(&self, model: MapModel, grid: &VoxelStatsGrid) -> Result<PriorParams> {
        Ok(match self {
            PriorArg::Uniform => {
                if model != MapModel::Reflection {
                    bail!("--prior uniform applies to the reflection model");
                }
                PriorParams::uniform_reflection()
            }
            PriorArg::Uninformative => {
                if model != MapModel::Decay {
                    bail!("--prior uninformative applies to the decay model");
                }
                PriorParams::uninformative_decay()
            }
            PriorArg::MomentMatched => {
                fit_prior(grid, model).context("moment-matching the prior")?
            }
            PriorArg::Fixed { alpha, beta } => PriorParams::new(model, *alpha, *beta)?,
        })
    }
}

/// Shared `--dims`, `--voxel-size`, `--origin` geometry flags.
#[derive(Debug, Clone, Args)]
pub struct GeometryArgs {
    /// Voxel counts per axis, as X,Y,Z.
    #[arg(long, value_parser = parse_dims)]
    pub dims: [u32; 3],
    /// Cubic voxel edge length in meters.
    #[arg(long, default_value_t = 0.5)]
    pub voxel_size: f64,
    /// World coordinates of the grid's minimal corner, as X,Y,Z.
    #[arg(long, value_parser = parse_vec3, default_value = "0,0,0")]
    pub origin: Vector3<f64>,
}

impl GeometryArgs {
    pub fn build(&self) -> Result<gridbelief_core::GridGeometry> {
        Ok(gridbelief_core::GridGeometry::new(
            self.dims,
            self.voxel_size,
            self.origin,
        )?)
    }
}

fn parse_dims(s: &str) -> Result<[u32; 3]> {
    let parts: Vec<u32> = s
        .split(',')
        .map(|p| p.trim().parse().context("parsing --dims"))
        .collect::<Result<_>>()?;
    let [x, y, z] = parts[..] else {
        bail!("--dims needs exactly three components, got {s:?}");
    };
    Ok([x, y, z])
}

fn parse_vec3(s: &str) -> Result<Vector3<f64>> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse().context("parsing vector"))
        .collect::<Result<_>>()?;
    let [x, y, z] = parts[..] else {
        bail!("expected three comma-separated components, got {s:?}");
    };
    Ok(Vector3::new(x, y, z))
}

/// Write `content` to `path`, or to stdout when no path is given.
pub fn write_output(path: Option<&PathBuf>, content: &str) -> Result<()> {
    match path {
        Some(p) => {
            let mut f =
                File::create(p).with_context(|| format!("creating {}", p.display()))?;
            f.write_all(content.as_bytes())?;
            Ok(())
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

pub fn display_path(p: &Path) -> String {
    p.display().to_string()
}
