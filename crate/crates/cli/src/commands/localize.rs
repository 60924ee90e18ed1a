use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;

use gridbelief_core::{
    fit_prior, pf_estimate, pf_init, pf_step, LikelihoodMode, MapModel, MotionNoise, Pose,
};

use crate::commands::{display_path, write_output, ModeArg, PriorArg};
use crate::mapfile::read_map;
use crate::scanlog::read_scan_log;

#[derive(Debug, Args)]
pub struct LocalizeArgs {
    /// Map file produced by `build-map`.
    pub map: PathBuf,
    /// Scan log to localize against; record poses serve as ground truth.
    pub scan_log: PathBuf,
    /// Measurement likelihood: full map posterior or most likely map.
    #[arg(long, value_enum, default_value_t = ModeArg::Fmp)]
    pub mode: ModeArg,
    /// Prior override for FMP; defaults to the prior stored in the map file.
    #[arg(long)]
    pub prior: Option<PriorArg>,
    /// Per-voxel factor for unvisited voxels under MLM.
    #[arg(long)]
    pub mlm_default: Option<f64>,
    /// Lower bound applied to each MLM beam factor (a probability, not a log).
    #[arg(long)]
    pub mlm_floor: Option<f64>,
    #[arg(long, default_value_t = 3000)]
    pub particles: usize,
    /// Std dev of the initial particle cloud positions, meters.
    #[arg(long, default_value_t = 0.1)]
    pub init_sigma_trans: f64,
    /// Std dev of the initial particle cloud rotations, radians.
    #[arg(long, default_value_t = 0.1)]
    pub init_sigma_rot: f64,
    /// Motion noise per step, meters; defaults to --init-sigma-trans.
    #[arg(long)]
    pub motion_sigma_trans: Option<f64>,
    /// Motion noise per step, radians; defaults to --init-sigma-rot.
    #[arg(long)]
    pub motion_sigma_rot: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Use every k-th beam of each scan.
    #[arg(long, default_value_t = 1)]
    pub beam_stride: usize,
    /// Trajectory CSV destination; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn cmd_localize(args: &LocalizeArgs) -> Result<()> {
    if args.beam_stride == 0 {
        bail!("--beam-stride must be >= 1");
    }
    let map = read_map(&args.map).with_context(|| format!("reading {}", display_path(&args.map)))?;
    let records = read_scan_log(&args.scan_log)
        .with_context(|| format!("reading {}", display_path(&args.scan_log)))?;
    if records.is_empty() {
        bail!("scan log {} is empty", display_path(&args.scan_log));
    }

    let mode = build_mode(args, &map)?;
    let noise = MotionNoise {
        trans_sigma: args.motion_sigma_trans.unwrap_or(args.init_sigma_trans),
        rot_sigma: args.motion_sigma_rot.unwrap_or(args.init_sigma_rot),
    };
    let mut set = pf_init(
        &records[0].pose,
        args.init_sigma_trans,
        args.init_sigma_rot,
        args.particles,
        args.seed,
    )?;

    let mut csv = String::from("t,x,y,z,yaw,pitch,roll,error\n");
    let mut error_sum = 0.0;
    let mut prev_pose = records[0].pose.clone();
    for (i, rec) in records.iter().enumerate() {
        let odometry = if i == 0 {
            Pose::identity()
        } else {
            prev_pose.delta(&rec.pose)
        };
        prev_pose = rec.pose.clone();
        let scan: Vec<_> = rec
            .beams
            .iter()
            .step_by(args.beam_stride)
            .cloned()
            .collect();
        let step_seed = args.seed ^ (i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        set = pf_step(&set, &odometry, noise, &scan, &map.grid, &mode, step_seed)
            .with_context(|| format!("step {i} (t={})", rec.timestamp))?;
        let est = pf_estimate(&set)?;
        let error = (est.position - rec.pose.position).norm();
        error_sum += error;
        let (roll, pitch, yaw) = est.orientation.euler_angles();
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            rec.timestamp, est.position.x, est.position.y, est.position.z, yaw, pitch, roll, error
        )?;
    }
    write_output(args.output.as_ref(), &csv)?;
    eprintln!(
        "mean position error {:.6} m over {} steps",
        error_sum / records.len() as f64,
        records.len()
    );
    Ok(())
}

fn build_mode(args: &LocalizeArgs, map: &crate::mapfile::MapFile) -> Result<LikelihoodMode> {
    match args.mode {
        ModeArg::Fmp => {
            let prior = match &args.prior {
                Some(p) => p.resolve(map.model, &map.grid)?,
                None => match map.prior {
                    Some(p) => p,
                    None => fit_prior(&map.grid, map.model)
                        .context("map stores no prior and moment matching failed")?,
                },
            };
            // An improper Gamma(a, 0) prior carries no mass for voxels the map
            // never observed; fall back to empirical moments there.
            let unvisited_fallback = if map.model == MapModel::Decay && prior.beta == 0.0 {
                fit_prior(&map.grid, MapModel::Decay).ok()
            } else {
                None
            };
            Ok(LikelihoodMode::Fmp {
                prior,
                unvisited_fallback,
            })
        }
        ModeArg::Mlm => {
            let default = match args.mlm_default {
                Some(d) => d,
                None => match map.model {
                    MapModel::Reflection => 0.5,
                    MapModel::Decay => {
                        let p = map
                            .prior
                            .or_else(|| fit_prior(&map.grid, MapModel::Decay).ok());
                        match p {
                            Some(p) if p.beta > 0.0 => p.alpha / p.beta,
                            _ => 1.0,
                        }
                    }
                },
            };
            let floor_log = match args.mlm_floor {
                Some(f) => {
                    if !(f > 0.0 && f <= 1.0) {
                        bail!("--mlm-floor must lie in (0, 1], got {f}");
                    }
                    Some(f.ln())
                }
                None => None,
            };
            Ok(LikelihoodMode::Mlm {
                model: map.model,
                default,
                floor_log,
            })
        }
    }
}
