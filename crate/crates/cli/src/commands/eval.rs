use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;

use gridbelief_core::{
    fit_prior, kl_divergence_mc, loglik_ratio, scan_beam_log_likelihood, LikelihoodMode,
    MapModel, Pose,
};

use crate::commands::{display_path, write_output, PriorArg};
use crate::mapfile::{read_map, MapFile};
use crate::scanlog::read_scan_log;

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Map file produced by `build-map`.
    pub map: PathBuf,
    /// Scan log evaluated at its recorded ground-truth poses.
    pub scan_log: PathBuf,
    /// FMP prior; defaults to the prior stored in the map file.
    #[arg(long)]
    pub prior: Option<PriorArg>,
    /// Ground-truth pose uncertainty for the KL comparison, meters.
    #[arg(long, default_value_t = 0.05)]
    pub sigma: f64,
    /// Pose samples per scan in the KL comparison.
    #[arg(long, default_value_t = 400)]
    pub kl_samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report CSV destination; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let map = read_map(&args.map).with_context(|| format!("reading {}", display_path(&args.map)))?;
    let records = read_scan_log(&args.scan_log)
        .with_context(|| format!("reading {}", display_path(&args.scan_log)))?;
    if records.is_empty() {
        bail!("scan log {} is empty", display_path(&args.scan_log));
    }
    let scans: Vec<_> = records.into_iter().map(|r| (r.pose, r.beams)).collect();

    let prior = match &args.prior {
        Some(p) => p.resolve(map.model, &map.grid)?,
        None => match map.prior {
            Some(p) => p,
            None => fit_prior(&map.grid, map.model)
                .context("map stores no prior and moment matching failed")?,
        },
    };

    let ll = loglik_ratio(&map.grid, &scans, &prior)?;
    let (fmp, mlm) = build_modes(&map, &prior)?;
    let mut kl_mlm = 0.0;
    let mut kl_fmp = 0.0;
    for (pose, beams) in &scans {
        let f_mlm = |p: &Pose| scan_log_lik(&map, &mlm, p, beams);
        let f_fmp = |p: &Pose| scan_log_lik(&map, &fmp, p, beams);
        kl_mlm += kl_divergence_mc(pose, args.sigma, f_mlm, args.kl_samples, args.seed)?;
        kl_fmp += kl_divergence_mc(pose, args.sigma, f_fmp, args.kl_samples, args.seed)?;
    }
    let kl_ratio = kl_mlm / kl_fmp;

    let mut csv = String::from("metric,value\n");
    writeln!(csv, "scans,{}", scans.len())?;
    writeln!(csv, "evaluated_beams,{}", ll.evaluated_beams)?;
    writeln!(csv, "excluded_beams,{}", ll.excluded_beams)?;
    writeln!(csv, "mlm_hit_log_lik,{}", ll.mlm_hit_log_lik)?;
    writeln!(csv, "mlm_out_of_range_log_lik,{}", ll.mlm_out_of_range_log_lik)?;
    writeln!(csv, "fmp_hit_log_lik,{}", ll.fmp_hit_log_lik)?;
    writeln!(csv, "fmp_out_of_range_log_lik,{}", ll.fmp_out_of_range_log_lik)?;
    writeln!(csv, "loglik_ratio,{}", ll.ratio)?;
    writeln!(csv, "kl_mlm,{kl_mlm}")?;
    writeln!(csv, "kl_fmp,{kl_fmp}")?;
    writeln!(csv, "kl_ratio,{kl_ratio}")?;
    write_output(args.output.as_ref(), &csv)?;
    Ok(())
}

fn scan_log_lik(
    map: &MapFile,
    mode: &LikelihoodMode,
    pose: &Pose,
    beams: &[gridbelief_core::Beam],
) -> f64 {
    beams
        .iter()
        .map(|b| {
            scan_beam_log_likelihood(pose, b, &map.grid, mode).unwrap_or(f64::NEG_INFINITY)
        })
        .sum()
}

/// The same mode pair `loglik_ratio` scores internally, for the KL comparison.
fn build_modes(map: &MapFile, prior: &gridbelief_core::PriorParams) -> Result<(LikelihoodMode, LikelihoodMode)> {
    let fallback = if map.model == MapModel::Decay && prior.beta == 0.0 {
        Some(fit_prior(&map.grid, MapModel::Decay)?)
    } else {
        None
    };
    let ml_default = match map.model {
        MapModel::Reflection => 0.5,
        MapModel::Decay => {
            let p = fallback.as_ref().unwrap_or(prior);
            p.alpha / p.beta
        }
    };
    Ok((
        LikelihoodMode::Fmp {
            prior: *prior,
            unvisited_fallback: fallback,
        },
        LikelihoodMode::Mlm {
            model: map.model,
            default: ml_default,
            floor_log: None,
        },
    ))
}
