use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;

use gridbelief_core::{map_from_scans, Error, MapModel};

use crate::commands::{display_path, GeometryArgs, ModelArg, PriorArg};
use crate::mapfile::{write_map, MapFile};
use crate::scanlog::read_scan_log;

#[derive(Debug, Args)]
pub struct BuildMapArgs {
    /// Scan log to aggregate.
    pub scan_log: PathBuf,
    /// Sensor model governing the map statistics.
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[command(flatten)]
    pub geometry: GeometryArgs,
    /// Prior hyperparameters recorded in the map file.
    #[arg(long, default_value = "moment-matched")]
    pub prior: PriorArg,
    /// Map file to write.
    #[arg(long)]
    pub output: PathBuf,
}

pub fn cmd_build_map(args: &BuildMapArgs) -> Result<()> {
    let geometry = args.geometry.build()?;
    let records = read_scan_log(&args.scan_log)
        .with_context(|| format!("reading {}", display_path(&args.scan_log)))?;
    let beams: usize = records.iter().map(|r| r.beams.len()).sum();
    let scans: Vec<_> = records
        .into_iter()
        .map(|r| (r.pose, r.beams))
        .collect();
    let grid = map_from_scans(&geometry, &scans)?;

    let model = MapModel::from(args.model);
    // A map built from too few distinct voxels has no usable empirical
    // moments; record no prior rather than failing the whole build.
    let prior = match args.prior.resolve(model, &grid) {
        Ok(p) => Some(p),
        Err(e)
            if args.prior == PriorArg::MomentMatched
                && matches!(
                    e.downcast_ref::<Error>(),
                    Some(Error::DegenerateMoments)
                ) =>
        {
            eprintln!("warning: degenerate map moments; writing map without a prior");
            None
        }
        Err(e) => return Err(e),
    };

    let map = MapFile {
        model,
        prior,
        grid,
    };
    write_map(&args.output, &map)
        .with_context(|| format!("writing {}", display_path(&args.output)))?;

    println!(
        "scans={} beams={} visited={}/{} model={}",
        scans.len(),
        beams,
        map.grid.visited_len(),
        geometry.len(),
        model.as_str()
    );
    match &map.prior {
        Some(p) => println!("prior alpha={} beta={}", p.alpha, p.beta),
        None => println!("prior none"),
    }
    Ok(())
}
