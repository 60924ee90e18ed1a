use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};

use gridbelief_core::{paired_t_test, run_corridor_experiment, CorridorConfig, MapModel, Method};

use crate::commands::write_output;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimModelArg {
    Reflection,
    Decay,
    Both,
}

impl SimModelArg {
    fn models(self) -> Vec<MapModel> {
        match self {
            SimModelArg::Reflection => vec![MapModel::Reflection],
            SimModelArg::Decay => vec![MapModel::Decay],
            SimModelArg::Both => vec![MapModel::Reflection, MapModel::Decay],
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Sensor model(s) to sweep.
    #[arg(long, value_enum, default_value_t = SimModelArg::Both)]
    pub model: SimModelArg,
    /// Beams-per-voxel counts to sweep, comma-separated.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,10,20,50,100,200")]
    pub n_list: Vec<u32>,
    /// Corridor length in voxels (equals localization steps per run).
    #[arg(long, default_value_t = 100)]
    pub length: usize,
    /// Independent corridor runs per sweep cell.
    #[arg(long, default_value_t = 10000)]
    pub runs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Results CSV destination; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let mut csv = String::from("n,model,method,mean_rho,var_rho,runs,seed,t_vs_mlm,conf_vs_mlm\n");
    for model in args.model.models() {
        for &n in &args.n_list {
            let cell = |method: Method| {
                run_corridor_experiment(&CorridorConfig {
                    length: args.length,
                    n,
                    model,
                    method,
                    runs: args.runs,
                    seed: args.seed,
                })
                .with_context(|| format!("{} n={n} {}", model.as_str(), method.as_str()))
            };
            // All methods replay identical map/measurement draws per run, so
            // their rho sequences are paired.
            let mlm = cell(Method::Mlm)?;
            writeln!(
                csv,
                "{n},{},{},{},{},{},{},,",
                model.as_str(),
                Method::Mlm.as_str(),
                mlm.mean,
                mlm.variance,
                args.runs,
                args.seed
            )?;
            for method in [Method::FmpUniform, Method::FmpConjugate] {
                let res = cell(method)?;
                let tt = paired_t_test(&res.rhos, &mlm.rhos)?;
                writeln!(
                    csv,
                    "{n},{},{},{},{},{},{},{},{}",
                    model.as_str(),
                    method.as_str(),
                    res.mean,
                    res.variance,
                    args.runs,
                    args.seed,
                    tt.t,
                    tt.confidence
                )?;
            }
            eprintln!("done {} n={n}", model.as_str());
        }
    }
    write_output(args.output.as_ref(), &csv)?;
    Ok(())
}
