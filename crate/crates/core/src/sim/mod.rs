mod corridor;
mod metrics;
mod world;

pub use corridor::{
    run_corridor_experiment, simulate_beam, simulate_mapping, synth_corridor_map,
    CorridorBeamOutcome, CorridorConfig, Method, RunResult,
};
pub use metrics::{kl_divergence_mc, loglik_ratio, paired_t_test, LoglikRatio, PairedTTest};
pub use world::{map_from_scans, SyntheticWorld};
