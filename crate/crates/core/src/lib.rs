//! Lidar grid mapping with closed-form map posteriors, and localization on
//! top of them.
//!
//! Each voxel keeps three sufficient statistics — hit count H, miss count M,
//! and traversed distance R — which parameterize exact conjugate posteriors
//! over the voxel's value: Beta(H+α, M+β) for reflection probabilities,
//! Gamma(H+α, R+β) for decay rates.  Measurement likelihoods integrate the
//! forward model against these posteriors in closed form (the FMP mode),
//! which keeps them informative in sparsely observed regions where the
//! plug-in most-likely-map likelihood (MLM) degenerates.
//!
//! Modules:
//! - [`grid`]: voxel geometry, sufficient statistics, poses, beams.
//! - [`raycast`]: beam-to-voxel-segment decomposition.
//! - [`mapping`]: statistics accumulation, posteriors, ML maps, prior fitting.
//! - [`likelihood`]: per-voxel and per-beam likelihoods in both modes.
//! - [`localization`]: histogram filter and Monte-Carlo (particle) filter.
//! - [`sim`]: the corridor benchmark, synthetic worlds, evaluation metrics.

// `!(x > 0.0)`-style guards are deliberate: they reject NaN along with the
// out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod grid;
pub mod likelihood;
pub mod localization;
pub mod mapping;
pub mod raycast;
pub mod sim;

pub use error::{Error, Result};
pub use grid::{Beam, BeamStatus, BeamTrace, GridGeometry, Pose, VoxelStats, VoxelStatsGrid};
pub use likelihood::{
    beam_log_likelihood, l_dec, l_dec_mlm, l_ref, l_ref_mlm, out_of_range_log_prob,
    scan_beam_log_likelihood, LikelihoodMode, OutOfRangeKind,
};
pub use localization::{
    pf_estimate, pf_init, pf_step, HistogramBelief, MotionNoise, Particle, ParticleSet,
};
pub use mapping::{
    fit_prior, ml_value, moment_match_prior, posterior, update_stats, MapModel, PosteriorParams,
    PriorParams,
};
pub use raycast::{trace_beam, trace_corridor};
pub use sim::{
    kl_divergence_mc, loglik_ratio, map_from_scans, paired_t_test, run_corridor_experiment,
    simulate_beam, simulate_mapping, synth_corridor_map, CorridorBeamOutcome, CorridorConfig,
    LoglikRatio, Method, PairedTTest, RunResult, SyntheticWorld,
};
