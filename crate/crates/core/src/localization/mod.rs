mod histogram;
mod particle;

pub use histogram::HistogramBelief;
pub use particle::{pf_estimate, pf_init, pf_step, MotionNoise, Particle, ParticleSet};
