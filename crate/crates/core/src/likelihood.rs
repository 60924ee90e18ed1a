use crate::error::{Error, Result};
use crate::grid::{Beam, BeamStatus, BeamTrace, Pose, VoxelStats, VoxelStatsGrid};
use crate::mapping::{MapModel, PriorParams};
use crate::raycast::trace_beam;

/// How per-voxel likelihoods are evaluated.
///
/// `Fmp` integrates the forward model against the map posterior (the closed
/// forms below); `Mlm` plugs in the maximum-likelihood map value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LikelihoodMode {
    Fmp {
        prior: PriorParams,
        /// Substitute prior for unvisited voxels when `prior` is the improper
        /// Gamma(1, 0), whose closed form degenerates to zero there.  `None`
        /// keeps the degenerate value (-inf log-likelihood).
        unvisited_fallback: Option<PriorParams>,
    },
    Mlm {
        model: MapModel,
        /// ML map value assumed for unvisited voxels.
        default: f64,
        /// Optional lower bound on each per-voxel log factor; keeps particle
        /// weights finite under MLM zero likelihoods.  `None` preserves exact
        /// MLM semantics (-inf allowed).
        floor_log: Option<f64>,
    },
}

impl LikelihoodMode {
    pub fn model(&self) -> MapModel {
        match self {
            LikelihoodMode::Fmp { prior, .. } => prior.model,
            LikelihoodMode::Mlm { model, .. } => *model,
        }
    }
}

/// Posterior-integrated reflection likelihood
/// (H+alpha)^delta (M+beta)^(1-delta) / (H+alpha+M+beta).
pub fn l_ref(stats: &VoxelStats, prior: &PriorParams, delta: bool) -> f64 {
    let a = stats.hits as f64 + prior.alpha;
    let b = stats.misses as f64 + prior.beta;
    if delta {
        a / (a + b)
    } else {
        b / (a + b)
    }
}

/// Most-likely-map reflection likelihood H^delta M^(1-delta) / (H+M);
/// `default` is the assumed reflection probability where H+M = 0.
pub fn l_ref_mlm(stats: &VoxelStats, default: f64, delta: bool) -> f64 {
    let n = stats.hits + stats.misses;
    if n > 0 {
        let h = if delta { stats.hits } else { stats.misses };
        h as f64 / n as f64
    } else if delta {
        default
    } else {
        1.0 - default
    }
}

/// Posterior-integrated decay likelihood
/// ((R+beta)/(R+beta+r))^(H+alpha) * ((H+alpha)/(R+beta+r))^delta.
/// A probability for delta = 0 and a density in r for delta = 1.
pub fn l_dec(stats: &VoxelStats, prior: &PriorParams, r: f64, delta: bool) -> Result<f64> {
    let a = stats.hits as f64 + prior.alpha;
    let b = stats.distance + prior.beta;
    let s = b + r;
    if delta && s == 0.0 {
        return Err(Error::DegenerateDecay);
    }
    if r == 0.0 && !delta {
        return Ok(1.0); // zero-length traversal carries no information
    }
    let pass = (b / s).powf(a);
    Ok(if delta { pass * a / s } else { pass })
}

/// Most-likely-map decay likelihood e^(-lambda* r) lambda*^delta with
/// lambda* = H/R; `default` is the assumed rate where R = 0.
pub fn l_dec_mlm(stats: &VoxelStats, default: f64, r: f64, delta: bool) -> f64 {
    let lambda = if stats.distance > 0.0 {
        stats.hits as f64 / stats.distance
    } else {
        default
    };
    let pass = (-lambda * r).exp();
    if delta {
        pass * lambda
    } else {
        pass
    }
}

/// Log of the per-voxel factor for one trace segment under `mode`.
fn log_factor(stats: &VoxelStats, mode: &LikelihoodMode, r: f64, delta: bool) -> Result<f64> {
    let raw = match mode {
        LikelihoodMode::Fmp {
            prior,
            unvisited_fallback,
        } => {
            let prior = match unvisited_fallback {
                Some(fb) if prior.beta == 0.0 && stats.is_zero() => fb,
                _ => prior,
            };
            match prior.model {
                MapModel::Reflection => l_ref(stats, prior, delta).ln(),
                MapModel::Decay => {
                    let a = stats.hits as f64 + prior.alpha;
                    let b = stats.distance + prior.beta;
                    let s = b + r;
                    if delta && s == 0.0 {
                        return Err(Error::DegenerateDecay);
                    }
                    if r == 0.0 && !delta {
                        0.0
                    } else {
                        // log form of l_dec; b = 0 gives -inf rather than NaN
                        let pass = if b == 0.0 {
                            f64::NEG_INFINITY
                        } else {
                            a * (b.ln() - s.ln())
                        };
                        pass + if delta { a.ln() - s.ln() } else { 0.0 }
                    }
                }
            }
        }
        LikelihoodMode::Mlm { model, default, .. } => match model {
            MapModel::Reflection => l_ref_mlm(stats, *default, delta).ln(),
            MapModel::Decay => {
                let lambda = if stats.distance > 0.0 {
                    stats.hits as f64 / stats.distance
                } else {
                    *default
                };
                -lambda * r + if delta { lambda.ln() } else { 0.0 }
            }
        },
    };
    if let LikelihoodMode::Mlm {
        floor_log: Some(floor),
        ..
    } = mode
    {
        return Ok(raw.max(*floor));
    }
    Ok(raw)
}

/// Log-likelihood of a hit beam: sum of per-voxel log factors over the trace,
/// delta = 1 on the terminal segment only.  Out-of-range beams (no terminal
/// hit) must go through [`out_of_range_log_prob`].
pub fn beam_log_likelihood(
    grid: &VoxelStatsGrid,
    mode: &LikelihoodMode,
    trace: &BeamTrace,
) -> Result<f64> {
    if !trace.terminal_hit {
        return Err(Error::OutOfRangeBeam("non-hit trace"));
    }
    let last = trace.segments.len() - 1;
    let mut total = 0.0;
    for (k, &(index, r)) in trace.segments.iter().enumerate() {
        if index >= grid.geometry.len() {
            return Err(Error::IndexOutOfBounds {
                index,
                len: grid.geometry.len(),
            });
        }
        total += log_factor(&grid.get(index), mode, r, k == last)?;
    }
    Ok(total)
}

/// Which out-of-range probability to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutOfRangeKind {
    /// P(r < r_min) = 1 - prod l(r_i, delta=0); trace radius must be r_min.
    ShortRange,
    /// P(r > r_max) = prod l(r_i, delta=0); trace radius must be r_max.
    MaxRange,
}

/// Log-probability of an out-of-range measurement; every traversed voxel
/// contributes its delta = 0 factor.
pub fn out_of_range_log_prob(
    grid: &VoxelStatsGrid,
    mode: &LikelihoodMode,
    trace: &BeamTrace,
    kind: OutOfRangeKind,
) -> Result<f64> {
    let mut log_pass = 0.0;
    for &(index, r) in &trace.segments {
        if index >= grid.geometry.len() {
            return Err(Error::IndexOutOfBounds {
                index,
                len: grid.geometry.len(),
            });
        }
        log_pass += log_factor(&grid.get(index), mode, r, false)?;
    }
    Ok(match kind {
        OutOfRangeKind::MaxRange => log_pass,
        // log(1 - e^{log_pass}); log_pass = 0 (empty trace) gives -inf
        OutOfRangeKind::ShortRange => (-log_pass.exp()).ln_1p(),
    })
}

/// Log-likelihood of one scan beam at a hypothesized sensor pose.  The beam
/// is expressed in the sensor frame and transformed by `pose` before tracing.
///
/// A hit beam whose trace never terminates inside the mapped grid contributes
/// the delta = 0 pass product over whatever it did traverse (the hit is then
/// explained beyond the map); an empty trace contributes nothing.
pub fn scan_beam_log_likelihood(
    pose: &Pose,
    beam: &Beam,
    grid: &VoxelStatsGrid,
    mode: &LikelihoodMode,
) -> Result<f64> {
    let world = Beam {
        origin: pose.position + pose.orientation * beam.origin,
        direction: pose.orientation * beam.direction,
        radius: beam.radius,
        status: beam.status,
    };
    let trace = trace_beam(&grid.geometry, &world)?;
    match beam.status {
        BeamStatus::Hit if trace.terminal_hit => beam_log_likelihood(grid, mode, &trace),
        BeamStatus::Hit => out_of_range_log_prob(grid, mode, &trace, OutOfRangeKind::MaxRange),
        BeamStatus::ShortRange => {
            out_of_range_log_prob(grid, mode, &trace, OutOfRangeKind::ShortRange)
        }
        BeamStatus::MaxRange => {
            out_of_range_log_prob(grid, mode, &trace, OutOfRangeKind::MaxRange)
        }
    }
}
