use nalgebra::Vector3;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Exp, Exp1, Gamma};

use crate::error::{Error, Result};
use crate::grid::{GridGeometry, VoxelStats, VoxelStatsGrid};
use crate::localization::HistogramBelief;
use crate::mapping::{moment_match_prior, MapModel, PriorParams};

/// Likelihood method compared in the corridor experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Most-likely-map plug-in likelihood.
    Mlm,
    /// Full map posterior with the flat prior: Beta(1,1) for reflection,
    /// Gamma(1,0) for decay.
    FmpUniform,
    /// Full map posterior with a prior moment-matched to the run's own
    /// maximum-likelihood map.
    FmpConjugate,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Mlm => "mlm",
            Method::FmpUniform => "fmp_uniform",
            Method::FmpConjugate => "fmp_conjugate",
        }
    }
}

/// Configuration of one corridor experiment sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct CorridorConfig {
    /// Corridor length in voxels (the number of localization iterations).
    pub length: usize,
    /// Mapping observations per voxel.
    pub n: u32,
    pub model: MapModel,
    pub method: Method,
    pub runs: usize,
    pub seed: u64,
}

impl CorridorConfig {
    fn validate(&self) -> Result<()> {
        if self.length < 2 {
            return Err(Error::InvalidConfig(format!(
                "corridor length must be >= 2, got {}",
                self.length
            )));
        }
        if self.n < 1 {
            return Err(Error::InvalidConfig("n must be >= 1".into()));
        }
        if self.runs < 1 {
            return Err(Error::InvalidConfig("runs must be >= 1".into()));
        }
        Ok(())
    }
}

/// Aggregate of per-run localization scores rho = mean over iterations of the
/// belief mass at the true position.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub rhos: Vec<f64>,
    pub mean: f64,
    /// Population variance across runs.
    pub variance: f64,
}

impl RunResult {
    fn from_rhos(rhos: Vec<f64>) -> Self {
        let n = rhos.len() as f64;
        let mean = rhos.iter().sum::<f64>() / n;
        let variance = rhos.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / n;
        Self {
            rhos,
            mean,
            variance,
        }
    }
}

/// Ground-truth corridor map: i.i.d. Uniform(0,1) reflection probabilities or
/// Gamma(1,1) decay rates.
pub fn synth_corridor_map(length: usize, model: MapModel, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_map(length, model, &mut rng)
}

fn sample_map(length: usize, model: MapModel, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..length)
        .map(|_| match model {
            MapModel::Reflection => rng.random::<f64>(),
            MapModel::Decay => rng.sample::<f64, _>(Exp1),
        })
        .collect()
}

/// Mapping phase over a known corridor: every voxel receives exactly n direct
/// observations.  Reflection: H ~ Binomial(n, mu), M = n - H, R = n.  Decay:
/// n censored exponential draws per voxel (t < 1 is a hit contributing t to
/// R; t >= 1 is a miss contributing the full voxel length).
pub fn simulate_mapping(map: &[f64], n: u32, model: MapModel, seed: u64) -> VoxelStatsGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let geometry = GridGeometry::new([map.len() as u32, 1, 1], 1.0, Vector3::zeros())
        .expect("corridor geometry");
    let mut grid = VoxelStatsGrid::new(geometry);
    for (i, &value) in map.iter().enumerate() {
        let stats = match model {
            MapModel::Reflection => {
                let h = Binomial::new(n as u64, value).expect("mu in [0,1]").sample(&mut rng);
                VoxelStats::new(h, n as u64 - h, n as f64)
            }
            MapModel::Decay => {
                let exp = Exp::new(value.max(f64::MIN_POSITIVE)).expect("positive rate");
                let mut s = VoxelStats::default();
                for _ in 0..n {
                    let t: f64 = exp.sample(&mut rng);
                    if t < 1.0 {
                        s.hits += 1;
                        s.distance += t;
                    } else {
                        s.misses += 1;
                        s.distance += 1.0;
                    }
                }
                s
            }
        };
        grid.get_mut(i as u64).unwrap().add(&stats);
    }
    grid
}

/// Outcome of one simulated localization beam fired down the corridor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorridorBeamOutcome {
    /// Reflecting voxel, or `None` for a max-range outcome.
    pub hit_voxel: Option<u64>,
    /// Distance traveled from the near face of the start voxel.
    pub radius: f64,
}

/// Fire one beam from the near face of `position` toward the corridor end,
/// sampling the physical forward model voxel by voxel.
pub fn simulate_beam<R: Rng>(
    map: &[f64],
    position: usize,
    model: MapModel,
    rng: &mut R,
) -> Result<CorridorBeamOutcome> {
    if position >= map.len() {
        return Err(Error::PositionOutOfRange {
            position: position as u64,
            length: map.len() as u64,
        });
    }
    for (i, &value) in map.iter().enumerate().skip(position) {
        match model {
            MapModel::Reflection => {
                if rng.random_bool(value) {
                    return Ok(CorridorBeamOutcome {
                        hit_voxel: Some(i as u64),
                        radius: (i - position) as f64 + 1.0,
                    });
                }
            }
            MapModel::Decay => {
                let t: f64 = Exp::new(value.max(f64::MIN_POSITIVE)).unwrap().sample(rng);
                if t < 1.0 {
                    return Ok(CorridorBeamOutcome {
                        hit_voxel: Some(i as u64),
                        radius: (i - position) as f64 + t,
                    });
                }
            }
        }
    }
    Ok(CorridorBeamOutcome {
        hit_voxel: None,
        radius: (map.len() - position) as f64,
    })
}

/// Per-voxel log-likelihood tables for the reflection corridor: log factor
/// for a hit and for a pass at every position hypothesis.
struct ReflectionTables {
    log_hit: Vec<f64>,
    log_pass: Vec<f64>,
}

impl ReflectionTables {
    fn build(stats: &[VoxelStats], method: Method) -> Result<Self> {
        let prior = match method {
            Method::Mlm => None,
            Method::FmpUniform => Some(PriorParams::uniform_reflection()),
            Method::FmpConjugate => {
                let values: Vec<f64> = stats
                    .iter()
                    .map(|s| s.hits as f64 / (s.hits + s.misses) as f64)
                    .collect();
                // an all-identical ML map (possible at tiny n) has no moments
                // to match; fall back to the flat prior
                Some(match moment_match_prior(&values, MapModel::Reflection) {
                    Ok(p) => p,
                    Err(Error::DegenerateMoments) => PriorParams::uniform_reflection(),
                    Err(e) => return Err(e),
                })
            }
        };
        let factor = |s: &VoxelStats, delta: bool| -> f64 {
            match &prior {
                Some(p) => crate::likelihood::l_ref(s, p, delta).ln(),
                None => crate::likelihood::l_ref_mlm(s, 0.5, delta).ln(),
            }
        };
        Ok(Self {
            log_hit: stats.iter().map(|s| factor(s, true)).collect(),
            log_pass: stats.iter().map(|s| factor(s, false)).collect(),
        })
    }
}

/// Gamma posterior parameters (a, b) per voxel, or the plugged-in ML rate.
enum DecayTables {
    Fmp { a: Vec<f64>, b: Vec<f64> },
    Mlm { lambda: Vec<f64> },
}

impl DecayTables {
    fn build(stats: &[VoxelStats], method: Method) -> Result<Self> {
        Ok(match method {
            Method::Mlm => DecayTables::Mlm {
                lambda: stats.iter().map(|s| s.hits as f64 / s.distance).collect(),
            },
            Method::FmpUniform => {
                let p = PriorParams::uninformative_decay();
                DecayTables::Fmp {
                    a: stats.iter().map(|s| s.hits as f64 + p.alpha).collect(),
                    b: stats.iter().map(|s| s.distance + p.beta).collect(),
                }
            }
            Method::FmpConjugate => {
                let values: Vec<f64> = stats
                    .iter()
                    .map(|s| s.hits as f64 / s.distance)
                    .collect();
                let p = moment_match_prior(&values, MapModel::Decay)?;
                DecayTables::Fmp {
                    a: stats.iter().map(|s| s.hits as f64 + p.alpha).collect(),
                    b: stats.iter().map(|s| s.distance + p.beta).collect(),
                }
            }
        })
    }

    /// Log factor per position hypothesis for an observed hit range r inside
    /// the hypothesis voxel.
    fn log_factors(&self, r: f64, out: &mut [f64]) {
        match self {
            DecayTables::Fmp { a, b } => {
                for ((o, &a), &b) in out.iter_mut().zip(a).zip(b) {
                    let s = b + r;
                    *o = a * (b.ln() - s.ln()) + a.ln() - s.ln();
                }
            }
            DecayTables::Mlm { lambda } => {
                for (o, &l) in out.iter_mut().zip(lambda) {
                    *o = -l * r + l.ln();
                }
            }
        }
    }
}

/// The corridor localization loop: cyclic deterministic motion, one own-voxel
/// measurement per iteration, belief reset to uniform whenever a measurement
/// annihilates the posterior (MLM zero likelihoods).  Returns the mean over
/// iterations of the pre-update belief at the true position.
fn localize<F>(length: usize, mut step_log_liks: F) -> Result<f64>
where
    F: FnMut(usize, &mut [f64]),
{
    let mut bel = HistogramBelief::uniform(length)?;
    let mut log_liks = vec![0.0; length];
    let mut rho = 0.0;
    for j in 0..length {
        if j > 0 {
            bel = bel.predict_cyclic(1);
        }
        rho += bel.probs()[j];
        step_log_liks(j, &mut log_liks);
        bel = match bel.update(&log_liks) {
            Ok(b) => b,
            Err(Error::ZeroMass) => HistogramBelief::uniform(length)?,
            Err(e) => return Err(e),
        };
    }
    Ok(rho / length as f64)
}

fn corridor_run(config: &CorridorConfig, rng: &mut ChaCha8Rng) -> Result<f64> {
    let length = config.length;
    let map = sample_map(length, config.model, rng);
    match config.model {
        MapModel::Reflection => {
            let stats: Vec<VoxelStats> = map
                .iter()
                .map(|&mu| {
                    let h = Binomial::new(config.n as u64, mu)
                        .expect("mu in [0,1]")
                        .sample(rng);
                    VoxelStats::new(h, config.n as u64 - h, config.n as f64)
                })
                .collect();
            let tables = ReflectionTables::build(&stats, config.method)?;
            localize(length, |j, out| {
                let table = if rng.random_bool(map[j]) {
                    &tables.log_hit
                } else {
                    &tables.log_pass
                };
                out.copy_from_slice(table);
            })
        }
        MapModel::Decay => {
            // localization-phase ranges are drawn from the exponential decay
            // law itself, so the mapping phase records n uncensored ranges
            // per voxel: H = n, R ~ Gamma(n, lambda)
            let stats: Vec<VoxelStats> = map
                .iter()
                .map(|&lambda| {
                    let r = Gamma::new(config.n as f64, 1.0 / lambda.max(f64::MIN_POSITIVE))
                        .expect("positive shape/scale")
                        .sample(rng);
                    VoxelStats::new(config.n as u64, 0, r)
                })
                .collect();
            let tables = DecayTables::build(&stats, config.method)?;
            localize(length, |j, out| {
                let r: f64 = Exp::new(map[j].max(f64::MIN_POSITIVE))
                    .unwrap()
                    .sample(rng);
                tables.log_factors(r, out);
            })
        }
    }
}

/// Full corridor experiment: `runs` independent map/mapping/localization
/// cycles.  Per-run randomness derives from (seed, run index) only, so two
/// configs differing in `method` alone see identical maps and measurement
/// draws — their per-run rhos are paired samples.
pub fn run_corridor_experiment(config: &CorridorConfig) -> Result<RunResult> {
    config.validate()?;
    let mut rhos = Vec::with_capacity(config.runs);
    for run in 0..config.runs {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(run as u64);
        rhos.push(corridor_run(config, &mut rng)?);
    }
    Ok(RunResult::from_rhos(rhos))
}
