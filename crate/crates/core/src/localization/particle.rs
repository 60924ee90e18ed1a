use nalgebra::{Matrix4, Quaternion, UnitQuaternion, Vector3, Vector4};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::grid::{Beam, Pose, VoxelStatsGrid};
use crate::likelihood::{scan_beam_log_likelihood, LikelihoodMode};

/// One pose hypothesis with its log-domain importance weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub pose: Pose,
    pub log_weight: f64,
}

/// A weighted particle population over poses.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSet {
    pub particles: Vec<Particle>,
}

/// Gaussian motion noise: per-axis translation sigma (meters) and per-axis
/// rotation-vector sigma (radians).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionNoise {
    pub trans_sigma: f64,
    pub rot_sigma: f64,
}

impl ParticleSet {
    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    /// Linear-domain weights normalized to sum 1; errors when every weight
    /// is -inf.
    pub fn normalized_weights(&self) -> Result<Vec<f64>> {
        let m = self
            .particles
            .iter()
            .map(|p| p.log_weight)
            .fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return Err(Error::WeightCollapse);
        }
        let unnorm: Vec<f64> = self
            .particles
            .iter()
            .map(|p| (p.log_weight - m).exp())
            .collect();
        let total: f64 = unnorm.iter().sum();
        Ok(unnorm.into_iter().map(|w| w / total).collect())
    }

    /// Effective sample size 1 / sum(w^2).
    pub fn effective_sample_size(&self) -> Result<f64> {
        let w = self.normalized_weights()?;
        Ok(1.0 / w.iter().map(|w| w * w).sum::<f64>())
    }
}

fn perturb(pose: &Pose, noise: MotionNoise, rng: &mut ChaCha8Rng) -> Pose {
    let nt = Normal::new(0.0, noise.trans_sigma).expect("sigma >= 0");
    let nr = Normal::new(0.0, noise.rot_sigma).expect("sigma >= 0");
    let dt = Vector3::new(nt.sample(rng), nt.sample(rng), nt.sample(rng));
    let axis = Vector3::new(nr.sample(rng), nr.sample(rng), nr.sample(rng));
    Pose {
        position: pose.position + dt,
        orientation: pose.orientation * UnitQuaternion::from_scaled_axis(axis),
    }
}

/// Particles around `center`: independent zero-mean Gaussian offsets on each
/// translation axis and on the rotation vector; uniform weights.
pub fn pf_init(
    center: &Pose,
    trans_sigma: f64,
    rot_sigma: f64,
    count: usize,
    seed: u64,
) -> Result<ParticleSet> {
    if count == 0 {
        return Err(Error::InvalidConfig("particle count must be >= 1".into()));
    }
    if trans_sigma < 0.0 || rot_sigma < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "negative sigma ({trans_sigma}, {rot_sigma})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = MotionNoise {
        trans_sigma,
        rot_sigma,
    };
    let lw = -(count as f64).ln();
    Ok(ParticleSet {
        particles: (0..count)
            .map(|_| Particle {
                pose: perturb(center, noise, &mut rng),
                log_weight: lw,
            })
            .collect(),
    })
}

/// Low-variance systematic resampling to uniform weights.
fn systematic_resample(set: &ParticleSet, weights: &[f64], rng: &mut ChaCha8Rng) -> ParticleSet {
    let n = set.len();
    let lw = -(n as f64).ln();
    let u0: f64 = rng.random_range(0.0..1.0 / n as f64);
    let mut particles = Vec::with_capacity(n);
    let mut cum = weights[0];
    let mut i = 0usize;
    for k in 0..n {
        let u = u0 + k as f64 / n as f64;
        while u > cum && i + 1 < n {
            i += 1;
            cum += weights[i];
        }
        particles.push(Particle {
            pose: set.particles[i].pose.clone(),
            log_weight: lw,
        });
    }
    ParticleSet { particles }
}

/// One filter step: propagate every particle through `odometry` composed with
/// sampled motion noise, reweight by the scan log-likelihood at the new pose,
/// normalize, and resample systematically when the effective sample size
/// drops below half the particle count.
pub fn pf_step(
    set: &ParticleSet,
    odometry: &Pose,
    noise: MotionNoise,
    scan: &[Beam],
    grid: &VoxelStatsGrid,
    mode: &LikelihoodMode,
    seed: u64,
) -> Result<ParticleSet> {
    if set.is_empty() {
        return Err(Error::InvalidConfig("empty particle set".into()));
    }
    if scan.is_empty() {
        return Err(Error::InvalidConfig("empty scan".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut next = ParticleSet {
        particles: Vec::with_capacity(set.len()),
    };
    for p in &set.particles {
        let moved = p.pose.compose(odometry);
        let pose = perturb(&moved, noise, &mut rng);
        let mut lw = p.log_weight;
        for beam in scan {
            lw += scan_beam_log_likelihood(&pose, beam, grid, mode)?;
        }
        next.particles.push(Particle {
            pose,
            log_weight: lw,
        });
    }
    let weights = next.normalized_weights()?; // WeightCollapse when all -inf
    for (p, &w) in next.particles.iter_mut().zip(&weights) {
        p.log_weight = w.ln();
    }
    let ess = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();
    if ess < set.len() as f64 / 2.0 {
        next = systematic_resample(&next, &weights, &mut rng);
    }
    Ok(next)
}

/// Weighted mean pose: arithmetic mean of positions, largest-eigenvector
/// quaternion mean of orientations.
pub fn pf_estimate(set: &ParticleSet) -> Result<Pose> {
    if set.is_empty() {
        return Err(Error::EmptyEvaluation);
    }
    let weights = set.normalized_weights()?;
    let mut position = Vector3::zeros();
    let mut accum = Matrix4::zeros();
    for (p, &w) in set.particles.iter().zip(&weights) {
        position += w * p.pose.position;
        let q: Vector4<f64> = p.pose.orientation.into_inner().coords;
        accum += w * q * q.transpose();
    }
    let eig = nalgebra::SymmetricEigen::new(accum);
    let mut best = 0;
    for i in 1..4 {
        if eig.eigenvalues[i] > eig.eigenvalues[best] {
            best = i;
        }
    }
    let v = eig.eigenvectors.column(best);
    let orientation = UnitQuaternion::from_quaternion(Quaternion::from(Vector4::new(
        v[0], v[1], v[2], v[3],
    )));
    Ok(Pose {
        position,
        orientation,
    })
}
