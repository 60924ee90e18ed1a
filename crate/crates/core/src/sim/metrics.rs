use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::grid::{Beam, BeamStatus, Pose, VoxelStatsGrid};
use crate::likelihood::{scan_beam_log_likelihood, LikelihoodMode};
use crate::mapping::{fit_prior, MapModel, PriorParams};

/// Cumulated-log-likelihood comparison of MLM against FMP over a scan set,
/// evaluated at ground-truth poses.  Hit beams (density factors) and
/// out-of-range beams (probability factors) are accumulated separately as
/// well as jointly, since they are dimensionally different quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct LoglikRatio {
    /// (total MLM log-lik) / (total FMP log-lik); > 1 means FMP assigns the
    /// observed data a higher likelihood (both totals are negative).
    pub ratio: f64,
    pub mlm_hit_log_lik: f64,
    pub mlm_out_of_range_log_lik: f64,
    pub fmp_hit_log_lik: f64,
    pub fmp_out_of_range_log_lik: f64,
    /// Beams dropped from both sums because either mode scored them -inf.
    pub excluded_beams: usize,
    pub evaluated_beams: usize,
}

impl LoglikRatio {
    pub fn mlm_total(&self) -> f64 {
        self.mlm_hit_log_lik + self.mlm_out_of_range_log_lik
    }

    pub fn fmp_total(&self) -> f64 {
        self.fmp_hit_log_lik + self.fmp_out_of_range_log_lik
    }
}

/// Evaluate the MLM/FMP cumulated log-likelihood ratio on `scans` against a
/// mapped grid.  Beams scored -inf by either mode are excluded pairwise.
pub fn loglik_ratio(
    grid: &VoxelStatsGrid,
    scans: &[(Pose, Vec<Beam>)],
    prior: &PriorParams,
) -> Result<LoglikRatio> {
    let fallback = if prior.model == MapModel::Decay && prior.beta == 0.0 {
        Some(fit_prior(grid, MapModel::Decay)?)
    } else {
        None
    };
    let fmp = LikelihoodMode::Fmp {
        prior: *prior,
        unvisited_fallback: fallback,
    };
    let ml_default = match prior.model {
        MapModel::Reflection => 0.5,
        // unvisited decay voxels assume the prior-mean rate
        MapModel::Decay => {
            let p = fallback.as_ref().unwrap_or(prior);
            p.alpha / p.beta
        }
    };
    let mlm = LikelihoodMode::Mlm {
        model: prior.model,
        default: ml_default,
        floor_log: None,
    };

    let mut out = LoglikRatio {
        ratio: f64::NAN,
        mlm_hit_log_lik: 0.0,
        mlm_out_of_range_log_lik: 0.0,
        fmp_hit_log_lik: 0.0,
        fmp_out_of_range_log_lik: 0.0,
        excluded_beams: 0,
        evaluated_beams: 0,
    };
    for (pose, beams) in scans {
        for beam in beams {
            let l_mlm = scan_beam_log_likelihood(pose, beam, grid, &mlm)?;
            let l_fmp = scan_beam_log_likelihood(pose, beam, grid, &fmp)?;
            if !l_mlm.is_finite() || !l_fmp.is_finite() {
                out.excluded_beams += 1;
                continue;
            }
            out.evaluated_beams += 1;
            if beam.status == BeamStatus::Hit {
                out.mlm_hit_log_lik += l_mlm;
                out.fmp_hit_log_lik += l_fmp;
            } else {
                out.mlm_out_of_range_log_lik += l_mlm;
                out.fmp_out_of_range_log_lik += l_fmp;
            }
        }
    }
    if out.evaluated_beams == 0 {
        return Err(Error::EmptyEvaluation);
    }
    out.ratio = out.mlm_total() / out.fmp_total();
    Ok(out)
}

/// Discrete KL divergence D(p_gt || p) between an isotropic Gaussian
/// ground-truth pose belief and a likelihood function, both normalized over a
/// deterministic sample grid in the x/y plane around `p_gt_center`.
///
/// The grid spans +-8 sigma per axis with ceil(sqrt(samples))^2 cell-center
/// points.  `seed` is accepted for interface stability but unused — the
/// sample set is deterministic.  Returns +inf when the likelihood vanishes on
/// cells where the ground truth has mass.
pub fn kl_divergence_mc<F: Fn(&Pose) -> f64>(
    p_gt_center: &Pose,
    sigma: f64,
    log_lik_fn: F,
    samples: usize,
    _seed: u64,
) -> Result<f64> {
    if samples < 100 {
        return Err(Error::InvalidConfig(format!(
            "need >= 100 samples, got {samples}"
        )));
    }
    if !(sigma > 0.0) {
        return Err(Error::InvalidConfig(format!("sigma must be > 0: {sigma}")));
    }
    let side = (samples as f64).sqrt().ceil() as usize;
    let span = 8.0 * sigma;
    let offset = |k: usize| -span + 2.0 * span * (k as f64 + 0.5) / side as f64;

    let mut gt = Vec::with_capacity(side * side);
    let mut ll = Vec::with_capacity(side * side);
    for ky in 0..side {
        let dy = offset(ky);
        for kx in 0..side {
            let dx = offset(kx);
            gt.push((-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp());
            let mut pose = p_gt_center.clone();
            pose.position.x += dx;
            pose.position.y += dy;
            ll.push(log_lik_fn(&pose));
        }
    }

    let gt_total: f64 = gt.iter().sum();
    let m = ll
        .iter()
        .copied()
        .filter(|l| l.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return Ok(f64::INFINITY);
    }
    let p: Vec<f64> = ll.iter().map(|&l| (l - m).exp()).collect();
    let p_total: f64 = p.iter().sum();

    let mut kl = 0.0;
    for (&g, &p) in gt.iter().zip(&p) {
        let g = g / gt_total;
        if g == 0.0 {
            continue;
        }
        if p == 0.0 {
            return Ok(f64::INFINITY);
        }
        kl += g * (g / (p / p_total)).ln();
    }
    Ok(kl)
}

/// One-tailed paired Student's t-test of H1: mean(a - b) > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedTTest {
    pub t: f64,
    pub degrees_of_freedom: f64,
    /// P(T <= t) under H0 — the confidence that a's mean genuinely exceeds
    /// b's; "significant at p > 0.9999" reads `confidence > 0.9999`.
    pub confidence: f64,
}

pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<PairedTTest> {
    if a.len() != b.len() {
        return Err(Error::InvalidConfig(format!(
            "paired samples differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::InvalidConfig("need >= 2 pairs".into()));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = d.iter().sum::<f64>() / n as f64;
    let var = d.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    let df = (n - 1) as f64;
    if var == 0.0 {
        // all differences identical: the direction is certain
        let t = if mean > 0.0 {
            f64::INFINITY
        } else if mean < 0.0 {
            f64::NEG_INFINITY
        } else {
            0.0
        };
        let confidence = if mean > 0.0 {
            1.0
        } else if mean < 0.0 {
            0.0
        } else {
            0.5
        };
        return Ok(PairedTTest {
            t,
            degrees_of_freedom: df,
            confidence,
        });
    }
    let t = mean / (var / n as f64).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("valid dof");
    Ok(PairedTTest {
        t,
        degrees_of_freedom: df,
        confidence: dist.cdf(t),
    })
}
