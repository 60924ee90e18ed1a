//! Criteria 10 and 11: held-out evaluation metrics on a synthetic 3D world,
//! and Monte-Carlo localization accuracy.

use std::f64::consts::TAU;

use nalgebra::{UnitQuaternion, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gridbelief_core::{
    fit_prior, kl_divergence_mc, loglik_ratio, map_from_scans, pf_estimate, pf_init, pf_step,
    scan_beam_log_likelihood, Beam, GridGeometry, LikelihoodMode, MapModel, MotionNoise, Pose,
    SyntheticWorld, VoxelStatsGrid,
};

fn pose_at(position: Vector3<f64>) -> Pose {
    Pose::new(position, UnitQuaternion::identity())
}

fn voxel_center(g: &GridGeometry, gx: u32, gy: u32, gz: u32) -> Vector3<f64> {
    g.origin
        + Vector3::new(
            (gx as f64 + 0.5) * g.edge,
            (gy as f64 + 0.5) * g.edge,
            (gz as f64 + 0.5) * g.edge,
        )
}

fn scan_log_lik(
    grid: &VoxelStatsGrid,
    mode: &LikelihoodMode,
    pose: &Pose,
    beams: &[Beam],
) -> f64 {
    beams
        .iter()
        .map(|b| scan_beam_log_likelihood(pose, b, grid, mode).unwrap_or(f64::NEG_INFINITY))
        .sum()
}

/// 8x8x3 decay world: dense walls around the x/y perimeter, two interior
/// pillars, and a mild attenuation gradient across the z layers.
fn world_3d() -> SyntheticWorld {
    let g = GridGeometry::new([8, 8, 3], 0.5, Vector3::zeros()).unwrap();
    let mut values = vec![0.0; 8 * 8 * 3];
    for z in 0..3u32 {
        for y in 0..8u32 {
            for x in 0..8u32 {
                let i = (x + 8 * (y + 8 * z)) as usize;
                let border = x == 0 || x == 7 || y == 0 || y == 7;
                let pillar = (x == 2 && y == 5) || (x == 5 && y == 2);
                values[i] = if border {
                    2.5
                } else if pillar {
                    1.8
                } else {
                    0.2 + 0.1 * z as f64
                };
            }
        }
    }
    SyntheticWorld::new(g, MapModel::Decay, values).unwrap()
}

/// 12 azimuths at three elevation tilts.
fn directions_3d() -> Vec<Vector3<f64>> {
    let mut dirs = Vec::new();
    for k in 0..12 {
        let az = TAU * k as f64 / 12.0;
        for tilt in [-0.2f64, 0.0, 0.2] {
            dirs.push(Vector3::new(
                az.cos() * tilt.cos(),
                az.sin() * tilt.cos(),
                tilt.sin(),
            ));
        }
    }
    dirs
}

/// Criterion 10: on held-out scans the cumulated log-likelihood ratio and the
/// KL-divergence ratio (MLM over FMP) both exceed 1.  Only these directional
/// claims are checked — the absolute table values depend on an unstated world
/// and are not reproducible.
#[test]
fn criterion_10_held_out_metrics_favor_fmp() {
    let world = world_3d();
    let g = &world.geometry;
    let dirs = directions_3d();
    let r_max = 4.0;

    // sparse mapping pass: one scan per lattice pose on the center layer
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut mapping = Vec::new();
    for gx in [1u32, 3, 5] {
        for gy in [1u32, 3, 5] {
            let pose = pose_at(voxel_center(g, gx, gy, 1));
            let scan = world.simulate_scan(&pose, &dirs, r_max, &mut rng).unwrap();
            mapping.push((pose, scan));
        }
    }
    let grid = map_from_scans(g, &mapping).unwrap();

    // held-out scans from poses offset from the mapping lattice
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut eval = Vec::new();
    for gx in [2u32, 4, 6] {
        for gy in [2u32, 4] {
            let mut position = voxel_center(g, gx, gy, 1);
            position.x += 0.1;
            position.y += 0.1;
            let pose = pose_at(position);
            let scan = world.simulate_scan(&pose, &dirs, r_max, &mut rng).unwrap();
            eval.push((pose, scan));
        }
    }

    let prior = fit_prior(&grid, MapModel::Decay).unwrap();
    let ll = loglik_ratio(&grid, &eval, &prior).unwrap();
    println!(
        "criterion 10: loglik ratio {:.4} (mlm {:.1}, fmp {:.1}, {} beams, {} excluded)",
        ll.ratio,
        ll.mlm_total(),
        ll.fmp_total(),
        ll.evaluated_beams,
        ll.excluded_beams
    );
    assert!(ll.ratio > 1.0, "loglik ratio {} <= 1", ll.ratio);

    // same mode construction as loglik_ratio: fitted prior, prior-mean default
    let fmp = LikelihoodMode::Fmp {
        prior,
        unvisited_fallback: None,
    };
    let mlm = LikelihoodMode::Mlm {
        model: MapModel::Decay,
        default: prior.alpha / prior.beta,
        floor_log: None,
    };
    let mut kl_mlm = 0.0;
    let mut kl_fmp = 0.0;
    for (pose, beams) in &eval {
        kl_mlm += kl_divergence_mc(pose, 0.05, |p| scan_log_lik(&grid, &mlm, p, beams), 400, 0)
            .unwrap();
        kl_fmp += kl_divergence_mc(pose, 0.05, |p| scan_log_lik(&grid, &fmp, p, beams), 400, 0)
            .unwrap();
    }
    let kl_ratio = kl_mlm / kl_fmp;
    println!("criterion 10: kl ratio {kl_ratio:.4} (mlm {kl_mlm:.4}, fmp {kl_fmp:.4})");
    assert!(kl_fmp.is_finite(), "FMP KL must be finite, got {kl_fmp}");
    assert!(kl_ratio > 1.0, "kl ratio {kl_ratio} <= 1");
}

/// 10x10 single-layer decay world matching the localization fixture: dense
/// border, two pillars, thin free space.
fn world_flat() -> SyntheticWorld {
    let g = GridGeometry::new([10, 10, 1], 0.5, Vector3::zeros()).unwrap();
    let mut values = vec![0.0; 100];
    for y in 0..10u32 {
        for x in 0..10u32 {
            let i = (x + 10 * y) as usize;
            let border = x == 0 || x == 9 || y == 0 || y == 9;
            let pillar = (x == 3 && y == 3) || (x == 6 && y == 5);
            values[i] = if border {
                3.0
            } else if pillar {
                2.0
            } else {
                0.3
            };
        }
    }
    SyntheticWorld::new(g, MapModel::Decay, values).unwrap()
}

fn ring_directions(count: usize) -> Vec<Vector3<f64>> {
    (0..count)
        .map(|k| {
            let az = TAU * k as f64 / count as f64;
            Vector3::new(az.cos(), az.sin(), 0.0)
        })
        .collect()
}

/// Square loop through free space: 16 half-voxel steps.
fn trajectory() -> Vec<Pose> {
    let mut poses = vec![pose_at(Vector3::new(1.25, 1.25, 0.25))];
    let legs = [
        (Vector3::new(0.5, 0.0, 0.0), 5),
        (Vector3::new(0.0, 0.5, 0.0), 5),
        (Vector3::new(-0.5, 0.0, 0.0), 5),
        (Vector3::new(0.0, -0.5, 0.0), 1),
    ];
    for (step, n) in legs {
        for _ in 0..n {
            let last = poses.last().unwrap().position;
            poses.push(pose_at(last + step));
        }
    }
    poses
}

/// Criterion 11: a 3000-particle FMP-decay filter keeps the mean position
/// error below half a voxel edge after convergence, and its steady-state
/// error does not exceed floored MLM's over 10 seeded runs.
#[test]
fn criterion_11_mcl_accuracy() {
    let world = world_flat();
    let g = &world.geometry;
    let map_dirs = ring_directions(16);
    let scan_dirs = ring_directions(8);
    let r_max = 6.0;

    let mut rng = ChaCha8Rng::seed_from_u64(301);
    let mut mapping = Vec::new();
    for gx in [1u32, 3, 5, 7] {
        for gy in [1u32, 3, 5, 7] {
            let pose = pose_at(voxel_center(g, gx, gy, 0));
            for _ in 0..2 {
                let scan = world
                    .simulate_scan(&pose, &map_dirs, r_max, &mut rng)
                    .unwrap();
                mapping.push((pose.clone(), scan));
            }
        }
    }
    let grid = map_from_scans(g, &mapping).unwrap();
    let prior = fit_prior(&grid, MapModel::Decay).unwrap();
    let fmp = LikelihoodMode::Fmp {
        prior,
        unvisited_fallback: None,
    };
    // the floor keeps impossible beams from annihilating every particle
    let mlm = LikelihoodMode::Mlm {
        model: MapModel::Decay,
        default: prior.alpha / prior.beta,
        floor_log: Some(1e-9f64.ln()),
    };

    let truth = trajectory();
    let noise = MotionNoise {
        trans_sigma: 0.1,
        rot_sigma: 0.05,
    };
    let steady_from = 5; // the cloud starts near truth; converged well before this
    let mut steady = [Vec::new(), Vec::new()]; // [fmp, mlm]
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(400 + seed);
        let scans: Vec<Vec<Beam>> = truth
            .iter()
            .map(|p| world.simulate_scan(p, &scan_dirs, r_max, &mut rng).unwrap())
            .collect();
        for (which, mode) in [(0usize, &fmp), (1usize, &mlm)] {
            let mut set = pf_init(&truth[0], 0.1, 0.05, 3000, 500 + seed).unwrap();
            for i in 1..truth.len() {
                let odometry = truth[i - 1].delta(&truth[i]);
                set = pf_step(
                    &set,
                    &odometry,
                    noise,
                    &scans[i],
                    &grid,
                    mode,
                    seed * 1000 + i as u64,
                )
                .unwrap();
                if i >= steady_from {
                    let est = pf_estimate(&set).unwrap();
                    steady[which].push((est.position - truth[i].position).norm());
                }
            }
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let fmp_mean = mean(&steady[0]);
    let mlm_mean = mean(&steady[1]);
    println!(
        "criterion 11: steady-state mean error fmp {:.4} m, mlm {:.4} m (half edge {:.2} m)",
        fmp_mean,
        mlm_mean,
        0.5 * g.edge
    );
    assert!(
        fmp_mean < 0.5 * g.edge,
        "FMP steady-state error {fmp_mean:.4} >= {:.4}",
        0.5 * g.edge
    );
    assert!(
        fmp_mean <= mlm_mean,
        "FMP {fmp_mean:.4} worse than MLM {mlm_mean:.4}"
    );
}
