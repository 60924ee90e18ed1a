//! Deterministic fixtures shared by the criterion benchmarks.

use nalgebra::{UnitQuaternion, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gridbelief_core::{Beam, BeamStatus, GridGeometry, Pose, VoxelStats, VoxelStatsGrid};

/// 32x32x4 grid with pseudo-random but seeded statistics in every voxel.
pub fn demo_grid() -> VoxelStatsGrid {
    let g = GridGeometry::new([32, 32, 4], 0.5, Vector3::zeros()).unwrap();
    let mut grid = VoxelStatsGrid::new(g);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..grid.geometry.len() {
        let h = rng.random_range(0..20u64);
        let m = rng.random_range(0..20u64);
        let r = rng.random_range(0.1..30.0);
        grid.get_mut(i).unwrap().add(&VoxelStats::new(h, m, r));
    }
    grid
}

/// A fan of unit-direction beams from the grid center, alternating hit and
/// max-range status.
pub fn fan_beams(count: usize) -> Vec<Beam> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    (0..count)
        .map(|k| {
            let az = std::f64::consts::TAU * k as f64 / count as f64;
            let dir = Vector3::new(az.cos(), az.sin(), rng.random_range(-0.1..0.1)).normalize();
            let status = if k % 2 == 0 {
                BeamStatus::Hit
            } else {
                BeamStatus::MaxRange
            };
            Beam::new(Vector3::zeros(), dir, rng.random_range(2.0..7.0), status).unwrap()
        })
        .collect()
}

pub fn center_pose() -> Pose {
    Pose::new(Vector3::new(8.0, 8.0, 1.0), UnitQuaternion::identity())
}
