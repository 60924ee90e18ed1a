use nalgebra::Vector3;
use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::error::{Error, Result};
use crate::grid::{Beam, BeamStatus, GridGeometry, Pose, VoxelStatsGrid};
use crate::mapping::{update_stats, MapModel};
use crate::raycast::trace_beam;

/// A ground-truth world: one true reflection probability or decay rate per
/// voxel, used to simulate sensor scans for fixtures and benchmarks.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticWorld {
    pub geometry: GridGeometry,
    pub model: MapModel,
    values: Vec<f64>,
}

impl SyntheticWorld {
    pub fn new(geometry: GridGeometry, model: MapModel, values: Vec<f64>) -> Result<Self> {
        if values.len() as u64 != geometry.len() {
            return Err(Error::InvalidConfig(format!(
                "{} values for {} voxels",
                values.len(),
                geometry.len()
            )));
        }
        let valid = values.iter().all(|&v| match model {
            MapModel::Reflection => (0.0..=1.0).contains(&v),
            MapModel::Decay => v >= 0.0,
        });
        if !valid {
            return Err(Error::InvalidConfig(
                "world values outside the model's domain".into(),
            ));
        }
        Ok(Self {
            geometry,
            model,
            values,
        })
    }

    pub fn value(&self, index: u64) -> f64 {
        self.values[index as usize]
    }

    /// Simulate one scan from `pose` (which must lie inside the grid): for
    /// each sensor-frame direction, walk the ray voxel by voxel and sample
    /// the forward model — per-voxel Bernoulli(mu) for reflection (hit placed
    /// at the segment midpoint), per-segment exponential depth for decay.
    /// Returned beams are in the sensor frame.
    pub fn simulate_scan<R: Rng>(
        &self,
        pose: &Pose,
        directions: &[Vector3<f64>],
        r_max: f64,
        rng: &mut R,
    ) -> Result<Vec<Beam>> {
        if self.geometry.voxel_index_of(&pose.position).is_none() {
            return Err(Error::InvalidConfig(format!(
                "sensor position {:?} outside the grid",
                pose.position
            )));
        }
        let mut scan = Vec::with_capacity(directions.len());
        for dir in directions {
            let probe = Beam::new(
                pose.position,
                pose.orientation * dir,
                r_max,
                BeamStatus::MaxRange,
            )?;
            let trace = trace_beam(&self.geometry, &probe)?;
            let mut travelled = 0.0;
            let mut outcome = None;
            for &(index, len) in &trace.segments {
                match self.model {
                    MapModel::Reflection => {
                        if rng.random_bool(self.values[index as usize]) {
                            outcome = Some(travelled + 0.5 * len);
                        }
                    }
                    MapModel::Decay => {
                        let rate = self.values[index as usize];
                        if rate > 0.0 {
                            let t: f64 = Exp::new(rate).unwrap().sample(rng);
                            if t < len {
                                outcome = Some(travelled + t);
                            }
                        }
                    }
                }
                if outcome.is_some() {
                    break;
                }
                travelled += len;
            }
            scan.push(match outcome {
                Some(radius) => Beam::new(Vector3::zeros(), *dir, radius, BeamStatus::Hit)?,
                None => Beam::new(Vector3::zeros(), *dir, r_max, BeamStatus::MaxRange)?,
            });
        }
        Ok(scan)
    }
}

/// Build a map from scans taken at known poses: every beam is transformed to
/// the world frame, traced, and folded into the statistics.
pub fn map_from_scans(
    geometry: &GridGeometry,
    scans: &[(Pose, Vec<Beam>)],
) -> Result<VoxelStatsGrid> {
    let mut grid = VoxelStatsGrid::new(geometry.clone());
    for (pose, beams) in scans {
        for beam in beams {
            let world = Beam {
                origin: pose.position + pose.orientation * beam.origin,
                direction: pose.orientation * beam.direction,
                radius: beam.radius,
                status: beam.status,
            };
            let trace = trace_beam(geometry, &world)?;
            update_stats(&mut grid, &trace)?;
        }
    }
    Ok(grid)
}
