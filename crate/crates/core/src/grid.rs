use std::collections::HashMap;

use nalgebra::{UnitQuaternion, Vector3};

use crate::error::{Error, Result};

/// Axis-aligned voxel lattice: per-axis voxel counts, cubic edge length, and
/// the world coordinates of the minimal corner.
#[derive(Debug, Clone, PartialEq)]
pub struct GridGeometry {
    pub dims: [u32; 3],
    pub edge: f64,
    pub origin: Vector3<f64>,
}

impl GridGeometry {
    pub fn new(dims: [u32; 3], edge: f64, origin: Vector3<f64>) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::InvalidConfig(format!(
                "grid dims must be >= 1, got {dims:?}"
            )));
        }
        if !(edge > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "voxel edge must be > 0, got {edge}"
            )));
        }
        Ok(Self { dims, edge, origin })
    }

    /// Total voxel count.
    pub fn len(&self) -> u64 {
        self.dims.iter().map(|&d| d as u64).product()
    }

    pub fn is_empty(&self) -> bool {
        false // dims components are >= 1 by construction
    }

    /// Linear index of integer voxel coordinates (x fastest).
    pub fn linear_index(&self, coords: [u32; 3]) -> u64 {
        let [x, y, z] = coords.map(|c| c as u64);
        let [dx, dy, _] = self.dims.map(|d| d as u64);
        x + dx * (y + dy * z)
    }

    /// Inverse of [`linear_index`](Self::linear_index).
    pub fn voxel_coords(&self, index: u64) -> [u32; 3] {
        let [dx, dy, _] = self.dims.map(|d| d as u64);
        [
            (index % dx) as u32,
            ((index / dx) % dy) as u32,
            (index / (dx * dy)) as u32,
        ]
    }

    /// World center of a voxel given by linear index.
    pub fn voxel_center(&self, index: u64) -> Vector3<f64> {
        let c = self.voxel_coords(index);
        self.origin + Vector3::new(c[0] as f64 + 0.5, c[1] as f64 + 0.5, c[2] as f64 + 0.5) * self.edge
    }

    /// Linear index of the voxel containing `point`, or `None` outside the grid.
    ///
    /// Voxels are half-open boxes `[low, high)` per axis, so a point on a shared
    /// face belongs to the voxel with the larger index along that axis.
    pub fn voxel_index_of(&self, point: &Vector3<f64>) -> Option<u64> {
        let mut coords = [0u32; 3];
        for axis in 0..3 {
            let t = (point[axis] - self.origin[axis]) / self.edge;
            let c = t.floor();
            if c < 0.0 || c >= self.dims[axis] as f64 {
                return None;
            }
            coords[axis] = c as u32;
        }
        Some(self.linear_index(coords))
    }
}

/// Per-voxel sufficient statistics: hit count, miss count, and total distance
/// traversed by beams inside the voxel (meters).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VoxelStats {
    pub hits: u64,
    pub misses: u64,
    pub distance: f64,
}

impl VoxelStats {
    pub fn new(hits: u64, misses: u64, distance: f64) -> Self {
        Self {
            hits,
            misses,
            distance,
        }
    }

    /// Field-wise accumulation; the merge operation of parallel mapping.
    pub fn add(&mut self, other: &VoxelStats) {
        self.hits += other.hits;
        self.misses += other.misses;
        self.distance += other.distance;
    }

    pub fn is_zero(&self) -> bool {
        self.hits == 0 && self.misses == 0 && self.distance == 0.0
    }
}

/// Sparse map from linear voxel index to [`VoxelStats`]; absent voxels are
/// implicitly `(0, 0, 0)`.  This pair of fields is the entire parameterization
/// of the map posterior.
#[derive(Debug, Clone, PartialEq)]
pub struct VoxelStatsGrid {
    pub geometry: GridGeometry,
    stats: HashMap<u64, VoxelStats>,
}

impl VoxelStatsGrid {
    pub fn new(geometry: GridGeometry) -> Self {
        Self {
            geometry,
            stats: HashMap::new(),
        }
    }

    /// Stats for a voxel; unvisited voxels read as all-zero.
    pub fn get(&self, index: u64) -> VoxelStats {
        self.stats.get(&index).copied().unwrap_or_default()
    }

    pub fn get_mut(&mut self, index: u64) -> Result<&mut VoxelStats> {
        if index >= self.geometry.len() {
            return Err(Error::IndexOutOfBounds {
                index,
                len: self.geometry.len(),
            });
        }
        Ok(self.stats.entry(index).or_default())
    }

    /// Number of voxels with any recorded statistics.
    pub fn visited_len(&self) -> usize {
        self.stats.len()
    }

    /// Visited voxels in ascending index order (deterministic iteration for
    /// aggregation and serialization).
    pub fn iter_sorted(&self) -> Vec<(u64, VoxelStats)> {
        let mut entries: Vec<_> = self.stats.iter().map(|(&i, &s)| (i, s)).collect();
        entries.sort_unstable_by_key(|&(i, _)| i);
        entries
    }

    /// Field-wise sum of two grids over identical geometry.
    pub fn merge(&self, other: &VoxelStatsGrid) -> Result<VoxelStatsGrid> {
        if self.geometry != other.geometry {
            return Err(Error::GeometryMismatch(format!(
                "{:?} vs {:?}",
                self.geometry, other.geometry
            )));
        }
        let mut out = self.clone();
        for (&index, stats) in &other.stats {
            out.stats.entry(index).or_default().add(stats);
        }
        Ok(out)
    }
}

/// Sensor pose: world position plus unit-quaternion orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct Pose {
    pub position: Vector3<f64>,
    pub orientation: UnitQuaternion<f64>,
}

impl Pose {
    pub fn new(position: Vector3<f64>, orientation: UnitQuaternion<f64>) -> Self {
        Self {
            position,
            orientation,
        }
    }

    pub fn identity() -> Self {
        Self {
            position: Vector3::zeros(),
            orientation: UnitQuaternion::identity(),
        }
    }

    /// Compose with a relative transform expressed in this pose's frame.
    pub fn compose(&self, delta: &Pose) -> Pose {
        Pose {
            position: self.position + self.orientation * delta.position,
            orientation: self.orientation * delta.orientation,
        }
    }

    /// Map a direction from this pose's frame into the world frame.
    pub fn rotate(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.orientation * v
    }

    /// Inverse transform: `p.compose(&p.inverse())` is the identity.
    pub fn inverse(&self) -> Pose {
        let inv = self.orientation.inverse();
        Pose {
            position: -(inv * self.position),
            orientation: inv,
        }
    }

    /// Relative transform taking this pose to `other`, expressed in this
    /// pose's frame: `self.compose(&self.delta(other)) == other`.
    pub fn delta(&self, other: &Pose) -> Pose {
        self.inverse().compose(other)
    }
}

/// Terminal classification of a beam measurement.
///
/// For `ShortRange` the radius field carries the sensor's minimum range, for
/// `MaxRange` its maximum range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeamStatus {
    Hit,
    ShortRange,
    MaxRange,
}

impl BeamStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            BeamStatus::Hit => "hit",
            BeamStatus::ShortRange => "short",
            BeamStatus::MaxRange => "max",
        }
    }
}

/// One laser ray in world coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Beam {
    pub origin: Vector3<f64>,
    pub direction: Vector3<f64>,
    pub radius: f64,
    pub status: BeamStatus,
}

pub const DIRECTION_TOL: f64 = 1e-6;

impl Beam {
    pub fn new(
        origin: Vector3<f64>,
        direction: Vector3<f64>,
        radius: f64,
        status: BeamStatus,
    ) -> Result<Self> {
        let norm = direction.norm();
        if (norm - 1.0).abs() > DIRECTION_TOL {
            return Err(Error::NonUnitDirection {
                norm,
                tol: DIRECTION_TOL,
            });
        }
        if radius < 0.0 {
            return Err(Error::NegativeRadius(radius));
        }
        Ok(Self {
            origin,
            direction,
            radius,
            status,
        })
    }
}

/// Ordered voxel/segment-length decomposition of one ray.
///
/// Segment lengths are strictly positive and sum to the distance actually
/// traveled inside the grid; `terminal_hit` marks the last segment's voxel as
/// the reflecting one (delta = 1 there, 0 elsewhere).
#[derive(Debug, Clone, PartialEq)]
pub struct BeamTrace {
    pub segments: Vec<(u64, f64)>,
    pub terminal_hit: bool,
}

impl BeamTrace {
    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(|&(_, l)| l).sum()
    }
}
