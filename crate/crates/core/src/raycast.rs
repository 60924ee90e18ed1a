use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::grid::{Beam, BeamStatus, BeamTrace, GridGeometry, DIRECTION_TOL};

/// Clip the ray `origin + t * dir` against the grid's bounding box.
/// Returns the parameter interval `[t_enter, t_exit]`, or `None` if the ray
/// misses the box entirely.
fn clip_to_grid(geometry: &GridGeometry, origin: &Vector3<f64>, dir: &Vector3<f64>) -> Option<(f64, f64)> {
    let mut t_enter = 0.0f64;
    let mut t_exit = f64::INFINITY;
    for axis in 0..3 {
        let low = geometry.origin[axis];
        let high = low + geometry.dims[axis] as f64 * geometry.edge;
        if dir[axis] == 0.0 {
            if origin[axis] < low || origin[axis] >= high {
                return None;
            }
            continue;
        }
        let mut t0 = (low - origin[axis]) / dir[axis];
        let mut t1 = (high - origin[axis]) / dir[axis];
        if t0 > t1 {
            std::mem::swap(&mut t0, &mut t1);
        }
        t_enter = t_enter.max(t0);
        t_exit = t_exit.min(t1);
        if t_enter > t_exit {
            return None;
        }
    }
    Some((t_enter, t_exit))
}

/// Decompose a beam into ordered per-voxel segments via incremental traversal.
///
/// Traversal starts where the ray enters the grid (pre-entry distance counts
/// against the radius), stops at the radius or at grid exit, and omits
/// zero-length segments from boundary grazing.  `terminal_hit` is set when a
/// hit-status beam ends inside the grid; the last emitted segment's voxel is
/// then the reflecting voxel.
pub fn trace_beam(geometry: &GridGeometry, beam: &Beam) -> Result<BeamTrace> {
    let norm = beam.direction.norm();
    if (norm - 1.0).abs() > DIRECTION_TOL {
        return Err(Error::NonUnitDirection {
            norm,
            tol: DIRECTION_TOL,
        });
    }
    if beam.radius < 0.0 {
        return Err(Error::NegativeRadius(beam.radius));
    }

    let endpoint = beam.origin + beam.direction * beam.radius;
    let terminal_hit =
        beam.status == BeamStatus::Hit && geometry.voxel_index_of(&endpoint).is_some();

    let mut segments = Vec::new();
    let Some((t_enter, _)) = clip_to_grid(geometry, &beam.origin, &beam.direction) else {
        return Ok(BeamTrace {
            segments,
            terminal_hit: false,
        });
    };
    if t_enter >= beam.radius {
        return Ok(BeamTrace {
            segments,
            terminal_hit: false,
        });
    }

    // Voxel coordinates at the entry point; clamping handles entry exactly on
    // the far face of an axis while moving in the negative direction.
    let entry = beam.origin + beam.direction * t_enter;
    let mut coords = [0i64; 3];
    for axis in 0..3 {
        let c = ((entry[axis] - geometry.origin[axis]) / geometry.edge).floor() as i64;
        coords[axis] = c.clamp(0, geometry.dims[axis] as i64 - 1);
    }

    // Per-axis step direction, ray parameter of the next boundary crossing,
    // and parameter increment per voxel.
    let mut step = [0i64; 3];
    let mut t_next = [f64::INFINITY; 3];
    let mut t_delta = [f64::INFINITY; 3];
    for axis in 0..3 {
        let d = beam.direction[axis];
        if d == 0.0 {
            continue;
        }
        step[axis] = if d > 0.0 { 1 } else { -1 };
        t_delta[axis] = geometry.edge / d.abs();
        let next_plane = if d > 0.0 { coords[axis] + 1 } else { coords[axis] };
        let boundary = geometry.origin[axis] + next_plane as f64 * geometry.edge;
        t_next[axis] = (boundary - beam.origin[axis]) / d;
    }

    let mut t_curr = t_enter;
    loop {
        // Next boundary: smallest parameter wins, ties broken by axis order.
        let mut axis = 0;
        for a in 1..3 {
            if t_next[a] < t_next[axis] {
                axis = a;
            }
        }
        let index = geometry.linear_index([
            coords[0] as u32,
            coords[1] as u32,
            coords[2] as u32,
        ]);
        if beam.radius <= t_next[axis] {
            let len = beam.radius - t_curr;
            if len > 0.0 {
                segments.push((index, len));
            }
            break;
        }
        let len = t_next[axis] - t_curr;
        if len > 0.0 {
            segments.push((index, len));
        }
        t_curr = t_next[axis];
        coords[axis] += step[axis];
        if coords[axis] < 0 || coords[axis] >= geometry.dims[axis] as i64 {
            break;
        }
        t_next[axis] += t_delta[axis];
    }

    let terminal_hit = terminal_hit && !segments.is_empty();
    Ok(BeamTrace {
        segments,
        terminal_hit,
    })
}

/// 1-D specialization for a corridor of unit voxels: a beam fired from the
/// near face of `position` toward higher indices.  `hit_voxel` present means
/// the beam reflects there (trace covers `position..=hit_voxel`, unit
/// lengths); absent means a max-range beam that exits at the corridor end.
pub fn trace_corridor(position: u64, length_voxels: u64, hit_voxel: Option<u64>) -> Result<BeamTrace> {
    if position >= length_voxels {
        return Err(Error::PositionOutOfRange {
            position,
            length: length_voxels,
        });
    }
    let (end, terminal_hit) = match hit_voxel {
        Some(h) => {
            if h < position || h >= length_voxels {
                return Err(Error::PositionOutOfRange {
                    position: h,
                    length: length_voxels,
                });
            }
            (h + 1, true)
        }
        None => (length_voxels, false),
    };
    Ok(BeamTrace {
        segments: (position..end).map(|i| (i, 1.0)).collect(),
        terminal_hit,
    })
}
