//! Line-delimited scan log: one record per line, whitespace-separated.
//!
//! ```text
//! timestamp  px py pz  qw qx qy qz  [dx dy dz radius status]...
//! ```
//!
//! Directions are unit vectors in the sensor frame; `status` is one of
//! `hit`, `short`, `max`.  Lines starting with `#` and blank lines are
//! skipped.  Timestamps must be non-decreasing within a log.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use nalgebra::{Quaternion, UnitQuaternion, Vector3};

use gridbelief_core::{Beam, BeamStatus, Pose};

/// One sensor frame: when it was taken, where the sensor was, and the beams.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRecord {
    pub timestamp: f64,
    pub pose: Pose,
    /// Sensor-frame beams (zero origin).
    pub beams: Vec<Beam>,
}

fn parse_status(token: &str) -> Option<BeamStatus> {
    match token {
        "hit" => Some(BeamStatus::Hit),
        "short" => Some(BeamStatus::ShortRange),
        "max" => Some(BeamStatus::MaxRange),
        _ => None,
    }
}

fn parse_record(line: &str, lineno: usize) -> Result<ScanRecord> {
    let err = |reason: String| anyhow!("line {lineno}: {reason}");
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.len() < 8 {
        bail!(err(format!(
            "expected at least 8 fields (timestamp + pose), got {}",
            tokens.len()
        )));
    }
    if !(tokens.len() - 8).is_multiple_of(5) {
        bail!(err(format!(
            "beam fields not a multiple of 5 (got {} extra tokens)",
            tokens.len() - 8
        )));
    }
    let num = |i: usize, what: &str| -> Result<f64> {
        tokens[i]
            .parse::<f64>()
            .map_err(|e| err(format!("bad {what} {:?}: {e}", tokens[i])))
    };
    let timestamp = num(0, "timestamp")?;
    let position = Vector3::new(num(1, "px")?, num(2, "py")?, num(3, "pz")?);
    let q = Quaternion::new(num(4, "qw")?, num(5, "qx")?, num(6, "qy")?, num(7, "qz")?);
    if (q.norm() - 1.0).abs() > 1e-6 {
        bail!(err(format!("quaternion norm {} not unit", q.norm())));
    }
    let pose = Pose::new(position, UnitQuaternion::from_quaternion(q));

    let mut beams = Vec::with_capacity((tokens.len() - 8) / 5);
    for (k, chunk) in tokens[8..].chunks_exact(5).enumerate() {
        let f = |i: usize, what: &str| -> Result<f64> {
            chunk[i]
                .parse::<f64>()
                .map_err(|e| err(format!("beam {k}: bad {what} {:?}: {e}", chunk[i])))
        };
        let direction = Vector3::new(f(0, "dx")?, f(1, "dy")?, f(2, "dz")?);
        let radius = f(3, "radius")?;
        let status = parse_status(chunk[4])
            .ok_or_else(|| err(format!("beam {k}: unknown status {:?}", chunk[4])))?;
        if status == BeamStatus::Hit && !(radius > 0.0) {
            bail!(err(format!("beam {k}: hit radius must be > 0, got {radius}")));
        }
        let beam = Beam::new(Vector3::zeros(), direction, radius, status)
            .map_err(|e| err(format!("beam {k}: {e}")))?;
        beams.push(beam);
    }
    Ok(ScanRecord {
        timestamp,
        pose,
        beams,
    })
}

/// Parse a scan log; malformed lines abort with their line number.
pub fn read_scan_log(path: &Path) -> Result<Vec<ScanRecord>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut records = Vec::new();
    let mut last_t = f64::NEG_INFINITY;
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let lineno = i + 1;
        let line = line.with_context(|| format!("reading line {lineno}"))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let record = parse_record(trimmed, lineno)?;
        if record.timestamp < last_t {
            bail!(
                "line {lineno}: timestamp {} decreases (previous {})",
                record.timestamp,
                last_t
            );
        }
        last_t = record.timestamp;
        records.push(record);
    }
    Ok(records)
}

fn format_record(r: &ScanRecord) -> String {
    let mut line = String::new();
    let p = &r.pose.position;
    let q = r.pose.orientation.into_inner();
    // f64 Display is the shortest round-trip representation
    write!(
        line,
        "{} {} {} {} {} {} {} {}",
        r.timestamp, p.x, p.y, p.z, q.w, q.i, q.j, q.k
    )
    .unwrap();
    for b in &r.beams {
        write!(
            line,
            " {} {} {} {} {}",
            b.direction.x,
            b.direction.y,
            b.direction.z,
            b.radius,
            b.status.as_str()
        )
        .unwrap();
    }
    line
}

/// The companion writer: output parses back to identical records.
pub fn write_scan_log(path: &Path, records: &[ScanRecord]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    for r in records {
        writeln!(w, "{}", format_record(r))?;
    }
    w.flush()?;
    Ok(())
}
