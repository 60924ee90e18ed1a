//! Binary map persistence.
//!
//! Little-endian layout:
//!
//! ```text
//! magic    8 bytes  "GRIDBMAP"
//! version  u32      1
//! model    u8       0 = reflection, 1 = decay
//! dims     3 x u32
//! edge     f64
//! origin   3 x f64
//! prior    u8       0 = absent, 1 = present, followed by alpha f64, beta f64
//! count    u64      number of voxel records
//! records  count x { index u64, hits u64, misses u64, distance f64 }
//! ```
//!
//! Records cover exactly the visited voxels in strictly increasing index
//! order, which makes the encoding canonical: equal grids serialize to equal
//! bytes, and read(write(g)) = g bit-exactly.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use nalgebra::Vector3;

use gridbelief_core::{GridGeometry, MapModel, PriorParams, VoxelStats, VoxelStatsGrid};

const MAGIC: &[u8; 8] = b"GRIDBMAP";
const VERSION: u32 = 1;

/// A persisted map: the model it was built for, the prior fitted at build
/// time (if any), and the statistics grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MapFile {
    pub model: MapModel,
    pub prior: Option<PriorParams>,
    pub grid: VoxelStatsGrid,
}

fn model_byte(model: MapModel) -> u8 {
    match model {
        MapModel::Reflection => 0,
        MapModel::Decay => 1,
    }
}

pub fn write_map(path: &Path, map: &MapFile) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&[model_byte(map.model)])?;
    let g = &map.grid.geometry;
    for d in g.dims {
        w.write_all(&d.to_le_bytes())?;
    }
    w.write_all(&g.edge.to_le_bytes())?;
    for i in 0..3 {
        w.write_all(&g.origin[i].to_le_bytes())?;
    }
    match &map.prior {
        Some(p) => {
            if p.model != map.model {
                bail!(
                    "prior model {} does not match map model {}",
                    p.model.as_str(),
                    map.model.as_str()
                );
            }
            w.write_all(&[1u8])?;
            w.write_all(&p.alpha.to_le_bytes())?;
            w.write_all(&p.beta.to_le_bytes())?;
        }
        None => w.write_all(&[0u8])?,
    }
    let records = map.grid.iter_sorted();
    w.write_all(&(records.len() as u64).to_le_bytes())?;
    for (index, s) in records {
        w.write_all(&index.to_le_bytes())?;
        w.write_all(&s.hits.to_le_bytes())?;
        w.write_all(&s.misses.to_le_bytes())?;
        w.write_all(&s.distance.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

struct Reader<R: Read> {
    inner: R,
}

impl<R: Read> Reader<R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut buf = [0u8; N];
        self.inner
            .read_exact(&mut buf)
            .context("map file truncated")?;
        Ok(buf)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.bytes::<1>()?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.bytes()?))
    }
}

pub fn read_map(path: &Path) -> Result<MapFile> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut r = Reader {
        inner: BufReader::new(file),
    };
    let magic: [u8; 8] = r.bytes()?;
    if &magic != MAGIC {
        bail!("bad magic {magic:?}: not a map file");
    }
    let version = r.u32()?;
    if version != VERSION {
        bail!("unsupported map file version {version} (expected {VERSION})");
    }
    let model = match r.u8()? {
        0 => MapModel::Reflection,
        1 => MapModel::Decay,
        b => bail!("unknown model byte {b}"),
    };
    let dims = [r.u32()?, r.u32()?, r.u32()?];
    let edge = r.f64()?;
    let origin = Vector3::new(r.f64()?, r.f64()?, r.f64()?);
    let geometry = GridGeometry::new(dims, edge, origin)?;
    let prior = match r.u8()? {
        0 => None,
        1 => {
            let alpha = r.f64()?;
            let beta = r.f64()?;
            Some(PriorParams::new(model, alpha, beta)?)
        }
        b => bail!("bad prior flag {b}"),
    };
    let count = r.u64()?;
    let mut grid = VoxelStatsGrid::new(geometry);
    let mut last: Option<u64> = None;
    for _ in 0..count {
        let index = r.u64()?;
        if let Some(prev) = last {
            if index <= prev {
                bail!("voxel indices not strictly increasing ({prev} then {index})");
            }
        }
        last = Some(index);
        let stats = VoxelStats::new(r.u64()?, r.u64()?, r.f64()?);
        grid.get_mut(index)
            .with_context(|| format!("voxel index {index} out of bounds"))?
            .add(&stats);
    }
    let mut trailing = [0u8; 1];
    if r.inner.read(&mut trailing)? != 0 {
        bail!("trailing bytes after {count} records");
    }
    Ok(MapFile { model, prior, grid })
}
