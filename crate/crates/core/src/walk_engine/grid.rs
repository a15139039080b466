use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::lattice::TorusGeometry;

/// First-visit slot of a cell the walk never reached.
pub const NEVER: u32 = u32::MAX;

const MAGIC: &[u8; 8] = b"TVOCCGRD";
const FORMAT_VERSION: u8 = 1;

/// Per-cell first-visit times of one walk. The visited set at time `s` is
/// exactly `{cell : first_visit[cell] <= s}`.
#[derive(Clone, Debug, PartialEq)]
pub struct OccupancyGrid {
    geometry: TorusGeometry,
    first_visit: Vec<u32>,
    total_steps: u64,
    seed: u64,
    replica_index: u64,
}

impl OccupancyGrid {
    pub(crate) fn from_walk(
        geometry: TorusGeometry,
        first_visit: Vec<u32>,
        total_steps: u64,
        seed: u64,
        replica_index: u64,
    ) -> Self {
        Self {
            geometry,
            first_visit,
            total_steps,
            seed,
            replica_index,
        }
    }

    /// Builds a grid from explicit first-visit times, e.g. a hand-made
    /// configuration. Nothing requires it to come from an actual walk.
    pub fn synthetic(geometry: TorusGeometry, first_visit: Vec<u32>, total_steps: u64) -> Result<Self> {
        if first_visit.len() != geometry.cell_count() {
            return Err(Error::Parameter(format!(
                "{} first-visit entries for {} cells",
                first_visit.len(),
                geometry.cell_count()
            )));
        }
        if total_steps >= NEVER as u64 {
            return Err(Error::TimeOverflow(total_steps));
        }
        if let Some(bad) = first_visit
            .iter()
            .find(|&&v| v != NEVER && v as u64 > total_steps)
        {
            return Err(Error::Parameter(format!(
                "first visit {bad} beyond horizon {total_steps}"
            )));
        }
        Ok(Self {
            geometry,
            first_visit,
            total_steps,
            seed: 0,
            replica_index: 0,
        })
    }

    /// Grid in which the cells flagged in `visited` were visited at time 0.
    pub fn from_visited_mask(geometry: TorusGeometry, visited: &[bool]) -> Result<Self> {
        let fv = visited.iter().map(|&v| if v { 0 } else { NEVER }).collect();
        Self::synthetic(geometry, fv, 0)
    }

    pub fn geometry(&self) -> &TorusGeometry {
        &self.geometry
    }

    pub fn first_visit(&self) -> &[u32] {
        &self.first_visit
    }

    pub fn total_steps(&self) -> u64 {
        self.total_steps
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn replica_index(&self) -> u64 {
        self.replica_index
    }

    pub fn check_time(&self, t: u64) -> Result<()> {
        if t > self.total_steps {
            return Err(Error::TimeBeyondHorizon {
                query: t,
                horizon: self.total_steps,
            });
        }
        Ok(())
    }

    #[inline]
    pub fn is_visited(&self, index: usize, t: u64) -> bool {
        let v = self.first_visit[index];
        v != NEVER && v as u64 <= t
    }

    #[inline]
    pub fn is_vacant(&self, index: usize, t: u64) -> bool {
        !self.is_visited(index, t)
    }

    pub fn vacant_mask(&self, t: u64) -> Vec<bool> {
        (0..self.first_visit.len())
            .map(|i| self.is_vacant(i, t))
            .collect()
    }

    pub fn visited_count(&self, t: u64) -> usize {
        (0..self.first_visit.len())
            .filter(|&i| self.is_visited(i, t))
            .count()
    }

    /// Writes the snapshot format: magic, version byte, then little-endian
    /// `d: u32, N: u32, t: u64, seed: u64, replica: u64` and the `N^d`
    /// first-visit slots as `u32` in row-major order.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&[FORMAT_VERSION])?;
        w.write_all(&(self.geometry.dim() as u32).to_le_bytes())?;
        w.write_all(&(self.geometry.side() as u32).to_le_bytes())?;
        w.write_all(&self.total_steps.to_le_bytes())?;
        w.write_all(&self.seed.to_le_bytes())?;
        w.write_all(&self.replica_index.to_le_bytes())?;
        let mut buf = Vec::with_capacity(4 * self.first_visit.len());
        for v in &self.first_visit {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)
            .map_err(|_| Error::Format("truncated header".into()))?;
        if &magic != MAGIC {
            return Err(Error::Format("bad magic tag".into()));
        }
        let mut version = [0u8; 1];
        r.read_exact(&mut version)
            .map_err(|_| Error::Format("truncated header".into()))?;
        if version[0] != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported version {}", version[0])));
        }
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        let mut read4 = |r: &mut R| -> Result<u32> {
            r.read_exact(&mut b4)
                .map_err(|_| Error::Format("truncated header".into()))?;
            Ok(u32::from_le_bytes(b4))
        };
        let d = read4(&mut r)? as usize;
        let n = read4(&mut r)? as usize;
        let mut read8 = |r: &mut R| -> Result<u64> {
            r.read_exact(&mut b8)
                .map_err(|_| Error::Format("truncated header".into()))?;
            Ok(u64::from_le_bytes(b8))
        };
        let total_steps = read8(&mut r)?;
        let seed = read8(&mut r)?;
        let replica_index = read8(&mut r)?;
        let geometry = TorusGeometry::new(d, n).map_err(|e| Error::Format(e.to_string()))?;
        let mut buf = vec![0u8; 4 * geometry.cell_count()];
        r.read_exact(&mut buf)
            .map_err(|_| Error::Format("truncated cell array".into()))?;
        let first_visit = buf
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        let mut grid = Self::synthetic(geometry, first_visit, total_steps)
            .map_err(|e| Error::Format(e.to_string()))?;
        grid.seed = seed;
        grid.replica_index = replica_index;
        Ok(grid)
    }
}
