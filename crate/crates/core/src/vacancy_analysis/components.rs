use std::collections::VecDeque;

use serde::Serialize;

use super::{for_each_neighbor, line_bases};
use crate::error::Result;
use crate::walk_engine::OccupancyGrid;

const UNLABELED: u32 = u32::MAX;

/// Nearest-neighbour components of the vacant set at one time.
#[derive(Clone, Debug, Serialize)]
pub struct VacantComponents {
    pub time: u64,
    /// Minimum number of cells of an axis run flagged in `has_run`.
    pub run_cells: usize,
    #[serde(skip)]
    labels: Vec<u32>,
    pub sizes: Vec<usize>,
    pub has_run: Vec<bool>,
}

impl VacantComponents {
    /// Component of cell `index`, `None` if visited.
    pub fn label(&self, index: usize) -> Option<usize> {
        match self.labels[index] {
            UNLABELED => None,
            l => Some(l as usize),
        }
    }

    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn vacant_count(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Largest component as `(label, size)`; ties go to the lower label.
    pub fn largest(&self) -> Option<(usize, usize)> {
        self.sizes
            .iter()
            .enumerate()
            .fold(None, |best, (l, &s)| match best {
                Some((_, bs)) if bs >= s => best,
                _ => Some((l, s)),
            })
    }

    pub fn largest_fraction(&self) -> f64 {
        self.largest().map_or(0.0, |(_, s)| s as f64) / self.labels.len() as f64
    }

    /// Labels of the components containing a long axis run.
    pub fn run_components(&self) -> Vec<usize> {
        (0..self.count()).filter(|&l| self.has_run[l]).collect()
    }

    /// Indicator of the cells of component `label`.
    pub fn mask(&self, label: usize) -> Vec<bool> {
        self.labels.iter().map(|&l| l as usize == label).collect()
    }
}

/// Labels the vacant set at time `t` by breadth-first flooding over the full
/// torus, and flags components containing a straight vacant axis run of at
/// least `run_cells` cells (a whole vacant line counts as a run of `N`).
pub fn vacant_components(grid: &OccupancyGrid, t: u64, run_cells: usize) -> Result<VacantComponents> {
    grid.check_time(t)?;
    let geom = grid.geometry();
    let cells = geom.cell_count();
    let mut labels = vec![UNLABELED; cells];
    let mut sizes = Vec::new();
    let mut queue = VecDeque::new();
    for seed in 0..cells {
        if labels[seed] != UNLABELED || !grid.is_vacant(seed, t) {
            continue;
        }
        let label = sizes.len() as u32;
        labels[seed] = label;
        queue.push_back(seed);
        let mut size = 0;
        while let Some(i) = queue.pop_front() {
            size += 1;
            for_each_neighbor(geom, i, |j| {
                if labels[j] == UNLABELED && grid.is_vacant(j, t) {
                    labels[j] = label;
                    queue.push_back(j);
                }
            });
        }
        sizes.push(size);
    }

    let mut has_run = vec![false; sizes.len()];
    let n = geom.side();
    for dir in 0..geom.dim() {
        let s = geom.stride(dir);
        for base in line_bases(geom, dir) {
            let vac: Vec<bool> = (0..n).map(|k| grid.is_vacant(base + k * s, t)).collect();
            for (start, len) in circular_runs(&vac) {
                if len >= run_cells {
                    has_run[labels[base + start * s] as usize] = true;
                }
            }
        }
    }
    Ok(VacantComponents {
        time: t,
        run_cells,
        labels,
        sizes,
        has_run,
    })
}

/// Maximal circular runs of `true` as `(start, length)`; a line that is
/// entirely `true` is one run of length `n` starting at 0.
pub(crate) fn circular_runs(line: &[bool]) -> Vec<(usize, usize)> {
    let n = line.len();
    let Some(gap) = line.iter().position(|&v| !v) else {
        return if n > 0 { vec![(0, n)] } else { vec![] };
    };
    let mut out = Vec::new();
    let mut k = 1;
    while k <= n {
        let p = (gap + k) % n;
        if line[p] {
            let mut len = 0;
            while line[(p + len) % n] {
                len += 1;
            }
            out.push((p, len));
            k += len;
        } else {
            k += 1;
        }
    }
    out
}
