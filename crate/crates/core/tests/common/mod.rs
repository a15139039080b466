//! Brute-force references for the small-grid comparisons, and random grid
//! generators. Each reference follows the definition directly with no
//! attempt at speed.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use torus_vacant::lattice::TorusGeometry;
use torus_vacant::walk_engine::{run_walk, OccupancyGrid, WalkConfig, NEVER};

pub type Cell = Vec<usize>;

/// Vacancy of every cell as a map from coordinates.
pub struct Board {
    pub d: usize,
    pub n: usize,
    pub vacant: BTreeMap<Cell, bool>,
}

impl Board {
    pub fn from_grid(grid: &OccupancyGrid, t: u64) -> Self {
        let g = grid.geometry();
        let vacant = (0..g.cell_count())
            .map(|i| (g.point_at(i).coords().to_vec(), grid.is_vacant(i, t)))
            .collect();
        Board {
            d: g.dim(),
            n: g.side(),
            vacant,
        }
    }

    pub fn cells(&self) -> impl Iterator<Item = &Cell> {
        self.vacant.keys()
    }

    pub fn is_vacant(&self, c: &[usize]) -> bool {
        self.vacant[c]
    }

    pub fn moved(&self, c: &[usize], axis: usize, by: i64) -> Cell {
        let mut p = c.to_vec();
        p[axis] = (p[axis] as i64 + by).rem_euclid(self.n as i64) as usize;
        p
    }

    fn neighbours(&self, c: &[usize]) -> Vec<Cell> {
        (0..self.d)
            .flat_map(|a| [self.moved(c, a, 1), self.moved(c, a, -1)])
            .collect()
    }
}

/// `floor(x)` with values within 1e-9 of an integer snapped to it.
pub fn snap_floor(x: f64) -> usize {
    (x + 1e-9).floor().max(0.0) as usize
}

pub fn ref_v(b: &Board, k: f64, beta: f64) -> bool {
    let seg = snap_floor(k * (b.n as f64).ln()) + 1;
    let reach = (b.n as f64).powf(beta);
    let offsets: Vec<usize> = (0..b.n).filter(|&m| (m as f64) < reach - 1e-9).collect();
    let offsets = if offsets.is_empty() { vec![0] } else { offsets };
    b.cells().all(|x| {
        (0..b.d).all(|j| {
            offsets
                .iter()
                .any(|&m| (0..seg).all(|s| b.is_vacant(&b.moved(x, j, (m + s) as i64))))
        })
    })
}

/// Flood fill inside an arbitrary cell set under 2d-neighbour adjacency.
fn flood(b: &Board, allowed: &HashSet<Cell>) -> Vec<BTreeSet<Cell>> {
    let mut seen: HashSet<Cell> = HashSet::new();
    let mut out = Vec::new();
    for start in allowed {
        if seen.contains(start) {
            continue;
        }
        let mut comp = BTreeSet::new();
        let mut stack = vec![start.clone()];
        seen.insert(start.clone());
        while let Some(c) = stack.pop() {
            for nb in b.neighbours(&c) {
                if allowed.contains(&nb) && seen.insert(nb.clone()) {
                    stack.push(nb);
                }
            }
            comp.insert(c);
        }
        out.push(comp);
    }
    out
}

/// Smallest circular window covering the values, minus one.
fn window_extent(values: &BTreeSet<usize>, n: usize) -> usize {
    if values.is_empty() {
        return 0;
    }
    for w in 1..=n {
        for s in 0..n {
            if values.iter().all(|&v| (v + n - s) % n < w) {
                return w - 1;
            }
        }
    }
    n - 1
}

pub fn ref_u(b: &Board, k: f64) -> bool {
    let thr = snap_floor(k * (b.n as f64).ln());
    if thr > b.n - 1 {
        return true;
    }
    for a in 0..b.d {
        for c in a + 1..b.d {
            // group the vacant cells by the coordinates off the plane
            let mut planes: BTreeMap<Cell, HashSet<Cell>> = BTreeMap::new();
            for (cell, &v) in &b.vacant {
                let key: Cell = (0..b.d).filter(|&i| i != a && i != c).map(|i| cell[i]).collect();
                let entry = planes.entry(key).or_default();
                if v {
                    entry.insert(cell.clone());
                }
            }
            for cells in planes.values() {
                let large = flood(b, cells)
                    .iter()
                    .filter(|comp| {
                        let pa: BTreeSet<usize> = comp.iter().map(|p| p[a]).collect();
                        let pc: BTreeSet<usize> = comp.iter().map(|p| p[c]).collect();
                        window_extent(&pa, b.n).max(window_extent(&pc, b.n)) >= thr
                    })
                    .count();
                if large >= 2 {
                    return false;
                }
            }
        }
    }
    true
}

pub fn ref_c(b: &Board, k: f64, x: &[usize]) -> bool {
    let r = snap_floor(k * (b.n as f64).ln()) as i64;
    if !b.is_vacant(x) {
        return false;
    }
    if r == 0 {
        return true;
    }
    for a in 0..b.d {
        for c in a + 1..b.d {
            // depth-first search over in-plane offsets
            let mut seen = HashSet::from([(0i64, 0i64)]);
            let mut stack = vec![(0i64, 0i64)];
            while let Some((i, j)) = stack.pop() {
                if i.abs() == r || j.abs() == r {
                    return true;
                }
                for (p, q) in [(i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)] {
                    let cell = b.moved(&b.moved(x, a, p), c, q);
                    if b.is_vacant(&cell) && seen.insert((p, q)) {
                        stack.push((p, q));
                    }
                }
            }
        }
    }
    false
}

/// Vacant components, and for each whether it holds `run` consecutive
/// vacant cells along an axis.
pub fn ref_components(b: &Board, run: usize) -> Vec<(BTreeSet<Cell>, bool)> {
    let vac: HashSet<Cell> = b.vacant.iter().filter(|e| *e.1).map(|e| e.0.clone()).collect();
    flood(b, &vac)
        .into_iter()
        .map(|comp| {
            let has = run <= b.n
                && comp.iter().any(|x| {
                    (0..b.d).any(|j| (0..run).all(|s| b.is_vacant(&b.moved(x, j, s as i64))))
                });
            (comp, has)
        })
        .collect()
}

pub fn ref_ball(b: &Board) -> usize {
    let visited: Vec<&Cell> = b.vacant.iter().filter(|e| !*e.1).map(|e| e.0).collect();
    let dist = |x: &Cell, y: &Cell| {
        x.iter()
            .zip(y)
            .map(|(&p, &q)| {
                let d = p.abs_diff(q);
                d.min(b.n - d)
            })
            .max()
            .unwrap_or(0)
    };
    if visited.is_empty() {
        // balls wider than the torus would overlap themselves
        return (b.n - 1) / 2;
    }
    b.cells()
        .map(|x| visited.iter().map(|y| dist(x, y)).min().unwrap())
        .max()
        .unwrap_or(0)
        .saturating_sub(1)
}

/// A random small grid: a real walk, i.i.d. first-visit times, or slabs.
pub fn random_grid(rng: &mut ChaCha20Rng, d: usize, n: usize) -> (OccupancyGrid, u64) {
    let geom = TorusGeometry::new(d, n).unwrap();
    let cells = geom.cell_count();
    let grid = match rng.random_range(0..3) {
        0 => {
            let u = rng.random_range(0.0..2.0);
            run_walk(&WalkConfig::new(geom, u, rng.random(), 0), &mut []).unwrap()
        }
        1 => {
            let p = rng.random_range(0.05..0.95);
            let fv = (0..cells)
                .map(|_| if rng.random_bool(p) { rng.random_range(0..=50u32) } else { NEVER })
                .collect();
            OccupancyGrid::synthetic(geom, fv, 50).unwrap()
        }
        _ => {
            let axis = rng.random_range(0..d);
            let at = rng.random_range(0..n);
            let mut c = vec![0; d];
            let fv = (0..cells)
                .map(|i| {
                    geom.coords_into(i, &mut c);
                    if c[axis] == at || rng.random_bool(0.03) {
                        0
                    } else {
                        NEVER
                    }
                })
                .collect();
            OccupancyGrid::synthetic(geom, fv, 0).unwrap()
        }
    };
    let t = rng.random_range(0..=grid.total_steps());
    (grid, t)
}

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}
