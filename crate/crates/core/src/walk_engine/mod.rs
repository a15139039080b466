//! Simple random walk on the torus and on `Z^d`.
//!
//! The torus walker streams `(time, cell)` events to observers instead of
//! storing the path. Time `0` is the starting cell; every later step moves
//! to one of the `2d` neighbours with equal probability.

mod cube_exit;
mod excursions;
mod grid;
mod zd;

pub use cube_exit::{cube_jumper, CubeExitLaw, CubeJumper};
pub use excursions::{
    count_box_excursions, excursion_schedule, BoxExcursionCounts, BoxUnion, CheckpointCounts,
    ExcursionCounts, ExcursionSchedule, ExcursionTracker, LinfBox, ProbeSet, ScheduleRecord,
};
pub use grid::{OccupancyGrid, NEVER};
pub use zd::{run_zd_walk, HitSet, StopReason, StopRule, ZdWalkOutcome};

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{TorusGeometry, TorusPoint};
use crate::rng::{replica_rng, Rng};

/// Default cap on retained full paths.
pub const DEFAULT_PATH_CAP: u64 = 2_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartRule {
    Uniform,
    Fixed(Vec<i64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub geometry: TorusGeometry,
    /// Time-scale multiplier; the walk runs `floor(u * N^d)` steps.
    pub u: f64,
    pub start: StartRule,
    pub seed: u64,
    pub replica_index: u64,
}

impl WalkConfig {
    pub fn new(geometry: TorusGeometry, u: f64, seed: u64, replica_index: u64) -> Self {
        Self {
            geometry,
            u,
            start: StartRule::Uniform,
            seed,
            replica_index,
        }
    }

    pub fn with_start(mut self, start: StartRule) -> Self {
        self.start = start;
        self
    }

    /// `floor(u * N^d)`, rejected when it does not fit the 32-bit time slots.
    pub fn total_steps(&self) -> Result<u64> {
        steps_for(&self.geometry, self.u)
    }
}

/// `floor(u * N^d)` with the 32-bit overflow guard.
pub fn steps_for(geometry: &TorusGeometry, u: f64) -> Result<u64> {
    if !(u >= 0.0 && u.is_finite()) {
        return Err(Error::Parameter(format!("u = {u} must be finite and >= 0")));
    }
    let t = (u * geometry.cell_count() as f64).floor();
    if t >= (NEVER as f64) {
        return Err(Error::TimeOverflow(t as u64));
    }
    Ok(t as u64)
}

pub enum Flow {
    Continue,
    Stop,
}

/// Receives every `(time, cell)` event of a walk, in order.
pub trait StepObserver {
    fn observe(&mut self, time: u64, index: usize, coords: &[usize]);

    /// Called once after the last event with the final time reached.
    fn finish(&mut self, _last_time: u64) {}
}

/// Low-level driver: runs up to `steps` steps of the torus walk from the
/// configured start and hands each event to `on_step`. Returns the last
/// time reached (smaller than `steps` if `on_step` asked to stop).
pub fn simulate<F>(config: &WalkConfig, steps: u64, mut on_step: F) -> Result<u64>
where
    F: FnMut(u64, usize, &[usize]) -> Flow,
{
    let geometry = &config.geometry;
    let mut rng = replica_rng(config.seed, config.replica_index);
    let start = resolve_start(geometry, &config.start, &mut rng)?;
    let d = geometry.dim();
    let n = geometry.side();
    let mut coords = start.coords().to_vec();
    let mut index = geometry.index(&start);
    let strides: Vec<usize> = (0..d).map(|j| geometry.stride(j)).collect();
    let wrap: Vec<usize> = strides.iter().map(|s| s * (n - 1)).collect();
    let moves = 2 * d as u32;

    if let Flow::Stop = on_step(0, index, &coords) {
        return Ok(0);
    }
    for time in 1..=steps {
        let m = rng.random_range(0..moves) as usize;
        let j = m >> 1;
        if m & 1 == 0 {
            if coords[j] + 1 == n {
                coords[j] = 0;
                index -= wrap[j];
            } else {
                coords[j] += 1;
                index += strides[j];
            }
        } else if coords[j] == 0 {
            coords[j] = n - 1;
            index += wrap[j];
        } else {
            coords[j] -= 1;
            index -= strides[j];
        }
        if let Flow::Stop = on_step(time, index, &coords) {
            return Ok(time);
        }
    }
    Ok(steps)
}

fn resolve_start(geometry: &TorusGeometry, start: &StartRule, rng: &mut Rng) -> Result<TorusPoint> {
    match start {
        StartRule::Uniform => Ok(geometry.point_at(rng.random_range(0..geometry.cell_count()))),
        StartRule::Fixed(c) => geometry.point(c),
    }
}

/// Runs the configured walk, recording first-visit times and feeding every
/// event to `observers`.
pub fn run_walk(
    config: &WalkConfig,
    observers: &mut [&mut dyn StepObserver],
) -> Result<OccupancyGrid> {
    let steps = config.total_steps()?;
    let mut first_visit = vec![NEVER; config.geometry.cell_count()];
    let last = simulate(config, steps, |t, idx, coords| {
        let slot = &mut first_visit[idx];
        if *slot == NEVER {
            *slot = t as u32;
        }
        for o in observers.iter_mut() {
            o.observe(t, idx, coords);
        }
        Flow::Continue
    })?;
    for o in observers.iter_mut() {
        o.finish(last);
    }
    Ok(OccupancyGrid::from_walk(
        config.geometry.clone(),
        first_visit,
        steps,
        config.seed,
        config.replica_index,
    ))
}

/// Runs the configured walk for observers only, without an occupancy grid.
pub fn observe_walk(config: &WalkConfig, observers: &mut [&mut dyn StepObserver]) -> Result<u64> {
    let steps = config.total_steps()?;
    let last = simulate(config, steps, |t, idx, coords| {
        for o in observers.iter_mut() {
            o.observe(t, idx, coords);
        }
        Flow::Continue
    })?;
    for o in observers.iter_mut() {
        o.finish(last);
    }
    Ok(last)
}

/// Records the full path as linear indices, refusing horizons above `cap`.
pub struct PathRecorder {
    pub cells: Vec<usize>,
}

impl PathRecorder {
    pub fn for_config(config: &WalkConfig, cap: u64) -> Result<Self> {
        let t = config.total_steps()?;
        if t > cap {
            return Err(Error::Parameter(format!(
                "path of {t} steps exceeds the retention cap {cap}"
            )));
        }
        Ok(Self {
            cells: Vec::with_capacity(t as usize + 1),
        })
    }
}

impl StepObserver for PathRecorder {
    fn observe(&mut self, _time: u64, index: usize, _coords: &[usize]) {
        self.cells.push(index);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(d: usize, n: usize, u: f64, seed: u64) -> WalkConfig {
        WalkConfig::new(TorusGeometry::new(d, n).unwrap(), u, seed, 0)
    }

    #[test]
    fn zero_time_visits_only_start() {
        let g = run_walk(&cfg(3, 10, 0.0, 1), &mut []).unwrap();
        assert_eq!(g.visited_count(0), 1);
        assert_eq!(g.total_steps(), 0);
    }

    #[test]
    fn repeated_runs_are_identical() {
        let c = cfg(3, 20, 1.0, 99);
        let a = run_walk(&c, &mut []).unwrap();
        let b = run_walk(&c, &mut []).unwrap();
        assert_eq!(a.visited_count(a.total_steps()), b.visited_count(b.total_steps()));
        assert_eq!(a.first_visit(), b.first_visit());
        let other = run_walk(&WalkConfig { replica_index: 1, ..c }, &mut []).unwrap();
        assert_ne!(a.first_visit(), other.first_visit());
    }

    #[test]
    fn path_steps_are_nearest_neighbour_moves() {
        let c = cfg(3, 7, 0.5, 5);
        let mut rec = PathRecorder::for_config(&c, DEFAULT_PATH_CAP).unwrap();
        let grid = run_walk(&c, &mut [&mut rec]).unwrap();
        let g = &c.geometry;
        assert_eq!(rec.cells.len() as u64, grid.total_steps() + 1);
        for w in rec.cells.windows(2) {
            assert_eq!(g.linf_dist(&g.point_at(w[0]), &g.point_at(w[1])), 1);
            let diff = g
                .displacement(g.point_at(w[0]).coords(), g.point_at(w[1]).coords())
                .iter()
                .map(|x| x.abs())
                .sum::<i64>();
            assert_eq!(diff, 1);
        }
        // first-visit grid agrees with the stored path at every prefix
        for (t, &cell) in rec.cells.iter().enumerate() {
            assert!(grid.first_visit()[cell] as usize <= t);
        }
        for (cell, &fv) in grid.first_visit().iter().enumerate() {
            match rec.cells.iter().position(|&c| c == cell) {
                Some(t) => assert_eq!(fv as usize, t),
                None => assert_eq!(fv, NEVER),
            }
        }
    }

    #[test]
    fn fixed_start_is_time_zero() {
        let c = cfg(3, 6, 0.2, 3).with_start(StartRule::Fixed(vec![1, 2, 3]));
        let grid = run_walk(&c, &mut []).unwrap();
        let idx = c.geometry.index(&c.geometry.point(&[1, 2, 3]).unwrap());
        assert_eq!(grid.first_visit()[idx], 0);
    }

    #[test]
    fn overflowing_horizon_is_rejected() {
        let c = cfg(3, 1000, 5.0, 1);
        assert!(matches!(c.total_steps(), Err(Error::TimeOverflow(_))));
        assert!(run_walk(&c, &mut []).is_err());
    }

    #[test]
    fn path_cap_is_enforced() {
        let c = cfg(3, 100, 3.0, 1);
        assert!(PathRecorder::for_config(&c, DEFAULT_PATH_CAP).is_err());
    }
}
