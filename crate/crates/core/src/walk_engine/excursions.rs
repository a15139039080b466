//! Successive returns to an inner set and departures from an outer set.
//!
//! With `A ⊆ Ã`, `R_1` is the first time in `A`, `D_1` the first time
//! after `R_1` outside `Ã`, `R_{k+1}` the first time after `D_k` in `A`,
//! and so on. Both entrance and exit times count time 0, so a walk started
//! in `A` has `R_1 = 0`.

use serde::{Deserialize, Serialize};

use super::{observe_walk, StepObserver, WalkConfig};
use crate::error::{Error, Result};
use crate::lattice::{circular_dist, linf_dist_coords, TorusGeometry, TorusPoint};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinfBox {
    pub center: TorusPoint,
    pub radius: usize,
}

impl LinfBox {
    pub fn new(center: TorusPoint, radius: usize) -> Self {
        Self { center, radius }
    }
}

/// Union of equal-radius L∞ boxes on the torus.
#[derive(Clone, Debug)]
pub struct BoxUnion {
    centers: Vec<Vec<usize>>,
    radius: usize,
    side: usize,
}

impl BoxUnion {
    pub fn new(geometry: &TorusGeometry, centers: &[TorusPoint], radius: usize) -> Result<Self> {
        if 2 * radius + 1 > geometry.side() {
            return Err(Error::BallTooLarge {
                radius,
                side: geometry.side(),
            });
        }
        Ok(Self {
            centers: centers.iter().map(|c| c.coords().to_vec()).collect(),
            radius,
            side: geometry.side(),
        })
    }

    pub fn single(geometry: &TorusGeometry, b: &LinfBox) -> Result<Self> {
        Self::new(geometry, std::slice::from_ref(&b.center), b.radius)
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn centers(&self) -> &[Vec<usize>] {
        &self.centers
    }

    #[inline]
    pub fn contains(&self, coords: &[usize]) -> bool {
        self.which(coords).is_some()
    }

    /// Index of a box containing `coords`.
    #[inline]
    pub fn which(&self, coords: &[usize]) -> Option<usize> {
        self.centers
            .iter()
            .position(|c| linf_dist_coords(c, coords, self.side) <= self.radius)
    }

    /// L∞ distance from `coords` to the union (0 inside).
    pub fn distance(&self, coords: &[usize]) -> usize {
        self.centers
            .iter()
            .map(|c| linf_dist_coords(c, coords, self.side).saturating_sub(self.radius))
            .min()
            .unwrap_or(usize::MAX)
    }

    /// Every box of `self` lies inside some box of `other`.
    pub fn is_subset_of(&self, other: &BoxUnion) -> bool {
        self.centers.iter().all(|c| {
            other.centers.iter().any(|o| {
                c.iter()
                    .zip(o)
                    .all(|(&a, &b)| circular_dist(a, b, self.side) + self.radius <= other.radius)
            })
        })
    }
}

/// Return / departure times for one inner/outer pair.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcursionSchedule {
    pub returns: Vec<u64>,
    pub departures: Vec<u64>,
    /// Last time in the inner set before each departure, when tracked.
    pub last_visits: Option<Vec<u64>>,
    /// The final excursion started but had not departed at the horizon.
    pub open: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcursionCounts {
    pub completed: u64,
    pub open: u64,
}

impl ExcursionSchedule {
    /// Excursions completed by time `t`, plus one open excursion if a
    /// return at or before `t` has not departed by `t`.
    pub fn counts_at(&self, t: u64) -> ExcursionCounts {
        let completed = self.departures.iter().take_while(|&&d| d <= t).count() as u64;
        let started = self.returns.iter().take_while(|&&r| r <= t).count() as u64;
        ExcursionCounts {
            completed,
            open: started - completed,
        }
    }
}

/// NDJSON record for an exported schedule.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScheduleRecord {
    pub center: Vec<usize>,
    #[serde(rename = "L")]
    pub inner_radius: usize,
    pub r: usize,
    #[serde(rename = "R")]
    pub returns: Vec<u64>,
    #[serde(rename = "D")]
    pub departures: Vec<u64>,
    pub open: bool,
}

/// Streaming observer building an [`ExcursionSchedule`].
#[derive(Clone, Debug)]
pub struct ExcursionTracker {
    inner: BoxUnion,
    outer: BoxUnion,
    inside: bool,
    last_in_inner: u64,
    track_last: bool,
    schedule: ExcursionSchedule,
}

impl ExcursionTracker {
    pub fn new(inner: BoxUnion, outer: BoxUnion, track_last: bool) -> Result<Self> {
        if !inner.is_subset_of(&outer) {
            return Err(Error::BoxNesting);
        }
        Ok(Self {
            inner,
            outer,
            inside: false,
            last_in_inner: 0,
            track_last,
            schedule: ExcursionSchedule {
                last_visits: track_last.then(Vec::new),
                ..Default::default()
            },
        })
    }

    pub fn for_boxes(geometry: &TorusGeometry, inner: &LinfBox, outer: &LinfBox, track_last: bool) -> Result<Self> {
        Self::new(
            BoxUnion::single(geometry, inner)?,
            BoxUnion::single(geometry, outer)?,
            track_last,
        )
    }

    pub fn schedule(&self) -> &ExcursionSchedule {
        &self.schedule
    }

    pub fn into_schedule(self) -> ExcursionSchedule {
        self.schedule
    }

    pub fn record(&self) -> ScheduleRecord {
        ScheduleRecord {
            center: self.inner.centers[0].clone(),
            inner_radius: self.inner.radius,
            r: self.outer.radius,
            returns: self.schedule.returns.clone(),
            departures: self.schedule.departures.clone(),
            open: self.schedule.open,
        }
    }
}

impl StepObserver for ExcursionTracker {
    #[inline]
    fn observe(&mut self, time: u64, _index: usize, coords: &[usize]) {
        if self.inside {
            if !self.outer.contains(coords) {
                self.inside = false;
                self.schedule.departures.push(time);
                if let Some(l) = self.schedule.last_visits.as_mut() {
                    l.push(self.last_in_inner);
                }
            } else if self.track_last && self.inner.contains(coords) {
                self.last_in_inner = time;
            }
        } else if self.inner.contains(coords) {
            self.inside = true;
            self.last_in_inner = time;
            self.schedule.returns.push(time);
        }
    }

    fn finish(&mut self, _last_time: u64) {
        self.schedule.open = self.inside;
    }
}

/// Schedule of a stored torus path against `inner ⊆ outer`.
pub fn excursion_schedule(
    geometry: &TorusGeometry,
    path: &[TorusPoint],
    inner: &LinfBox,
    outer: &LinfBox,
    track_last: bool,
) -> Result<ExcursionSchedule> {
    let mut tracker = ExcursionTracker::for_boxes(geometry, inner, outer, track_last)?;
    for (t, p) in path.iter().enumerate() {
        tracker.observe(t as u64, geometry.index(p), p.coords());
    }
    tracker.finish(path.len().saturating_sub(1) as u64);
    Ok(tracker.into_schedule())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckpointCounts {
    pub u: f64,
    pub time: u64,
    /// Returns to `B(x)` / departures from `B̃(x)` (radii `N/8`, `N/4`).
    pub macroscopic: ExcursionCounts,
    /// Returns to `C(x) = B(x, L)` / departures from `C̃(x) = B(x, r)`.
    pub probe: ExcursionCounts,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxExcursionCounts {
    pub center: Vec<usize>,
    pub core_radius: usize,
    pub halo_radius: usize,
    pub checkpoints: Vec<CheckpointCounts>,
}

/// Runs one walk up to the largest checkpoint and counts excursions for the
/// macroscopic pair `B(x) ⊆ B̃(x)` and the probe pair `C(x) ⊆ C̃(x)` at every
/// checkpoint `u` (time `floor(u N^d)`).
pub fn count_box_excursions(
    config: &WalkConfig,
    x: &TorusPoint,
    core_radius: usize,
    halo_radius: usize,
    checkpoints: &[f64],
) -> Result<BoxExcursionCounts> {
    let g = &config.geometry;
    let n = g.side();
    if core_radius > halo_radius {
        return Err(Error::BoxNesting);
    }
    let u_max = checkpoints.iter().cloned().fold(0.0, f64::max);
    let run = WalkConfig {
        u: u_max,
        ..config.clone()
    };
    let mut macro_pair = ExcursionTracker::for_boxes(
        g,
        &LinfBox::new(x.clone(), n / 8),
        &LinfBox::new(x.clone(), n / 4),
        false,
    )?;
    let mut probe_pair = ExcursionTracker::for_boxes(
        g,
        &LinfBox::new(x.clone(), core_radius),
        &LinfBox::new(x.clone(), halo_radius),
        false,
    )?;
    observe_walk(&run, &mut [&mut macro_pair, &mut probe_pair])?;
    let checkpoints = checkpoints
        .iter()
        .map(|&u| {
            let time = super::steps_for(g, u)?;
            Ok(CheckpointCounts {
                u,
                time,
                macroscopic: macro_pair.schedule().counts_at(time),
                probe: probe_pair.schedule().counts_at(time),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoxExcursionCounts {
        center: x.coords().to_vec(),
        core_radius,
        halo_radius,
        checkpoints,
    })
}

#[derive(Clone, Debug)]
enum Lookup {
    /// Regular sublattice: per-axis slot of each residue, `(axis index,
    /// signed offset)` when within the halo radius of a probe coordinate.
    Lattice {
        per_axis: usize,
        slots: Vec<Option<(u32, i32)>>,
    },
    List(BoxUnion),
}

/// A family of probe centers `x`, each with a core `C(x) = B(x, L)` and a
/// halo `C̃(x) = B(x, r)`; halos are pairwise disjoint. As an observer it
/// records the departure times `D^x_k` of every probe up to a target count.
#[derive(Clone, Debug)]
pub struct ProbeSet {
    dim: usize,
    side: usize,
    centers: Vec<Vec<usize>>,
    core: usize,
    halo: usize,
    lookup: Lookup,
    target: usize,
    departures: Vec<Vec<u64>>,
    returns: Vec<u64>,
    active: Option<usize>,
    remaining: usize,
}

impl ProbeSet {
    /// Regular sublattice with at least `spacing` between neighbouring
    /// probes along every axis (wrap included); requires
    /// `spacing >= 2 * halo + 3`.
    pub fn regular(geometry: &TorusGeometry, core: usize, halo: usize, spacing: usize) -> Result<Self> {
        let n = geometry.side();
        let d = geometry.dim();
        check_radii(core, halo, n)?;
        if spacing < 2 * halo + 3 {
            return Err(Error::Parameter(format!(
                "probe spacing {spacing} < 2r+3 = {}",
                2 * halo + 3
            )));
        }
        let per_axis = n / spacing;
        if per_axis == 0 {
            return Err(Error::Parameter(format!(
                "spacing {spacing} exceeds the side {n}"
            )));
        }
        let positions: Vec<usize> = (0..per_axis).map(|k| (k * n + per_axis / 2) / per_axis).collect();
        let mut slots = vec![None; n];
        for (k, &p) in positions.iter().enumerate() {
            for off in -(halo as i64)..=(halo as i64) {
                let c = (p as i64 + off).rem_euclid(n as i64) as usize;
                slots[c] = Some((k as u32, off as i32));
            }
        }
        let mut centers = Vec::with_capacity(per_axis.pow(d as u32));
        let mut idx = vec![0usize; d];
        loop {
            centers.push(idx.iter().map(|&k| positions[k]).collect());
            let mut j = d;
            loop {
                if j == 0 {
                    break;
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < per_axis {
                    break;
                }
                idx[j] = 0;
                if j == 0 {
                    j = usize::MAX;
                    break;
                }
            }
            if j == usize::MAX {
                break;
            }
        }
        Ok(Self::build(
            d,
            n,
            centers,
            core,
            halo,
            Lookup::Lattice { per_axis, slots },
        ))
    }

    /// Explicit centers with pairwise L∞ distance at least `2r + 3`.
    pub fn from_centers(geometry: &TorusGeometry, centers: &[TorusPoint], core: usize, halo: usize) -> Result<Self> {
        let n = geometry.side();
        check_radii(core, halo, n)?;
        for (i, a) in centers.iter().enumerate() {
            for b in &centers[i + 1..] {
                if geometry.linf_dist(a, b) < 2 * halo + 3 {
                    return Err(Error::Parameter(format!(
                        "probe centers {:?} and {:?} closer than 2r+3",
                        a.coords(),
                        b.coords()
                    )));
                }
            }
        }
        let union = BoxUnion::new(geometry, centers, halo)?;
        Ok(Self::build(
            geometry.dim(),
            n,
            centers.iter().map(|c| c.coords().to_vec()).collect(),
            core,
            halo,
            Lookup::List(union),
        ))
    }

    fn build(dim: usize, side: usize, centers: Vec<Vec<usize>>, core: usize, halo: usize, lookup: Lookup) -> Self {
        let k = centers.len();
        Self {
            dim,
            side,
            centers,
            core,
            halo,
            lookup,
            target: 0,
            departures: vec![Vec::new(); k],
            returns: vec![0; k],
            active: None,
            remaining: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn centers(&self) -> &[Vec<usize>] {
        &self.centers
    }

    pub fn core_radius(&self) -> usize {
        self.core
    }

    pub fn halo_radius(&self) -> usize {
        self.halo
    }

    /// Number of departures each probe must record before
    /// [`ProbeSet::all_reached`] turns true. Resets recorded state.
    pub fn set_target(&mut self, target: usize) {
        self.target = target;
        self.remaining = if target == 0 { 0 } else { self.centers.len() };
        for d in &mut self.departures {
            d.clear();
        }
        self.returns.iter_mut().for_each(|r| *r = 0);
        self.active = None;
    }

    pub fn all_reached(&self) -> bool {
        self.remaining == 0
    }

    /// `D^x_k` of probe `probe` (1-based `k`); `k = 0` gives time 0.
    pub fn departure(&self, probe: usize, k: usize) -> Option<u64> {
        if k == 0 {
            return Some(0);
        }
        self.departures[probe].get(k - 1).copied()
    }

    pub fn departures(&self, probe: usize) -> &[u64] {
        &self.departures[probe]
    }

    /// Probe whose halo contains `coords`, and whether `coords` is in its core.
    #[inline]
    pub fn locate(&self, coords: &[usize]) -> Option<(usize, bool)> {
        match &self.lookup {
            Lookup::Lattice { per_axis, slots } => {
                let mut id = 0usize;
                let mut in_core = true;
                for &c in coords {
                    let (k, off) = slots[c]?;
                    id = id * per_axis + k as usize;
                    in_core &= off.unsigned_abs() as usize <= self.core;
                }
                Some((id, in_core))
            }
            Lookup::List(union) => {
                let i = union.which(coords)?;
                let in_core = linf_dist_coords(&self.centers[i], coords, self.side) <= self.core;
                Some((i, in_core))
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

fn check_radii(core: usize, halo: usize, side: usize) -> Result<()> {
    if core > halo {
        return Err(Error::BoxNesting);
    }
    if 2 * halo + 1 > side {
        return Err(Error::BallTooLarge { radius: halo, side });
    }
    Ok(())
}

impl StepObserver for ProbeSet {
    #[inline]
    fn observe(&mut self, time: u64, _index: usize, coords: &[usize]) {
        let here = self.locate(coords);
        if let Some(a) = self.active {
            if here.map(|(p, _)| p) != Some(a) {
                self.active = None;
                let deps = &mut self.departures[a];
                deps.push(time);
                if deps.len() == self.target {
                    self.remaining -= 1;
                }
            }
        }
        if self.active.is_none() {
            if let Some((p, true)) = here {
                self.active = Some(p);
                self.returns[p] += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk_engine::{run_walk, PathRecorder, DEFAULT_PATH_CAP};

    fn pts(g: &TorusGeometry, path: &[[i64; 3]]) -> Vec<TorusPoint> {
        path.iter().map(|c| g.point(c).unwrap()).collect()
    }

    /// Hand-traced path on d=3, N=8 against A = B(0,1), Ã = B(0,2).
    #[test]
    fn hand_traced_schedule() {
        let g = TorusGeometry::new(3, 8).unwrap();
        let path = pts(
            &g,
            &[
                [3, 0, 0], // t0  |x|=3 outside Ã
                [2, 0, 0], // t1  in Ã, not A
                [1, 0, 0], // t2  enters A        -> R1 = 2
                [2, 0, 0], // t3
                [3, 0, 0], // t4  leaves Ã        -> D1 = 4
                [2, 0, 0], // t5
                [2, 1, 0], // t6
                [1, 1, 0], // t7  enters A        -> R2 = 7
                [1, 2, 0], // t8
                [1, 3, 0], // t9  leaves Ã        -> D2 = 9
                [1, 4, 0], // t10
                [1, 5, 0], // t11 |x| = 3 (wrap)
                [1, 6, 0], // t12 in Ã again, never in A
            ],
        );
        let a = LinfBox::new(g.origin(), 1);
        let at = LinfBox::new(g.origin(), 2);
        let s = excursion_schedule(&g, &path, &a, &at, true).unwrap();
        assert_eq!(s.returns, vec![2, 7]);
        assert_eq!(s.departures, vec![4, 9]);
        assert_eq!(s.last_visits, Some(vec![2, 7]));
        assert!(!s.open);
    }

    #[test]
    fn start_inside_gives_zero_return_and_open_tail() {
        let g = TorusGeometry::new(3, 8).unwrap();
        let path = pts(&g, &[[0, 0, 0], [0, 1, 0], [0, 2, 0]]);
        let s = excursion_schedule(
            &g,
            &path,
            &LinfBox::new(g.origin(), 1),
            &LinfBox::new(g.origin(), 2),
            false,
        )
        .unwrap();
        assert_eq!(s.returns, vec![0]);
        assert!(s.departures.is_empty());
        assert!(s.open);
        assert_eq!(s.counts_at(2), ExcursionCounts { completed: 0, open: 1 });
    }

    #[test]
    fn never_entering_gives_empty_schedule() {
        let g = TorusGeometry::new(3, 16).unwrap();
        let path = pts(&g, &[[8, 8, 8], [8, 8, 9], [8, 9, 9]]);
        let s = excursion_schedule(
            &g,
            &path,
            &LinfBox::new(g.origin(), 1),
            &LinfBox::new(g.origin(), 3),
            false,
        )
        .unwrap();
        assert_eq!(s, ExcursionSchedule::default());
    }

    #[test]
    fn nesting_is_checked() {
        let g = TorusGeometry::new(3, 16).unwrap();
        let inner = LinfBox::new(g.point(&[1, 0, 0]).unwrap(), 2);
        let outer = LinfBox::new(g.origin(), 2);
        assert!(matches!(
            ExcursionTracker::for_boxes(&g, &inner, &outer, false),
            Err(Error::BoxNesting)
        ));
    }

    #[test]
    fn realized_schedules_interleave_strictly() {
        let g = TorusGeometry::new(3, 12).unwrap();
        for rep in 0..10 {
            let c = WalkConfig::new(g.clone(), 2.0, 77, rep);
            let mut t = ExcursionTracker::for_boxes(
                &g,
                &LinfBox::new(g.origin(), 1),
                &LinfBox::new(g.origin(), 3),
                true,
            )
            .unwrap();
            run_walk(&c, &mut [&mut t]).unwrap();
            let s = t.schedule();
            let mut times = Vec::new();
            for (k, r) in s.returns.iter().enumerate() {
                times.push(*r);
                if let Some(d) = s.departures.get(k) {
                    times.push(*d);
                }
            }
            assert!(times.windows(2).all(|w| w[0] < w[1]));
            let lv = s.last_visits.as_ref().unwrap();
            for k in 0..s.departures.len() {
                assert!(s.returns[k] <= lv[k] && lv[k] < s.departures[k]);
            }
            assert_eq!(s.open, s.returns.len() == s.departures.len() + 1);
        }
    }

    /// The visited part of `C(x)` up to time `s` equals the union of the
    /// excursion traces up to the last departure `<= s`, intersected with
    /// `C(x)`, plus the trace of any open excursion.
    #[test]
    fn grid_section_matches_excursion_traces() {
        let g = TorusGeometry::new(3, 10).unwrap();
        let x = g.point(&[5, 5, 5]).unwrap();
        let core = LinfBox::new(x.clone(), 1);
        for rep in 0..5 {
            let c = WalkConfig::new(g.clone(), 1.5, 3, rep);
            let mut rec = PathRecorder::for_config(&c, DEFAULT_PATH_CAP).unwrap();
            let mut t =
                ExcursionTracker::for_boxes(&g, &core, &LinfBox::new(x.clone(), 3), false).unwrap();
            let grid = run_walk(&c, &mut [&mut rec, &mut t]).unwrap();
            let s = t.schedule();
            let core_cells: Vec<usize> = g.ball(&x, 1).unwrap().iter().map(|p| g.index(p)).collect();
            for (k, &d) in s.departures.iter().enumerate() {
                let mut from_traces = std::collections::BTreeSet::new();
                for j in 0..=k {
                    for time in s.returns[j]..s.departures[j] {
                        let cell = rec.cells[time as usize];
                        if core_cells.contains(&cell) {
                            from_traces.insert(cell);
                        }
                    }
                }
                let from_grid: std::collections::BTreeSet<usize> = core_cells
                    .iter()
                    .copied()
                    .filter(|&cell| grid.is_visited(cell, d))
                    .collect();
                assert_eq!(from_traces, from_grid);
            }
        }
    }

    #[test]
    fn probe_lattice_matches_list_lookup() {
        let g = TorusGeometry::new(3, 30).unwrap();
        let lattice = ProbeSet::regular(&g, 1, 3, 9).unwrap();
        assert_eq!(lattice.len(), 27);
        let centers: Vec<TorusPoint> = lattice
            .centers()
            .iter()
            .map(|c| g.point(&c.iter().map(|&x| x as i64).collect::<Vec<_>>()).unwrap())
            .collect();
        let list = ProbeSet::from_centers(&g, &centers, 1, 3).unwrap();
        for idx in 0..g.cell_count() {
            let p = g.point_at(idx);
            assert_eq!(lattice.locate(p.coords()), list.locate(p.coords()));
        }
        assert!(ProbeSet::regular(&g, 1, 3, 8).is_err());
    }

    #[test]
    fn probe_departures_match_single_trackers() {
        let g = TorusGeometry::new(3, 24).unwrap();
        let centers = vec![g.point(&[0, 0, 0]).unwrap(), g.point(&[12, 12, 12]).unwrap()];
        let mut probes = ProbeSet::from_centers(&g, &centers, 1, 4).unwrap();
        probes.set_target(usize::MAX);
        let mut t0 = ExcursionTracker::for_boxes(
            &g,
            &LinfBox::new(centers[0].clone(), 1),
            &LinfBox::new(centers[0].clone(), 4),
            false,
        )
        .unwrap();
        let mut t1 = ExcursionTracker::for_boxes(
            &g,
            &LinfBox::new(centers[1].clone(), 1),
            &LinfBox::new(centers[1].clone(), 4),
            false,
        )
        .unwrap();
        let c = WalkConfig::new(g.clone(), 3.0, 5, 0);
        run_walk(&c, &mut [&mut probes, &mut t0, &mut t1]).unwrap();
        assert_eq!(probes.departures(0), t0.schedule().departures.as_slice());
        assert_eq!(probes.departures(1), t1.schedule().departures.as_slice());
        assert!(!t0.schedule().departures.is_empty());
    }

    #[test]
    fn zero_horizon_counts_nothing_completed() {
        let g = TorusGeometry::new(3, 16).unwrap();
        let c = WalkConfig::new(g.clone(), 0.0, 1, 0);
        let r = count_box_excursions(&c, &g.origin(), 1, 3, &[0.0]).unwrap();
        assert_eq!(r.checkpoints[0].macroscopic.completed, 0);
        assert_eq!(r.checkpoints[0].probe.completed, 0);
    }
}
