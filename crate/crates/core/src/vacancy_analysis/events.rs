//! The segment event V, the planar uniqueness event U, the local
//! connection event C and their combination G with the giant component.
//!
//! All length thresholds use the natural logarithm: `floor(K ln N)`.

use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use super::ball::dilate;
use super::components::{circular_runs, vacant_components};
use super::{line_bases, snapped_floor};
use crate::error::{Error, Result};
use crate::lattice::{circular_extent, CoordinatePlane, TorusGeometry, TorusPoint};
use crate::walk_engine::OccupancyGrid;

/// `floor(K ln N)`.
pub fn axis_run_threshold(k: f64, n: usize) -> usize {
    snapped_floor(k * (n as f64).ln())
}

#[derive(Clone, Debug, Serialize)]
pub struct VWitness {
    pub cell: Vec<usize>,
    pub direction: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct VReport {
    pub holds: bool,
    /// Cells per segment, `floor(K ln N) + 1`.
    pub segment_cells: usize,
    /// Number of admissible offsets `m`, i.e. integers in `[0, N^β)`.
    pub offsets: usize,
    pub witness: Option<VWitness>,
}

pub(crate) fn v_geometry(n: usize, k: f64, beta: f64) -> Result<(usize, usize)> {
    if !(k > 0.0 && beta >= 0.0) {
        return Err(Error::Parameter(format!("K = {k}, beta = {beta}")));
    }
    let seg = axis_run_threshold(k, n) + 1;
    let nb = (n as f64).powf(beta);
    let floor = snapped_floor(nb);
    let offsets = if (nb - floor as f64).abs() < 1e-9 { floor } else { floor + 1 };
    if seg + floor > n {
        return Err(Error::WindowTooLarge {
            needed: seg + floor,
            side: n,
        });
    }
    Ok((seg, offsets.max(1)))
}

/// First position `p` of a circular line such that no start in
/// `p, ..., p + offsets - 1` begins a vacant run of `seg` cells.
pub(crate) fn line_violation(vac: &[bool], seg: usize, offsets: usize) -> Option<usize> {
    let n = vac.len();
    let gap = vac.iter().position(|&v| !v)?;
    // forward run length from each position
    let mut run = vec![0usize; n];
    for k in 1..n {
        let q = (gap + n - k) % n;
        run[q] = if vac[q] { run[(q + 1) % n] + 1 } else { 0 };
    }
    let Some(good) = (0..n).find(|&q| run[q] >= seg) else {
        return Some(0);
    };
    // distance to the next good start
    let mut dist = vec![0usize; n];
    for k in 1..n {
        let p = (good + n - k) % n;
        dist[p] = if run[p] >= seg { 0 } else { dist[(p + 1) % n] + 1 };
    }
    (0..n).find(|&p| dist[p] >= offsets)
}

/// Event V: from every cell, along every axis, a vacant segment of
/// `floor(K ln N) + 1` cells starts within fewer than `N^β` steps.
pub fn detect_v(grid: &OccupancyGrid, t: u64, k: f64, beta: f64) -> Result<VReport> {
    grid.check_time(t)?;
    let geom = grid.geometry();
    let n = geom.side();
    let (seg, offsets) = v_geometry(n, k, beta)?;
    let mut report = VReport {
        holds: true,
        segment_cells: seg,
        offsets,
        witness: None,
    };
    for dir in 0..geom.dim() {
        let s = geom.stride(dir);
        for base in line_bases(geom, dir) {
            let vac: Vec<bool> = (0..n).map(|q| grid.is_vacant(base + q * s, t)).collect();
            if let Some(p) = line_violation(&vac, seg, offsets) {
                report.holds = false;
                report.witness = Some(VWitness {
                    cell: geom.point_at(base + p * s).coords().to_vec(),
                    direction: dir,
                });
                return Ok(report);
            }
        }
    }
    Ok(report)
}

/// Longest vacant axis run over all lines (`N` for a fully vacant line).
pub fn longest_axis_run(grid: &OccupancyGrid, t: u64) -> Result<usize> {
    grid.check_time(t)?;
    let geom = grid.geometry();
    let n = geom.side();
    let mut best = 0;
    for dir in 0..geom.dim() {
        let s = geom.stride(dir);
        for base in line_bases(geom, dir) {
            let vac: Vec<bool> = (0..n).map(|q| grid.is_vacant(base + q * s, t)).collect();
            for (_, len) in circular_runs(&vac) {
                best = best.max(len);
            }
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, Serialize)]
pub struct UReport {
    pub holds: bool,
    /// Diameter threshold `floor(K ln N)`.
    pub threshold: usize,
    pub witness: Option<CoordinatePlane>,
}

/// Components of the vacant cells of one plane, 4-adjacency on the 2-torus.
/// `mask[i * n + j]`; returns labels (`u32::MAX` on occupied) and sizes.
fn plane_components(mask: &[bool], n: usize) -> (Vec<u32>, Vec<usize>) {
    let mut labels = vec![u32::MAX; n * n];
    let mut sizes = Vec::new();
    let mut queue = VecDeque::new();
    for s in 0..n * n {
        if !mask[s] || labels[s] != u32::MAX {
            continue;
        }
        let l = sizes.len() as u32;
        labels[s] = l;
        queue.push_back(s);
        let mut size = 0;
        while let Some(c) = queue.pop_front() {
            size += 1;
            let (i, j) = (c / n, c % n);
            for nb in [
                ((i + 1) % n) * n + j,
                ((i + n - 1) % n) * n + j,
                i * n + (j + 1) % n,
                i * n + (j + n - 1) % n,
            ] {
                if mask[nb] && labels[nb] == u32::MAX {
                    labels[nb] = l;
                    queue.push_back(nb);
                }
            }
        }
        sizes.push(size);
    }
    (labels, sizes)
}

/// Number of in-plane components with plane diameter at least `threshold`.
pub(crate) fn count_large_components(mask: &[bool], n: usize, threshold: usize) -> usize {
    let (labels, sizes) = plane_components(mask, n);
    if threshold == 0 {
        return sizes.len();
    }
    // a component of diameter >= threshold has more than threshold cells
    let mut proj: HashMap<u32, (Vec<bool>, Vec<bool>)> = sizes
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > threshold)
        .map(|(l, _)| (l as u32, (vec![false; n], vec![false; n])))
        .collect();
    for (c, &l) in labels.iter().enumerate() {
        if let Some((a, b)) = proj.get_mut(&l) {
            a[c / n] = true;
            b[c % n] = true;
        }
    }
    proj.values()
        .filter(|(a, b)| circular_extent(a).max(circular_extent(b)) >= threshold)
        .count()
}

/// Event U: in every coordinate plane at most one vacant in-plane component
/// has plane diameter `>= floor(K ln N)`.
pub fn detect_u(grid: &OccupancyGrid, t: u64, k: f64) -> Result<UReport> {
    grid.check_time(t)?;
    let geom = grid.geometry();
    let n = geom.side();
    let threshold = axis_run_threshold(k, n);
    if threshold > n - 1 {
        return Ok(UReport {
            holds: true,
            threshold,
            witness: None,
        });
    }
    let planes = geom.planes();
    let bad = planes.par_iter().position_first(|plane| {
        let mask: Vec<bool> = geom
            .plane_cells(plane)
            .into_iter()
            .map(|c| grid.is_vacant(c, t))
            .collect();
        count_large_components(&mask, n, threshold) >= 2
    });
    Ok(UReport {
        holds: bad.is_none(),
        threshold,
        witness: bad.map(|i| planes[i].clone()),
    })
}

/// Whether the vacant cell at `coords` is joined, inside some coordinate
/// plane through it and within its in-plane box of radius `radius`, to the
/// sphere at distance `radius` by a vacant nearest-neighbour path.
pub fn connects_to_sphere(grid: &OccupancyGrid, t: u64, coords: &[usize], radius: usize) -> bool {
    let geom = grid.geometry();
    let x = geom.index_of(coords);
    if !grid.is_vacant(x, t) {
        return false;
    }
    if radius == 0 {
        return true;
    }
    let n = geom.side();
    let w = 2 * radius + 1;
    let r = radius as i64;
    let mut seen = vec![false; w * w];
    let mut queue = VecDeque::new();
    for a in 0..geom.dim() {
        for b in a + 1..geom.dim() {
            let (sa, sb) = (geom.stride(a), geom.stride(b));
            let (ca, cb) = (coords[a] as i64, coords[b] as i64);
            let cell = |i: i64, j: i64| -> usize {
                let ia = (ca + i).rem_euclid(n as i64) as usize;
                let jb = (cb + j).rem_euclid(n as i64) as usize;
                x - coords[a] * sa - coords[b] * sb + ia * sa + jb * sb
            };
            seen.iter_mut().for_each(|s| *s = false);
            queue.clear();
            seen[(radius * w + radius) as usize] = true;
            queue.push_back((0i64, 0i64));
            while let Some((i, j)) = queue.pop_front() {
                if i.abs() == r || j.abs() == r {
                    return true;
                }
                for (di, dj) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                    let (p, q) = (i + di, j + dj);
                    let slot = ((p + r) as usize) * w + (q + r) as usize;
                    if !seen[slot] && grid.is_vacant(cell(p, q), t) {
                        seen[slot] = true;
                        queue.push_back((p, q));
                    }
                }
            }
        }
    }
    false
}

/// Event C at `x`: radius `floor(K ln N)`.
pub fn detect_c(grid: &OccupancyGrid, t: u64, k: f64, x: &TorusPoint) -> Result<bool> {
    grid.check_time(t)?;
    let n = grid.geometry().side();
    let radius = axis_run_threshold(k, n);
    if 2 * radius + 1 > n {
        return Err(Error::BallTooLarge { radius, side: n });
    }
    Ok(connects_to_sphere(grid, t, x.coords(), radius))
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct GiantStats {
    pub unique: bool,
    pub size: usize,
    pub fraction: f64,
}

#[derive(Clone, Debug)]
pub struct GParams {
    pub k_runs: f64,
    pub beta: f64,
    /// Spacing of the probe sublattice used for `C_fraction`; `None` picks
    /// a spacing giving roughly 4096 probes.
    pub probe_stride: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EventReport {
    pub k_runs: f64,
    pub beta: f64,
    pub l0: usize,
    pub time: u64,
    pub v: bool,
    pub u: bool,
    pub g: bool,
    pub c_fraction: f64,
    pub c_probes: usize,
    /// Probes where C holds that are not in the giant component (only
    /// counted on G).
    pub c_outside_giant: usize,
    pub giant: GiantStats,
    pub largest_fraction: f64,
    pub component_count: usize,
    /// Whether the `floor(N^β)` L∞ neighbourhood of the giant covers the
    /// torus; `None` off G.
    pub neighborhood_covers: Option<bool>,
    pub v_witness: Option<VWitness>,
    pub u_witness: Option<CoordinatePlane>,
}

pub fn detect_g(grid: &OccupancyGrid, t: u64, k_runs: f64, beta: f64) -> Result<EventReport> {
    detect_g_with(
        grid,
        t,
        &GParams {
            k_runs,
            beta,
            probe_stride: None,
        },
    )
}

fn default_stride(geom: &TorusGeometry) -> usize {
    let per_axis = (4096f64).powf(1.0 / geom.dim() as f64).floor().max(1.0) as usize;
    geom.side().div_ceil(per_axis).max(1)
}

/// Event G = V ∧ U with the giant component. O is the unique vacant
/// component containing an axis run of `L0 + 1` cells, `L0 = floor(K ln N)`;
/// these are exactly the segments V asks for.
pub fn detect_g_with(grid: &OccupancyGrid, t: u64, p: &GParams) -> Result<EventReport> {
    let geom = grid.geometry();
    let n = geom.side();
    let v = detect_v(grid, t, p.k_runs, p.beta)?;
    let u = detect_u(grid, t, p.k_runs)?;
    let l0 = axis_run_threshold(p.k_runs, n);
    let comps = vacant_components(grid, t, l0 + 1)?;
    let g = v.holds && u.holds;

    let mut giant = GiantStats::default();
    let mut giant_label = None;
    let mut neighborhood_covers = None;
    if g {
        let runs = comps.run_components();
        giant.unique = runs.len() == 1;
        if let [label] = runs[..] {
            giant_label = Some(label);
            giant.size = comps.sizes[label];
            giant.fraction = giant.size as f64 / geom.cell_count() as f64;
            let reach = snapped_floor((n as f64).powf(p.beta));
            let near = dilate(geom, &comps.mask(label), reach);
            neighborhood_covers = Some(near.iter().all(|&b| b));
        }
    }

    let stride = p.probe_stride.unwrap_or_else(|| default_stride(geom)).max(1);
    let radius = l0;
    let (mut c_true, mut c_probes, mut c_outside) = (0, 0, 0);
    if 2 * radius + 1 <= n {
        let mut coords = vec![0usize; geom.dim()];
        for idx in 0..geom.cell_count() {
            geom.coords_into(idx, &mut coords);
            if coords.iter().any(|c| c % stride != 0) {
                continue;
            }
            c_probes += 1;
            if connects_to_sphere(grid, t, &coords, radius) {
                c_true += 1;
                if g && comps.label(idx) != giant_label {
                    c_outside += 1;
                }
            }
        }
    }
    Ok(EventReport {
        k_runs: p.k_runs,
        beta: p.beta,
        l0,
        time: t,
        v: v.holds,
        u: u.holds,
        g,
        c_fraction: if c_probes > 0 { c_true as f64 / c_probes as f64 } else { 0.0 },
        c_probes,
        c_outside_giant: c_outside,
        giant,
        largest_fraction: comps.largest_fraction(),
        component_count: comps.count(),
        neighborhood_covers,
        v_witness: v.witness,
        u_witness: u.witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all(n: usize, visited: bool) -> OccupancyGrid {
        let g = TorusGeometry::new(3, n).unwrap();
        OccupancyGrid::from_visited_mask(g, &vec![visited; n * n * n]).unwrap()
    }

    #[test]
    fn line_scan_examples() {
        // seg 2, offsets 2
        let v = [true, true, false, false, false, true];
        // good starts are 5 and 0; from 1 the next one is 4 steps away
        assert_eq!(line_violation(&v, 2, 2), Some(1));
        assert_eq!(line_violation(&v, 2, 4), Some(1));
        assert_eq!(line_violation(&v, 2, 5), None);
        assert_eq!(line_violation(&v, 4, 6), Some(0));
        assert_eq!(line_violation(&[false; 5], 1, 5), Some(0));
        assert_eq!(line_violation(&[true; 5], 5, 1), None);
    }

    #[test]
    fn trivial_grids() {
        let vac = all(8, false);
        assert!(detect_v(&vac, 0, 0.5, 0.5).unwrap().holds);
        assert!(detect_u(&vac, 0, 1.0).unwrap().holds);
        assert!(detect_c(&vac, 0, 1.0, &vac.geometry().point(&[3, 3, 3]).unwrap()).unwrap());
        let r = detect_g(&vac, 0, 0.5, 0.5).unwrap();
        assert!(r.g && r.giant.unique);
        assert_eq!(r.giant.fraction, 1.0);
        assert_eq!(r.neighborhood_covers, Some(true));

        let full = all(8, true);
        assert!(!detect_v(&full, 0, 0.5, 0.5).unwrap().holds);
        let r = detect_g(&full, 0, 0.5, 0.5).unwrap();
        assert!(!r.v && !r.g);
        assert_eq!(r.c_fraction, 0.0);
    }

    #[test]
    fn window_precondition() {
        let vac = all(8, false);
        // floor(2 ln 8) + 1 = 5 cells, floor(8^0.8) = 5 offsets: 10 > 8
        assert!(matches!(detect_v(&vac, 0, 2.0, 0.8), Err(Error::WindowTooLarge { .. })));
    }

    #[test]
    fn u_vacuous_above_side() {
        let g = TorusGeometry::new(3, 8).unwrap();
        let vis: Vec<bool> = (0..512).map(|i| i % 3 == 0).collect();
        let grid = OccupancyGrid::from_visited_mask(g, &vis).unwrap();
        assert!(detect_u(&grid, 0, 10.0).unwrap().holds);
    }

    #[test]
    fn two_blobs_in_one_plane_break_u() {
        let g = TorusGeometry::new(3, 16).unwrap();
        // visit everything except two 4x4 squares in the plane z = 0
        let vis: Vec<bool> = (0..g.cell_count())
            .map(|i| {
                let c = g.point_at(i);
                let c = c.coords();
                let in_sq = |x0: usize, y0: usize| (x0..x0 + 4).contains(&c[0]) && (y0..y0 + 4).contains(&c[1]);
                !(c[2] == 0 && (in_sq(1, 1) || in_sq(9, 9)))
            })
            .collect();
        let grid = OccupancyGrid::from_visited_mask(g, &vis).unwrap();
        // threshold floor(1.0 * ln 16) = 2 <= 3
        let r = detect_u(&grid, 0, 1.0).unwrap();
        assert!(!r.holds);
        let w = r.witness.unwrap();
        assert_eq!(w.directions(), (0, 1));
        assert_eq!(w.base().coords()[2], 0);
    }

    #[test]
    fn walled_in_point_fails_c() {
        let g = TorusGeometry::new(3, 9).unwrap();
        let x = [4usize, 4, 4];
        let vis: Vec<bool> = (0..g.cell_count())
            .map(|i| {
                let p = g.point_at(i);
                let d = p.coords().iter().zip(&x).map(|(&a, &b)| a.abs_diff(b)).max().unwrap();
                d == 2
            })
            .collect();
        let grid = OccupancyGrid::from_visited_mask(g.clone(), &vis).unwrap();
        let xp = g.point(&[4, 4, 4]).unwrap();
        // floor(K ln 9) = 3 with K = 1.4
        assert!(!detect_c(&grid, 0, 1.4, &xp).unwrap());
        // radius 1 is still reachable
        assert!(connects_to_sphere(&grid, 0, &x, 1));
    }
}
