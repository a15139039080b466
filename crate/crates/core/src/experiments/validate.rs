//! The invariant suite: brute-force oracles against the fast detectors on
//! small 3-d grids, plus the exact cross-module invariants.
//!
//! Detectors are passed in as plain function pointers so that a deliberately
//! broken implementation can be substituted and shown to fail the suite.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::Serialize;

use super::config::ValidateConfig;
use crate::error::Result;
use crate::lattice::{TorusGeometry, TorusPoint};
use crate::potential_theory::star_saw_count;
use crate::rng::{stream_rng, Stream};
use crate::vacancy_analysis::{
    axis_run_threshold, detect_c, detect_g_with, detect_u, detect_v, dilate, erode, largest_vacant_ball,
    vacant_components, vacant_fraction, GParams, VacantComponents,
};
use crate::walk_engine::{run_walk, OccupancyGrid, WalkConfig, NEVER};

pub type VFn = fn(&OccupancyGrid, u64, f64, f64) -> Result<bool>;
pub type UFn = fn(&OccupancyGrid, u64, f64) -> Result<bool>;
pub type CFn = fn(&OccupancyGrid, u64, f64, &TorusPoint) -> Result<bool>;
pub type ComponentsFn = fn(&OccupancyGrid, u64, usize) -> Result<VacantComponents>;
pub type BallFn = fn(&OccupancyGrid, u64) -> Result<usize>;

#[derive(Clone, Copy)]
pub struct Detectors {
    pub v: VFn,
    pub u: UFn,
    pub c: CFn,
    pub components: ComponentsFn,
    pub ball: BallFn,
}

impl Default for Detectors {
    fn default() -> Self {
        Self {
            v: |g, t, k, b| detect_v(g, t, k, b).map(|r| r.holds),
            u: |g, t, k| detect_u(g, t, k).map(|r| r.holds),
            c: detect_c,
            components: vacant_components,
            ball: largest_vacant_ball,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    /// First failing case.
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidateReport {
    pub checks: Vec<CheckResult>,
}

impl ValidateReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.failures == 0)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| c.failures > 0)
    }
}

#[derive(Default)]
struct Tally {
    checks: Vec<CheckResult>,
}

impl Tally {
    fn record(&mut self, name: &str, ok: bool, witness: impl FnOnce() -> String) {
        let i = match self.checks.iter().position(|c| c.name == name) {
            Some(i) => i,
            None => {
                self.checks.push(CheckResult {
                    name: name.to_string(),
                    cases: 0,
                    failures: 0,
                    witness: None,
                });
                self.checks.len() - 1
            }
        };
        let c = &mut self.checks[i];
        c.cases += 1;
        if !ok {
            c.failures += 1;
            if c.witness.is_none() {
                c.witness = Some(witness());
            }
        }
    }

    fn result<T: PartialEq + std::fmt::Debug>(&mut self, name: &str, fast: Result<T>, slow: T, ctx: &str) {
        match fast {
            Ok(v) => {
                let ok = v == slow;
                self.record(name, ok, || format!("{ctx}: got {v:?}, expected {slow:?}"));
            }
            Err(e) => self.record(name, false, || format!("{ctx}: error {e}")),
        }
    }
}

/// A small test grid and the parameters to query it with.
struct Case {
    grid: OccupancyGrid,
    t: u64,
    k: f64,
    beta: f64,
    label: String,
}

fn random_case(i: usize, max_side: usize, seed: u64) -> Result<Case> {
    let mut rng = stream_rng(seed, Stream::Synthetic, i as u64);
    let side = rng.random_range(3..=max_side.max(3));
    let geom = TorusGeometry::new(3, side)?;
    let cells = geom.cell_count();
    let (grid, kind) = match i % 3 {
        0 => {
            let u = rng.random_range(0.0..1.5);
            let g = run_walk(&WalkConfig::new(geom, u, seed, i as u64), &mut [])?;
            (g, format!("walk u={u:.3}"))
        }
        1 => {
            let p = rng.random_range(0.05..0.9);
            let horizon = 100u32;
            let fv = (0..cells)
                .map(|_| if rng.random_bool(p) { rng.random_range(0..=horizon) } else { NEVER })
                .collect();
            (OccupancyGrid::synthetic(geom, fv, horizon as u64)?, format!("iid p={p:.3}"))
        }
        _ => {
            // visited slabs orthogonal to a random axis, plus sparse noise
            let axis = rng.random_range(0..3);
            let mut slabs: Vec<usize> = (0..side).collect();
            slabs.shuffle(&mut rng);
            slabs.truncate(rng.random_range(0..=side.min(3)));
            let mut coords = [0usize; 3];
            let fv = (0..cells)
                .map(|c| {
                    geom.coords_into(c, &mut coords);
                    if slabs.contains(&coords[axis]) || rng.random_bool(0.05) {
                        0
                    } else {
                        NEVER
                    }
                })
                .collect();
            (OccupancyGrid::synthetic(geom, fv, 0)?, format!("slabs {slabs:?} on axis {axis}"))
        }
    };
    let t = rng.random_range(0..=grid.total_steps());
    let k = [0.25, 0.5, 0.75, 1.0, 1.5][rng.random_range(0..5)];
    let beta = [0.2, 0.4, 0.6, 0.8][rng.random_range(0..4)];
    Ok(Case {
        label: format!("case {i}: N={side}, {kind}, t={t}, K={k}, beta={beta}"),
        grid,
        t,
        k,
        beta,
    })
}

/// Brute-force reference implementations, written for clarity only.
pub mod oracle {
    use crate::lattice::TorusGeometry;

    fn shift(geom: &TorusGeometry, c: &[usize], dir: usize, by: i64) -> usize {
        let n = geom.side() as i64;
        let mut p = c.to_vec();
        p[dir] = (p[dir] as i64 + by).rem_euclid(n) as usize;
        geom.index_of(&p)
    }

    fn coords(geom: &TorusGeometry, i: usize) -> Vec<usize> {
        geom.point_at(i).coords().to_vec()
    }

    /// Every cell and axis sees a vacant window of `seg` cells starting
    /// `m < offsets` steps ahead.
    pub fn v(geom: &TorusGeometry, vac: &[bool], seg: usize, offsets: usize) -> bool {
        (0..geom.cell_count()).all(|x| {
            let c = coords(geom, x);
            (0..geom.dim()).all(|j| {
                (0..offsets).any(|m| (0..seg).all(|s| vac[shift(geom, &c, j, (m + s) as i64)]))
            })
        })
    }

    /// Smallest circular window covering the residues, minus one.
    fn extent(occ: &[bool]) -> usize {
        let n = occ.len();
        if !occ.iter().any(|&o| o) {
            return 0;
        }
        (1..=n)
            .find(|&w| (0..n).any(|s| (0..n).all(|r| !occ[r] || (r + n - s) % n < w)))
            .unwrap()
            - 1
    }

    /// Union-find labels over nearest neighbours within the given cells.
    fn labels(cells: &[usize], adjacent: impl Fn(usize, usize) -> bool) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..cells.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                x = p[x];
            }
            x
        }
        for a in 0..cells.len() {
            for b in 0..a {
                if adjacent(cells[a], cells[b]) {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    parent[ra] = rb;
                }
            }
        }
        (0..cells.len()).map(|a| find(&mut parent, a)).collect()
    }

    fn neighbours(geom: &TorusGeometry, a: usize, b: usize) -> bool {
        let (ca, cb) = (coords(geom, a), coords(geom, b));
        let n = geom.side();
        let diffs: Vec<usize> = ca
            .iter()
            .zip(&cb)
            .map(|(&x, &y)| {
                let d = x.abs_diff(y);
                d.min(n - d)
            })
            .collect();
        diffs.iter().sum::<usize>() == 1
    }

    /// At most one in-plane vacant component per plane with diameter
    /// `>= threshold`.
    pub fn u(geom: &TorusGeometry, vac: &[bool], threshold: usize) -> bool {
        let n = geom.side();
        if threshold > n - 1 {
            return true;
        }
        let d = geom.dim();
        for a in 0..d {
            for b in a + 1..d {
                // planes are indexed by the cells with zero a- and b-coordinates
                for base in 0..geom.cell_count() {
                    let c = coords(geom, base);
                    if c[a] != 0 || c[b] != 0 {
                        continue;
                    }
                    let cells: Vec<usize> = (0..n * n)
                        .map(|k| {
                            let mut p = c.clone();
                            p[a] = k / n;
                            p[b] = k % n;
                            geom.index_of(&p)
                        })
                        .filter(|&i| vac[i])
                        .collect();
                    let lab = labels(&cells, |x, y| neighbours(geom, x, y));
                    let mut large = 0;
                    let mut roots: Vec<usize> = lab.clone();
                    roots.sort_unstable();
                    roots.dedup();
                    for r in roots {
                        let mut oa = vec![false; n];
                        let mut ob = vec![false; n];
                        for (k, &cell) in cells.iter().enumerate() {
                            if lab[k] == r {
                                let p = coords(geom, cell);
                                oa[p[a]] = true;
                                ob[p[b]] = true;
                            }
                        }
                        if extent(&oa).max(extent(&ob)) >= threshold {
                            large += 1;
                        }
                    }
                    if large >= 2 {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// `x` vacant and joined inside a coordinate plane, within its in-plane
    /// box, to the box boundary. Grows the reachable set to a fixed point.
    pub fn c(geom: &TorusGeometry, vac: &[bool], x: usize, radius: usize) -> bool {
        if !vac[x] {
            return false;
        }
        if radius == 0 {
            return true;
        }
        let r = radius as i64;
        let cx = coords(geom, x);
        let d = geom.dim();
        for a in 0..d {
            for b in a + 1..d {
                let at = |i: i64, j: i64| shift(geom, &coords(geom, shift(geom, &cx, a, i)), b, j);
                let w = (2 * r + 1) as usize;
                let mut reach = vec![false; w * w];
                reach[(r * (2 * r + 1) + r) as usize] = true;
                loop {
                    let mut grew = false;
                    for i in -r..=r {
                        for j in -r..=r {
                            let s = ((i + r) * (2 * r + 1) + j + r) as usize;
                            if reach[s] || !vac[at(i, j)] {
                                continue;
                            }
                            let near = [(i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)].iter().any(|&(p, q)| {
                                p.abs() <= r && q.abs() <= r && reach[((p + r) * (2 * r + 1) + q + r) as usize]
                            });
                            if near {
                                reach[s] = true;
                                grew = true;
                            }
                        }
                    }
                    if !grew {
                        break;
                    }
                }
                for i in -r..=r {
                    for j in -r..=r {
                        let s = ((i + r) * (2 * r + 1) + j + r) as usize;
                        if reach[s] && (i.abs() == r || j.abs() == r) {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    /// Component root per vacant cell (`None` on visited cells) and whether
    /// each cell's component holds a vacant axis run of `run_cells` cells.
    pub fn components(geom: &TorusGeometry, vac: &[bool], run_cells: usize) -> (Vec<Option<usize>>, Vec<bool>) {
        let cells: Vec<usize> = (0..geom.cell_count()).filter(|&i| vac[i]).collect();
        let lab = labels(&cells, |x, y| neighbours(geom, x, y));
        let mut root = vec![None; geom.cell_count()];
        for (k, &c) in cells.iter().enumerate() {
            root[c] = Some(cells[lab[k]]);
        }
        let n = geom.side();
        let mut has_run = vec![false; geom.cell_count()];
        if run_cells <= n {
            for &c in &cells {
                let p = coords(geom, c);
                for j in 0..geom.dim() {
                    if (0..run_cells).all(|s| vac[shift(geom, &p, j, s as i64)]) {
                        has_run[root[c].unwrap()] = true;
                    }
                }
            }
        }
        let flags = (0..geom.cell_count())
            .map(|c| root[c].is_some_and(|r| has_run[r]))
            .collect();
        (root, flags)
    }

    /// Largest distance from a cell to the visited set, minus one, at least 0.
    pub fn ball(geom: &TorusGeometry, vac: &[bool]) -> usize {
        let n = geom.side();
        let visited: Vec<Vec<usize>> = (0..geom.cell_count()).filter(|&i| !vac[i]).map(|i| coords(geom, i)).collect();
        (0..geom.cell_count())
            .map(|x| {
                let cx = coords(geom, x);
                visited
                    .iter()
                    .map(|y| {
                        cx.iter()
                            .zip(y)
                            .map(|(&a, &b)| a.abs_diff(b).min(n - a.abs_diff(b)))
                            .max()
                            .unwrap_or(0)
                    })
                    .min()
                    .unwrap_or(n)
            })
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }
}

/// Number of offsets `m` with `0 <= m < N^β`.
fn offset_count(n: usize, beta: f64) -> usize {
    let nb = (n as f64).powf(beta);
    (0..=n).take_while(|&m| (m as f64) < nb - 1e-9).count().max(1)
}

fn window_fits(n: usize, k: f64, beta: f64) -> bool {
    let reach = ((n as f64).powf(beta) + 1e-9).floor() as usize;
    axis_run_threshold(k, n) + 1 + reach <= n
}

fn oracle_checks(tally: &mut Tally, det: &Detectors, case: &Case) {
    let g = &case.grid;
    let geom = g.geometry();
    let n = geom.side();
    let t = case.t;
    let vac = g.vacant_mask(t);
    let ctx = case.label.as_str();
    let thr = axis_run_threshold(case.k, n);

    if window_fits(n, case.k, case.beta) {
        let want = oracle::v(geom, &vac, thr + 1, offset_count(n, case.beta));
        tally.result("detect_v matches brute force", (det.v)(g, t, case.k, case.beta), want, ctx);
    }
    tally.result("detect_u matches brute force", (det.u)(g, t, case.k), oracle::u(geom, &vac, thr), ctx);
    if 2 * thr < n {
        for x in (0..geom.cell_count()).step_by(7) {
            let p = geom.point_at(x);
            let want = oracle::c(geom, &vac, x, thr);
            tally.result(
                "detect_c matches brute force",
                (det.c)(g, t, case.k, &p),
                want,
                &format!("{ctx}, x={:?}", p.coords()),
            );
        }
    }
    let run_cells = thr + 1;
    let (roots, flags) = oracle::components(geom, &vac, run_cells);
    match (det.components)(g, t, run_cells) {
        Ok(comp) => {
            // same partition: two cells share a label iff they share a root
            let cells = geom.cell_count();
            let mut ok = (0..cells).all(|i| comp.label(i).is_some() == roots[i].is_some());
            let mut first = vec![None; cells];
            for i in 0..cells {
                if let (Some(l), Some(r)) = (comp.label(i), roots[i]) {
                    match first[r] {
                        None => first[r] = Some(l),
                        Some(prev) => ok &= prev == l,
                    }
                    ok &= comp.has_run[l] == flags[i];
                }
            }
            let distinct = first.iter().flatten().collect::<std::collections::BTreeSet<_>>().len();
            ok &= distinct == comp.count();
            tally.record("vacant_components matches brute force", ok, || ctx.to_string());
            tally.record(
                "component sizes sum to the vacant count",
                comp.vacant_count() == vac.iter().filter(|&&v| v).count(),
                || ctx.to_string(),
            );
        }
        Err(e) => tally.record("vacant_components matches brute force", false, || format!("{ctx}: {e}")),
    }
    tally.result("largest_vacant_ball matches brute force", (det.ball)(g, t), oracle::ball(geom, &vac), ctx);
}

fn exact_invariants(tally: &mut Tally, case: &Case) -> Result<()> {
    let g = &case.grid;
    let geom = g.geometry();
    let ctx = case.label.as_str();
    let (k, beta) = (case.k, case.beta);

    let times = [0, case.t / 2, case.t, g.total_steps()];
    let fr = times
        .iter()
        .map(|&t| vacant_fraction(g, t))
        .collect::<Result<Vec<_>>>()?;
    tally.record("vacant fraction non-increasing in t", fr.windows(2).all(|w| w[0] >= w[1]), || {
        format!("{ctx}: {fr:?}")
    });

    if window_fits(geom.side(), k, beta) {
        let r = detect_g_with(
            g,
            case.t,
            &GParams {
                k_runs: k,
                beta,
                probe_stride: None,
            },
        )?;
        let ok = r.g == (r.u && r.v) && (!r.g || (r.giant.unique && r.giant.size > 0));
        tally.record("G = U and V, with a unique giant", ok, || ctx.to_string());
    }

    let mask = g.vacant_mask(case.t);
    let radius = 1 + case.t as usize % 2;
    let (lo, hi) = (erode(geom, &mask, radius), dilate(geom, &mask, radius));
    let ok = (0..mask.len()).all(|i| (!lo[i] || mask[i]) && (!mask[i] || hi[i]));
    tally.record("erosion within the set within dilation", ok, || ctx.to_string());

    let mut bytes = Vec::new();
    g.write_to(&mut bytes)?;
    let back = OccupancyGrid::read_from(bytes.as_slice())?;
    tally.record(
        "grid file round trip",
        back.first_visit() == g.first_visit() && back.total_steps() == g.total_steps(),
        || ctx.to_string(),
    );
    Ok(())
}

fn walk_invariants(tally: &mut Tally, seed: u64) -> Result<()> {
    let geom = TorusGeometry::new(3, 6)?;
    for rep in 0..4 {
        let cfg = WalkConfig::new(geom.clone(), 0.0, seed, rep);
        let g = run_walk(&cfg, &mut [])?;
        tally.record("u = 0 visits only the start", g.visited_count(0) == 1, || format!("replica {rep}"));
        let cfg = WalkConfig::new(geom.clone(), 1.0, seed, rep);
        let (a, b) = (run_walk(&cfg, &mut [])?, run_walk(&cfg, &mut [])?);
        tally.record("walks are reproducible", a.first_visit() == b.first_visit(), || {
            format!("replica {rep}")
        });
    }
    Ok(())
}

fn saw_invariants(tally: &mut Tally) -> Result<()> {
    tally.record("a(1) = 8", star_saw_count(1)? == 8, String::new);
    for n in 1..=8 {
        let a = star_saw_count(n)?;
        let bound = 8 * 7u64.pow(n as u32 - 1);
        tally.record("a(n) <= 8 * 7^(n-1)", a <= bound, || format!("n={n}: {a} > {bound}"));
    }
    Ok(())
}

/// Runs the whole suite. A supplied grid file is read first; a malformed
/// one aborts with a format error before any check runs.
pub fn run_validate(cfg: &ValidateConfig, det: &Detectors) -> Result<ValidateReport> {
    let extra = match &cfg.grid {
        Some(path) => Some(OccupancyGrid::read_from(std::io::BufReader::new(std::fs::File::open(path)?))?),
        None => None,
    };
    let mut tally = Tally::default();
    for i in 0..cfg.cases {
        let case = random_case(i, cfg.max_side, cfg.seed)?;
        oracle_checks(&mut tally, det, &case);
        exact_invariants(&mut tally, &case)?;
    }
    if let Some(grid) = extra {
        let t = grid.total_steps();
        let case = Case {
            grid,
            t,
            k: 0.5,
            beta: 0.5,
            label: "supplied grid".into(),
        };
        if case.grid.geometry().side() <= cfg.max_side.max(8) {
            oracle_checks(&mut tally, det, &case);
        }
        exact_invariants(&mut tally, &case)?;
    }
    walk_invariants(&mut tally, cfg.seed)?;
    saw_invariants(&mut tally)?;
    Ok(ValidateReport { checks: tally.checks })
}
