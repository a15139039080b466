//! The study commands. Each returns a typed result; [`Report`] turns it
//! into a table, per-replica records and a JSON summary.
//!
//! Replicas are indexed and scheduled by index, and every replica draws
//! from its own stream, so results do not depend on the worker count. Where
//! several `u` values are requested, one walk per replica runs to the
//! largest and is read at every intermediate time.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::config::*;
use super::output::{Cell, Table};
use crate::coupling_lab::{tv_scaling_study, ScalingStudy, StudyParams};
use crate::error::{Error, Result};
use crate::lattice::TorusGeometry;
use crate::potential_theory::{
    constants_report, escape_bias_bound, q_n_finite, q_nu, q_nu_montecarlo, ConstantsReport, FiniteReturn,
    ReturnProbability,
};
use crate::stats::{linear_fit, summarize, LinearFit, Summary, Z95};
use crate::vacancy_analysis::{
    axis_run_threshold, detect_g_with, detect_v, largest_vacant_ball, longest_axis_run, vacant_fraction, GParams,
};
use crate::walk_engine::{count_box_excursions, run_walk, steps_for, OccupancyGrid, WalkConfig};

/// Named scalar results of one replica.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReplicaMetrics {
    pub replica_index: u64,
    pub metrics: BTreeMap<String, f64>,
    pub wall_time_s: f64,
}

pub struct Report {
    pub table: Table,
    pub replicas: Vec<ReplicaMetrics>,
    pub summary: serde_json::Value,
}

/// Runs `f` for every replica index in parallel, keeping index order.
fn per_replica<T, F>(count: u64, f: F) -> Result<Vec<(T, f64)>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    (0..count)
        .into_par_iter()
        .map(|i| {
            let t0 = Instant::now();
            f(i).map(|v| (v, t0.elapsed().as_secs_f64()))
        })
        .collect()
}

fn walk_to(geom: &TorusGeometry, u_max: f64, seed: u64, replica: u64) -> Result<OccupancyGrid> {
    run_walk(&WalkConfig::new(geom.clone(), u_max, seed, replica), &mut [])
}

fn u_max(us: &[f64]) -> f64 {
    us.iter().cloned().fold(0.0, f64::max)
}

fn metrics(pairs: impl IntoIterator<Item = (String, f64)>) -> BTreeMap<String, f64> {
    pairs.into_iter().collect()
}

fn check_v_window(n: usize, k: f64, beta: f64) -> Result<()> {
    crate::vacancy_analysis::v_geometry(n, k, beta)
        .map(|_| ())
        .map_err(|e| Error::Config(format!("N = {n}, K = {k}, beta = {beta}: {e}")))
}

// ---------------------------------------------------------------- survival

#[derive(Clone, Debug, Serialize)]
pub struct SurvivalRow {
    pub u: f64,
    pub time: u64,
    pub fraction: Summary,
    pub relative_std: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SurvivalStudy {
    pub rows: Vec<SurvivalRow>,
    /// `ln(mean fraction)` against `u`.
    pub fit: LinearFit,
    #[serde(skip)]
    pub replicas: Vec<ReplicaMetrics>,
}

pub fn survival(c: &SurvivalConfig) -> Result<SurvivalStudy> {
    let geom = TorusGeometry::new(c.d, c.side)?;
    let times = c.u.iter().map(|&u| steps_for(&geom, u)).collect::<Result<Vec<_>>>()?;
    let runs = per_replica(c.replicas, |i| {
        let grid = walk_to(&geom, u_max(&c.u), c.seed, i)?;
        times.iter().map(|&t| vacant_fraction(&grid, t)).collect::<Result<Vec<_>>>()
    })?;
    let rows: Vec<SurvivalRow> = c
        .u
        .iter()
        .enumerate()
        .map(|(k, &u)| {
            let xs: Vec<f64> = runs.iter().map(|(f, _)| f[k]).collect();
            let s = summarize(&xs);
            SurvivalRow {
                u,
                time: times[k],
                fraction: s,
                relative_std: s.std / s.mean,
            }
        })
        .collect();
    let us: Vec<f64> = rows.iter().map(|r| r.u).collect();
    let logs: Vec<f64> = rows.iter().map(|r| r.fraction.mean.ln()).collect();
    let replicas = runs
        .iter()
        .enumerate()
        .map(|(i, (f, w))| ReplicaMetrics {
            replica_index: i as u64,
            metrics: metrics(c.u.iter().zip(f).map(|(u, v)| (format!("fraction@u={u}"), *v))),
            wall_time_s: *w,
        })
        .collect();
    Ok(SurvivalStudy {
        rows,
        fit: linear_fit(&us, &logs),
        replicas,
    })
}

impl SurvivalStudy {
    pub fn report(&self) -> Report {
        let mut t = Table::new(&["u", "t", "mean", "std", "rel_std", "ci_lo", "ci_hi", "replicas"]);
        for r in &self.rows {
            t.push(vec![
                r.u.into(),
                r.time.into(),
                r.fraction.mean.into(),
                r.fraction.std.into(),
                r.relative_std.into(),
                r.fraction.ci.lo.into(),
                r.fraction.ci.hi.into(),
                r.fraction.n.into(),
            ]);
        }
        Report {
            table: t,
            replicas: self.replicas.clone(),
            summary: json!({ "log_fraction_fit": self.fit }),
        }
    }
}

// ------------------------------------------------------------------ scan-u

#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub u: f64,
    pub g_frequency: f64,
    pub giant_fraction_mean: f64,
    pub c_fraction_mean: f64,
    pub largest_fraction: Summary,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanStudy {
    pub rows: Vec<ScanRow>,
    /// Where the mean largest-component fraction first falls below the
    /// level, by linear interpolation in `u`.
    pub crossing: Option<f64>,
    pub level: f64,
    #[serde(skip)]
    pub replicas: Vec<ReplicaMetrics>,
}

pub fn scan_u(c: &ScanConfig) -> Result<ScanStudy> {
    check_v_window(c.side, c.k_runs, c.beta)?;
    let geom = TorusGeometry::new(c.d, c.side)?;
    let times = c.u.iter().map(|&u| steps_for(&geom, u)).collect::<Result<Vec<_>>>()?;
    let params = GParams {
        k_runs: c.k_runs,
        beta: c.beta,
        probe_stride: None,
    };
    let runs = per_replica(c.replicas, |i| {
        let grid = walk_to(&geom, u_max(&c.u), c.seed, i)?;
        times
            .iter()
            .map(|&t| {
                let r = detect_g_with(&grid, t, &params)?;
                Ok([r.g as u8 as f64, r.giant.fraction, r.c_fraction, r.largest_fraction])
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let rows: Vec<ScanRow> = c
        .u
        .iter()
        .enumerate()
        .map(|(k, &u)| {
            let col = |j: usize| -> Vec<f64> { runs.iter().map(|(v, _)| v[k][j]).collect() };
            let mean = |v: Vec<f64>| v.iter().sum::<f64>() / v.len() as f64;
            ScanRow {
                u,
                g_frequency: mean(col(0)),
                giant_fraction_mean: mean(col(1)),
                c_fraction_mean: mean(col(2)),
                largest_fraction: summarize(&col(3)),
            }
        })
        .collect();
    let crossing = crossing_point(
        &rows.iter().map(|r| (r.u, r.largest_fraction.mean)).collect::<Vec<_>>(),
        c.level,
    );
    let names = ["g", "giant_fraction", "c_fraction", "largest_fraction"];
    let replicas = runs
        .iter()
        .enumerate()
        .map(|(i, (v, w))| ReplicaMetrics {
            replica_index: i as u64,
            metrics: metrics(c.u.iter().zip(v).flat_map(|(u, row)| {
                names.iter().zip(row).map(move |(n, x)| (format!("{n}@u={u}"), *x))
            })),
            wall_time_s: *w,
        })
        .collect();
    Ok(ScanStudy {
        rows,
        crossing,
        level: c.level,
        replicas,
    })
}

/// First downward crossing of `level` along `(u, value)` points sorted by `u`.
pub fn crossing_point(points: &[(f64, f64)], level: f64) -> Option<f64> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let k = pts.iter().position(|&(_, v)| v < level)?;
    if k == 0 {
        return Some(pts[0].0);
    }
    let ((u0, v0), (u1, v1)) = (pts[k - 1], pts[k]);
    Some(u0 + (v0 - level) / (v0 - v1) * (u1 - u0))
}

impl ScanStudy {
    pub fn report(&self) -> Report {
        let mut t = Table::new(&[
            "u",
            "g_freq",
            "giant_fraction_mean",
            "c_fraction_mean",
            "largest_fraction_mean",
            "largest_fraction_std",
        ]);
        for r in &self.rows {
            t.push(vec![
                r.u.into(),
                r.g_frequency.into(),
                r.giant_fraction_mean.into(),
                r.c_fraction_mean.into(),
                r.largest_fraction.mean.into(),
                r.largest_fraction.std.into(),
            ]);
        }
        Report {
            table: t,
            replicas: self.replicas.clone(),
            summary: json!({ "level": self.level, "crossing_u": self.crossing }),
        }
    }
}

// ---------------------------------------------------------------- segments

#[derive(Clone, Debug, Serialize)]
pub struct SegmentRow {
    #[serde(rename = "N")]
    pub side: usize,
    pub u: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub v_frequency: f64,
    /// Cells in a run counted by `long_run_frequency`.
    pub long_run_cells: usize,
    pub long_run_frequency: f64,
    pub max_run: Summary,
}

#[derive(Clone, Debug, Serialize)]
pub struct SegmentStudy {
    pub rows: Vec<SegmentRow>,
    #[serde(skip)]
    pub replicas: Vec<ReplicaMetrics>,
}

pub fn segments(c: &SegmentsConfig) -> Result<SegmentStudy> {
    for &n in &c.sides {
        for &k in &c.k {
            check_v_window(n, k, c.beta)?;
        }
    }
    let mut rows = Vec::new();
    let mut replicas = Vec::new();
    for (ni, &n) in c.sides.iter().enumerate() {
        let geom = TorusGeometry::new(c.d, n)?;
        let times = c.u.iter().map(|&u| steps_for(&geom, u)).collect::<Result<Vec<_>>>()?;
        let long = axis_run_threshold(c.run_k, n) + 1;
        // replica streams are disjoint across N
        let offset = ni as u64 * c.replicas;
        let runs = per_replica(c.replicas, |i| {
            let grid = walk_to(&geom, u_max(&c.u), c.seed, offset + i)?;
            times
                .iter()
                .map(|&t| {
                    let longest = longest_axis_run(&grid, t)? as f64;
                    let v = c
                        .k
                        .iter()
                        .map(|&k| detect_v(&grid, t, k, c.beta).map(|r| r.holds as u8 as f64))
                        .collect::<Result<Vec<_>>>()?;
                    Ok((longest, v))
                })
                .collect::<Result<Vec<_>>>()
        })?;
        for (ui, &u) in c.u.iter().enumerate() {
            let longest: Vec<f64> = runs.iter().map(|(v, _)| v[ui].0).collect();
            let long_freq = longest.iter().filter(|&&l| l >= long as f64).count() as f64 / longest.len() as f64;
            for (ki, &k) in c.k.iter().enumerate() {
                let v = runs.iter().map(|(v, _)| v[ui].1[ki]).sum::<f64>() / runs.len() as f64;
                rows.push(SegmentRow {
                    side: n,
                    u,
                    k,
                    v_frequency: v,
                    long_run_cells: long,
                    long_run_frequency: long_freq,
                    max_run: summarize(&longest),
                });
            }
        }
        for (i, (v, w)) in runs.iter().enumerate() {
            let mut m = BTreeMap::new();
            for (ui, u) in c.u.iter().enumerate() {
                m.insert(format!("N={n};longest@u={u}"), v[ui].0);
                for (ki, k) in c.k.iter().enumerate() {
                    m.insert(format!("N={n};V@u={u};K={k}"), v[ui].1[ki]);
                }
            }
            replicas.push(ReplicaMetrics {
                replica_index: offset + i as u64,
                metrics: m,
                wall_time_s: *w,
            });
        }
    }
    Ok(SegmentStudy { rows, replicas })
}

impl SegmentStudy {
    pub fn report(&self) -> Report {
        let mut t = Table::new(&["N", "u", "K", "v_freq", "long_run_cells", "long_run_freq", "max_run_mean"]);
        for r in &self.rows {
            t.push(vec![
                r.side.into(),
                r.u.into(),
                r.k.into(),
                r.v_frequency.into(),
                r.long_run_cells.into(),
                r.long_run_frequency.into(),
                r.max_run.mean.into(),
            ]);
        }
        Report {
            table: t,
            replicas: self.replicas.clone(),
            summary: serde_json::Value::Null,
        }
    }
}

// ------------------------------------------------------------ largest ball

#[derive(Clone, Debug, Serialize)]
pub struct BallRow {
    #[serde(rename = "N")]
    pub side: usize,
    pub u: f64,
    pub radius: Summary,
}

#[derive(Clone, Debug, Serialize)]
pub struct BallStudy {
    pub rows: Vec<BallRow>,
    /// `ln(mean L̂)` against `ln ln N`; the slope is the fitted exponent.
    pub fit: Option<LinearFit>,
    #[serde(skip)]
    pub replicas: Vec<ReplicaMetrics>,
}

pub fn largest_ball(c: &LargestBallConfig) -> Result<BallStudy> {
    let mut rows = Vec::new();
    let mut replicas = Vec::new();
    for (ni, &n) in c.sides.iter().enumerate() {
        let geom = TorusGeometry::new(c.d, n)?;
        let t = steps_for(&geom, c.u)?;
        let offset = ni as u64 * c.replicas;
        let runs = per_replica(c.replicas, |i| {
            let grid = walk_to(&geom, c.u, c.seed, offset + i)?;
            Ok(largest_vacant_ball(&grid, t)? as f64)
        })?;
        let xs: Vec<f64> = runs.iter().map(|(v, _)| *v).collect();
        rows.push(BallRow {
            side: n,
            u: c.u,
            radius: summarize(&xs),
        });
        for (i, (v, w)) in runs.iter().enumerate() {
            replicas.push(ReplicaMetrics {
                replica_index: offset + i as u64,
                metrics: metrics([(format!("N={n};L_hat"), *v)]),
                wall_time_s: *w,
            });
        }
    }
    let usable: Vec<&BallRow> = rows.iter().filter(|r| r.radius.mean > 0.0).collect();
    let fit = (usable.len() >= 2).then(|| {
        let x: Vec<f64> = usable.iter().map(|r| (r.side as f64).ln().ln()).collect();
        let y: Vec<f64> = usable.iter().map(|r| r.radius.mean.ln()).collect();
        linear_fit(&x, &y)
    });
    Ok(BallStudy { rows, fit, replicas })
}

impl BallStudy {
    pub fn report(&self) -> Report {
        let mut t = Table::new(&["N", "u", "mean", "std", "ci_lo", "ci_hi", "replicas"]);
        for r in &self.rows {
            t.push(vec![
                r.side.into(),
                r.u.into(),
                r.radius.mean.into(),
                r.radius.std.into(),
                r.radius.ci.lo.into(),
                r.radius.ci.hi.into(),
                r.radius.n.into(),
            ]);
        }
        Report {
            table: t,
            replicas: self.replicas.clone(),
            summary: json!({ "exponent_fit": self.fit }),
        }
    }
}

// -------------------------------------------------------------- excursions

#[derive(Clone, Debug, Serialize)]
pub struct ExcursionRow {
    #[serde(rename = "L")]
    pub core: usize,
    pub r: usize,
    pub u: f64,
    /// Returns to `B(x, N/8)` separated by departures from `B(x, N/4)`.
    pub macroscopic: Summary,
    pub probe: Summary,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExcursionStudy {
    pub rows: Vec<ExcursionRow>,
    /// Mean macroscopic count against `u`, over the per-`u` means.
    pub macro_fit: LinearFit,
    /// The same fit over individual replicas, whose intercept standard
    /// error reflects the sampling noise.
    pub macro_replica_fit: LinearFit,
    /// Per `u`: slope of `ln(mean probe count)` against `ln L`.
    pub probe_exponents: Vec<(f64, LinearFit)>,
    #[serde(skip)]
    pub replicas: Vec<ReplicaMetrics>,
}

pub fn excursions(c: &ExcursionsConfig) -> Result<ExcursionStudy> {
    let geom = TorusGeometry::new(c.d, c.side)?;
    let x = geom.point(&vec![(c.side / 2) as i64; c.d])?;
    let mut rows = Vec::new();
    let mut replicas = Vec::new();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (li, &l) in c.cores.iter().enumerate() {
        let r = l * c.halo_factor;
        let offset = li as u64 * c.replicas;
        let runs = per_replica(c.replicas, |i| {
            let cfg = WalkConfig::new(geom.clone(), u_max(&c.u), c.seed, offset + i);
            count_box_excursions(&cfg, &x, l, r, &c.u)
        })?;
        for (ui, &u) in c.u.iter().enumerate() {
            let count = |f: &dyn Fn(&crate::walk_engine::CheckpointCounts) -> f64| -> Vec<f64> {
                runs.iter().map(|(b, _)| f(&b.checkpoints[ui])).collect()
            };
            let mac = count(&|p| (p.macroscopic.completed + p.macroscopic.open) as f64);
            let probe = count(&|p| (p.probe.completed + p.probe.open) as f64);
            xs.extend(std::iter::repeat_n(u, mac.len()));
            ys.extend(mac.iter().cloned());
            rows.push(ExcursionRow {
                core: l,
                r,
                u,
                macroscopic: summarize(&mac),
                probe: summarize(&probe),
            });
        }
        for (i, (b, w)) in runs.iter().enumerate() {
            let mut m = BTreeMap::new();
            for p in &b.checkpoints {
                m.insert(format!("L={l};macro@u={}", p.u), (p.macroscopic.completed + p.macroscopic.open) as f64);
                m.insert(format!("L={l};probe@u={}", p.u), (p.probe.completed + p.probe.open) as f64);
            }
            replicas.push(ReplicaMetrics {
                replica_index: offset + i as u64,
                metrics: m,
                wall_time_s: *w,
            });
        }
    }
    let by_u: Vec<(f64, f64)> = c
        .u
        .iter()
        .map(|&u| {
            let sel: Vec<f64> = rows.iter().filter(|r| r.u == u).map(|r| r.macroscopic.mean).collect();
            (u, sel.iter().sum::<f64>() / sel.len() as f64)
        })
        .collect();
    let macro_fit = linear_fit(
        &by_u.iter().map(|p| p.0).collect::<Vec<_>>(),
        &by_u.iter().map(|p| p.1).collect::<Vec<_>>(),
    );
    let probe_exponents = c
        .u
        .iter()
        .map(|&u| {
            let sel: Vec<&ExcursionRow> = rows.iter().filter(|r| r.u == u && r.probe.mean > 0.0).collect();
            let lx: Vec<f64> = sel.iter().map(|r| (r.core as f64).ln()).collect();
            let ly: Vec<f64> = sel.iter().map(|r| r.probe.mean.ln()).collect();
            (u, linear_fit(&lx, &ly))
        })
        .collect();
    Ok(ExcursionStudy {
        rows,
        macro_fit,
        macro_replica_fit: linear_fit(&xs, &ys),
        probe_exponents,
        replicas,
    })
}

impl ExcursionStudy {
    pub fn report(&self) -> Report {
        let mut t = Table::new(&[
            "L",
            "r",
            "u",
            "macro_mean",
            "macro_ci_lo",
            "macro_ci_hi",
            "probe_mean",
            "probe_ci_lo",
            "probe_ci_hi",
        ]);
        for r in &self.rows {
            t.push(vec![
                r.core.into(),
                r.r.into(),
                r.u.into(),
                r.macroscopic.mean.into(),
                r.macroscopic.ci.lo.into(),
                r.macroscopic.ci.hi.into(),
                r.probe.mean.into(),
                r.probe.ci.lo.into(),
                r.probe.ci.hi.into(),
            ]);
        }
        Report {
            table: t,
            replicas: self.replicas.clone(),
            summary: json!({
                "macro_fit": self.macro_fit,
                "macro_replica_fit": self.macro_replica_fit,
                "probe_exponents": self.probe_exponents,
            }),
        }
    }
}

// ---------------------------------------------------------------- coupling

pub fn coupling(c: &CouplingConfig) -> Result<ScalingStudy> {
    tv_scaling_study(&StudyParams {
        d: c.d,
        core: c.core,
        r_list: c.r.clone(),
        n: c.n,
        n_q: c.n_q,
        profile_samples: c.profile_samples,
        q_escape_radius: c.q_escape_radius,
        axis: c.axis,
        bootstrap: c.bootstrap,
        seed: c.seed,
    })
}

pub fn coupling_report(s: &ScalingStudy) -> Report {
    let mut t = Table::new(&["L", "r", "N", "n", "tv_raw", "tv_corrected", "ci_lo", "ci_hi", "q_bias_bound"]);
    for r in &s.rows {
        t.push(vec![
            r.core.into(),
            r.r.into(),
            r.side.into(),
            r.n.into(),
            r.tv.raw.into(),
            r.tv.bias_corrected.into(),
            r.tv.ci.lo.into(),
            r.tv.ci.hi.into(),
            r.q_bias_bound.into(),
        ]);
    }
    Report {
        table: t,
        replicas: Vec::new(),
        summary: json!({
            "capacity": s.capacity,
            "q_escape_radius": s.q_escape_radius,
            "axis": s.params.axis,
            "tv_convention": "sum of absolute differences, range [0, 2]",
        }),
    }
}

// --------------------------------------------------------------- constants

pub fn constants(c: &ConstantsConfig) -> Result<ConstantsReport> {
    constants_report(c.d.iter().copied(), c.tolerance)
}

pub fn constants_table(r: &ConstantsReport) -> Report {
    let mut t = Table::new(&["d", "mu", "mu_lo", "mu_hi", "lambda0", "c0"]);
    for row in &r.rows {
        t.push(vec![
            row.d.into(),
            row.mu.into(),
            row.mu_interval.lo.into(),
            row.mu_interval.hi.into(),
            row.lambda0.into(),
            row.c0.into(),
        ]);
    }
    Report {
        table: t,
        replicas: Vec::new(),
        summary: json!({ "d0": r.d0, "d0_interval": r.d0_interval, "tolerance": r.tolerance }),
    }
}

// --------------------------------------------------------------------- qnu

/// Smallest power of two `R <= 1024` with `escape_bias_bound(ν, 1, 0, R)`
/// below `1e-4`.
pub fn auto_escape_radius(nu: u32) -> usize {
    let mut r = 16;
    while r < 1024 && escape_bias_bound(nu, 1.0, 0, r) > 1e-4 {
        r *= 2;
    }
    r
}

#[derive(Clone, Debug, Serialize)]
pub struct QnuStudy {
    pub analytic: Vec<ReturnProbability>,
    pub montecarlo: Vec<ReturnProbability>,
    pub finite: Vec<FiniteReturn>,
    /// The analytic value for each Monte Carlo `ν`.
    pub reference: Vec<ReturnProbability>,
}

pub fn qnu(c: &QnuConfig) -> Result<QnuStudy> {
    let analytic = c.nu.iter().map(|&v| q_nu(v, c.tolerance)).collect::<Result<Vec<_>>>()?;
    let reference = c
        .montecarlo_nu
        .iter()
        .map(|&v| q_nu(v, c.tolerance))
        .collect::<Result<Vec<_>>>()?;
    let montecarlo = c
        .montecarlo_nu
        .iter()
        .map(|&v| {
            let r = c.escape_radius.unwrap_or_else(|| auto_escape_radius(v));
            q_nu_montecarlo(v, r, c.montecarlo_samples, c.seed.wrapping_add(v as u64))
        })
        .collect::<Result<Vec<_>>>()?;
    let finite = match &c.finite {
        Some(f) => f
            .sides
            .iter()
            .map(|&n| q_n_finite(f.d, f.m, n, f.samples, c.seed.wrapping_add(1000 + n as u64)))
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    Ok(QnuStudy {
        analytic,
        montecarlo,
        finite,
        reference,
    })
}

fn method_name(p: &ReturnProbability) -> String {
    serde_json::to_value(p.method)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

impl QnuStudy {
    pub fn report(&self) -> Report {
        let mut t = Table::new(&["nu", "N", "value", "error", "method", "ci_lo", "ci_hi", "bias_bound", "exact"]);
        for p in self.analytic.iter().chain(&self.montecarlo) {
            t.push(vec![
                p.nu.into(),
                Cell::Empty,
                p.value.into(),
                p.error.into(),
                method_name(p).into(),
                p.ci.map(|c| c.lo).into(),
                p.ci.map(|c| c.hi).into(),
                p.bias_bound.into(),
                Cell::Empty,
            ]);
        }
        for f in &self.finite {
            let half = Z95 * f.estimate.std_error();
            t.push(vec![
                (f.d - f.m).into(),
                f.n.into(),
                f.estimate.estimate.into(),
                half.into(),
                "finite-torus".into(),
                f.estimate.ci.lo.into(),
                f.estimate.ci.hi.into(),
                Cell::Empty,
                f.exact.into(),
            ]);
        }
        Report {
            table: t,
            replicas: Vec::new(),
            summary: serde_json::Value::Null,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_interpolates() {
        let pts = [(1.0, 0.5), (2.0, 0.1), (3.0, 0.01)];
        let c = crossing_point(&pts, 0.05).unwrap();
        assert!((c - (2.0 + 0.05 / 0.09)).abs() < 1e-12);
        assert_eq!(crossing_point(&pts, 0.001), None);
        assert_eq!(crossing_point(&pts, 0.9), Some(1.0));
    }

    #[test]
    fn auto_radius_shrinks_with_dimension() {
        assert_eq!(auto_escape_radius(3), 1024);
        assert!(auto_escape_radius(7) <= auto_escape_radius(4));
        assert!(escape_bias_bound(5, 1.0, 0, auto_escape_radius(5)) <= 1e-4);
    }

    #[test]
    fn small_survival_study() {
        let c = SurvivalConfig {
            side: 8,
            replicas: 4,
            ..Default::default()
        };
        let s = survival(&c).unwrap();
        assert_eq!(s.rows.len(), 4);
        assert!(s.rows.windows(2).all(|w| w[0].fraction.mean >= w[1].fraction.mean));
        let rep = s.report();
        assert_eq!(rep.table.rows.len(), 4);
        assert_eq!(rep.replicas.len(), 4);
    }
}
