//! Spatial averages of local functions of the visited pattern.
//!
//! For a function `φ` of subsets of `C(0) = B(0, L)`, the local value at `x`
//! and time `t` is `h(x, t) = φ((X_[0,t] ∩ C(x)) - x)`. Γ averages `h(·, t)`
//! over the whole torus; Γ̃ evaluates each probe at its own random time,
//! the `ℓ*`-th departure of the walk from its halo.

use serde::{Deserialize, Serialize};

use super::events::connects_to_sphere;
use crate::error::{Error, Result};
use crate::walk_engine::{simulate, Flow, OccupancyGrid, ProbeSet, StepObserver, WalkConfig, NEVER};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalSelector {
    /// `1{0 ∉ A}`.
    Phi0,
    /// `1{0 is joined to S(0, L) in some coordinate plane avoiding A}`.
    Phi1,
    /// `φ(A) = table[min(|A|, len - 1)]`; must be non-increasing in `[0, 1]`.
    CountTable(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalFunctionSpec {
    pub selector: LocalSelector,
    /// Radius `L` of the box `C(0)`.
    pub radius: usize,
}

impl LocalFunctionSpec {
    pub fn phi0(radius: usize) -> Self {
        Self {
            selector: LocalSelector::Phi0,
            radius,
        }
    }

    pub fn phi1(radius: usize) -> Self {
        Self {
            selector: LocalSelector::Phi1,
            radius,
        }
    }

    pub fn count_table(radius: usize, table: Vec<f64>) -> Result<Self> {
        let spec = Self {
            selector: LocalSelector::CountTable(table),
            radius,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks that the function is a monotone decreasing set function.
    /// Count tables are checked entry by entry, which covers every pair
    /// `A ⊆ A'` since `φ` depends on `|A|` only.
    pub fn validate(&self) -> Result<()> {
        if let LocalSelector::CountTable(table) = &self.selector {
            if table.is_empty() {
                return Err(Error::NotMonotone("empty table".into()));
            }
            if let Some(v) = table.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::NotMonotone(format!("value {v} outside [0, 1]")));
            }
            if let Some(k) = table.windows(2).position(|w| w[1] > w[0]) {
                return Err(Error::NotMonotone(format!(
                    "table increases from |A| = {k} to |A| = {}",
                    k + 1
                )));
            }
        }
        Ok(())
    }

    /// `h(x, t)` for the cell with coordinates `x`.
    pub fn evaluate(&self, grid: &OccupancyGrid, x: &[usize], t: u64) -> f64 {
        let geom = grid.geometry();
        match &self.selector {
            LocalSelector::Phi0 => grid.is_vacant(geom.index_of(x), t) as u8 as f64,
            LocalSelector::Phi1 => connects_to_sphere(grid, t, x, self.radius) as u8 as f64,
            LocalSelector::CountTable(table) => {
                let n = geom.side() as i64;
                let r = self.radius as i64;
                let d = geom.dim();
                let mut off = vec![-r; d];
                let mut coords = vec![0usize; d];
                let mut visited = 0usize;
                loop {
                    for j in 0..d {
                        coords[j] = (x[j] as i64 + off[j]).rem_euclid(n) as usize;
                    }
                    if grid.is_visited(geom.index_of(&coords), t) {
                        visited += 1;
                    }
                    let mut j = d;
                    loop {
                        if j == 0 {
                            return table[visited.min(table.len() - 1)];
                        }
                        j -= 1;
                        if off[j] < r {
                            off[j] += 1;
                            break;
                        }
                        off[j] = -r;
                    }
                }
            }
        }
    }
}

fn check_radius(spec: &LocalFunctionSpec, side: usize) -> Result<()> {
    if 2 * spec.radius + 1 > side {
        return Err(Error::BallTooLarge {
            radius: spec.radius,
            side,
        });
    }
    spec.validate()
}

/// Γ at time `t`: the average of `h(x, t)` over every cell.
pub fn local_function_average(grid: &OccupancyGrid, spec: &LocalFunctionSpec, t: u64) -> Result<f64> {
    grid.check_time(t)?;
    let geom = grid.geometry();
    check_radius(spec, geom.side())?;
    let mut coords = vec![0usize; geom.dim()];
    let mut sum = 0.0;
    for idx in 0..geom.cell_count() {
        geom.coords_into(idx, &mut coords);
        sum += spec.evaluate(grid, &coords, t);
    }
    Ok(sum / geom.cell_count() as f64)
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaTilde {
    /// Average of `h(x, D^x_ℓ*)` over the probes.
    pub value: f64,
    pub target: usize,
    /// `h(x, D^x_ℓ*)` per probe, in probe order.
    pub per_probe: Vec<f64>,
    /// `D^x_ℓ*` per probe.
    pub times: Vec<u64>,
    /// Time at which the last probe completed its `ℓ*`-th excursion.
    pub stop_time: u64,
}

/// Runs the walk until every probe has completed `ell_star` excursions
/// (returns to its core followed by departures from its halo), then
/// evaluates each probe at its own departure time. The probe cores must
/// match `spec.radius`. Fails if `max_steps` is reached first.
pub fn gamma_tilde(
    config: &WalkConfig,
    mut probes: ProbeSet,
    spec: &LocalFunctionSpec,
    ell_star: usize,
    max_steps: u64,
) -> Result<GammaTilde> {
    let geom = &config.geometry;
    check_radius(spec, geom.side())?;
    if probes.core_radius() != spec.radius {
        return Err(Error::Parameter(format!(
            "probe core radius {} differs from the local function radius {}",
            probes.core_radius(),
            spec.radius
        )));
    }
    if max_steps >= NEVER as u64 {
        return Err(Error::TimeOverflow(max_steps));
    }
    probes.set_target(ell_star);
    let mut first_visit = vec![NEVER; geom.cell_count()];
    let stop_time = simulate(config, max_steps, |t, idx, coords| {
        if first_visit[idx] == NEVER {
            first_visit[idx] = t as u32;
        }
        probes.observe(t, idx, coords);
        if probes.all_reached() {
            Flow::Stop
        } else {
            Flow::Continue
        }
    })?;
    if !probes.all_reached() {
        return Err(Error::Parameter(format!(
            "probes did not complete {ell_star} excursions within {max_steps} steps"
        )));
    }
    let grid = OccupancyGrid::synthetic(geom.clone(), first_visit, stop_time)?;
    let mut per_probe = Vec::with_capacity(probes.len());
    let mut times = Vec::with_capacity(probes.len());
    for (i, x) in probes.centers().iter().enumerate() {
        let time = probes.departure(i, ell_star).expect("target reached");
        times.push(time);
        per_probe.push(spec.evaluate(&grid, x, time));
    }
    let value = per_probe.iter().sum::<f64>() / per_probe.len().max(1) as f64;
    Ok(GammaTilde {
        value,
        target: ell_star,
        per_probe,
        times,
        stop_time,
    })
}
