//! The variance budget `(r/N)^d + u L^d / r` for the excursion-time
//! estimator Γ̃, and Monte Carlo checks of what it controls.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::TorusGeometry;
use crate::stats::{covariance, summarize, Summary};
use crate::vacancy_analysis::{gamma_tilde, LocalFunctionSpec};
use crate::walk_engine::{ProbeSet, WalkConfig};

/// `(r/N)^d + u L^d / r`.
pub fn budget_value(d: usize, u: f64, core: usize, side: usize, r: usize) -> f64 {
    (r as f64 / side as f64).powi(d as i32) + u * (core as f64).powi(d as i32) / r as f64
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VarianceBudget {
    pub d: usize,
    pub u: f64,
    #[serde(rename = "L")]
    pub core: usize,
    #[serde(rename = "N")]
    pub side: usize,
    /// Admissible range `10 L ..= floor(N / 10)`.
    pub r_range: (usize, usize),
    /// Minimizing radius; the smallest one on ties.
    pub r: usize,
    pub value: f64,
}

impl VarianceBudget {
    pub fn at(&self, r: usize) -> f64 {
        budget_value(self.d, self.u, self.core, self.side, r)
    }
}

/// Exact minimization over the integer range `10 L <= r <= N / 10`.
pub fn variance_budget(d: usize, u: f64, core: usize, side: usize) -> Result<VarianceBudget> {
    if !(u >= 0.0 && u.is_finite()) {
        return Err(Error::Parameter(format!("u = {u}")));
    }
    let (lo, hi) = (10 * core, side / 10);
    if core == 0 || lo > hi {
        return Err(Error::Parameter(format!(
            "empty radius range: 10 L = {lo} > N / 10 = {hi}"
        )));
    }
    let (r, value) = (lo..=hi)
        .map(|r| (r, budget_value(d, u, core, side, r)))
        .fold((lo, f64::INFINITY), |best, c| if c.1 < best.1 { c } else { best });
    Ok(VarianceBudget {
        d,
        u,
        core,
        side,
        r_range: (lo, hi),
        r,
        value,
    })
}

/// Excursion target for probes of radius `L`: `ceil(u L^(d-2))`, at least 1.
pub fn excursion_target(d: usize, u: f64, core: usize) -> usize {
    ((u * (core as f64).powi(d as i32 - 2)).ceil() as usize).max(1)
}

fn step_cap(geom: &TorusGeometry) -> u64 {
    // well past any realistic stopping time, and inside the 32-bit slots
    (64 * geom.cell_count() as u64).min(u32::MAX as u64 - 1)
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaVariance {
    pub budget: VarianceBudget,
    pub probes: usize,
    pub ell_star: usize,
    /// Γ̃ across replicas; `std²` is the empirical variance.
    pub gamma: Summary,
    pub variance: f64,
    pub ratio_to_budget: f64,
}

/// Γ̃ with `φ₁` on the regular probe grid at the budget-minimizing radius,
/// one walk per replica.
pub fn gamma_tilde_variance(
    d: usize,
    u: f64,
    core: usize,
    side: usize,
    replicas: u64,
    seed: u64,
) -> Result<GammaVariance> {
    let budget = variance_budget(d, u, core, side)?;
    let geom = TorusGeometry::new(d, side)?;
    let spec = LocalFunctionSpec::phi1(core);
    let ell = excursion_target(d, u, core);
    let r = budget.r;
    let probes = ProbeSet::regular(&geom, core, r, 2 * r + 3)?;
    let count = probes.len();
    let values = (0..replicas)
        .into_par_iter()
        .map(|i| {
            let cfg = WalkConfig::new(geom.clone(), u, seed, i);
            gamma_tilde(&cfg, probes.clone(), &spec, ell, step_cap(&geom)).map(|g| g.value)
        })
        .collect::<Result<Vec<_>>>()?;
    let gamma = summarize(&values);
    let variance = gamma.std * gamma.std;
    Ok(GammaVariance {
        ratio_to_budget: variance / budget.value,
        budget,
        probes: count,
        ell_star: ell,
        gamma,
        variance,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CovarianceCheck {
    pub d: usize,
    #[serde(rename = "N")]
    pub side: usize,
    #[serde(rename = "L")]
    pub core: usize,
    pub r: usize,
    pub u: f64,
    pub ell_star: usize,
    pub replicas: u64,
    pub centers: [Vec<usize>; 2],
    pub means: [f64; 2],
    pub covariance: f64,
    /// Standard error of the covariance estimate.
    pub std_error: f64,
}

impl CovarianceCheck {
    pub fn z_score(&self) -> f64 {
        if self.std_error > 0.0 {
            self.covariance / self.std_error
        } else if self.covariance == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Covariance of `h(x_i, D^{x_i}_ℓ*)` under `φ₁` for two probes half a
/// torus apart along the first axis.
pub fn covariance_check(
    d: usize,
    side: usize,
    core: usize,
    r: usize,
    u: f64,
    replicas: u64,
    seed: u64,
) -> Result<CovarianceCheck> {
    let geom = TorusGeometry::new(d, side)?;
    let x1 = vec![side / 4; d];
    let mut x2 = x1.clone();
    x2[0] += side / 2;
    let as_point = |x: &[usize]| geom.point(&x.iter().map(|&c| c as i64).collect::<Vec<_>>());
    let centers = [as_point(&x1)?, as_point(&x2)?];
    // rejects centers closer than 2r + 3
    let probes = ProbeSet::from_centers(&geom, &centers, core, r)?;
    let spec = LocalFunctionSpec::phi1(core);
    let ell = excursion_target(d, u, core);
    let pairs = (0..replicas)
        .into_par_iter()
        .map(|i| {
            let cfg = WalkConfig::new(geom.clone(), u, seed, i);
            let g = gamma_tilde(&cfg, probes.clone(), &spec, ell, step_cap(&geom))?;
            Ok((g.per_probe[0], g.per_probe[1]))
        })
        .collect::<Result<Vec<_>>>()?;
    let a: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let b: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov = covariance(&a, &b);
    let products: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).collect();
    let se = summarize(&products).std / n.sqrt();
    Ok(CovarianceCheck {
        d,
        side,
        core,
        r,
        u,
        ell_star: ell,
        replicas,
        centers: [x1, x2],
        means: [ma, mb],
        covariance: cov,
        std_error: se,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizer_is_exact() {
        let b = variance_budget(3, 1.0, 2, 1000).unwrap();
        let best = (20..=100).map(|r| b.at(r)).fold(f64::INFINITY, f64::min);
        assert_eq!(b.value, best);
        assert!(b.at(20) >= b.value && b.at(100) >= b.value);
        assert!(variance_budget(3, 1.0, 7, 200).is_err());
    }

    #[test]
    fn budget_grows_with_u() {
        let vals: Vec<f64> = [0.5, 1.0, 2.0, 4.0]
            .iter()
            .map(|&u| variance_budget(3, u, 2, 600).unwrap().value)
            .collect();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn small_covariance_run() {
        let c = covariance_check(3, 48, 1, 10, 1.0, 8, 1).unwrap();
        assert_eq!(c.ell_star, 1);
        assert!(c.std_error.is_finite());
    }
}
