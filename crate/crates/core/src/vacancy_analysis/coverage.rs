use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{TorusGeometry, TorusPoint};
use crate::stats::Proportion;
use crate::walk_engine::{simulate, steps_for, Flow, WalkConfig};

#[derive(Clone, Debug, Serialize)]
pub struct CoverageEstimate {
    pub set_size: usize,
    pub proportion: Proportion,
}

/// Whether every point lies in one common coordinate plane.
pub fn is_planar(geometry: &TorusGeometry, points: &[TorusPoint]) -> bool {
    let d = geometry.dim();
    let Some(first) = points.first() else {
        return true;
    };
    (0..d).any(|a| {
        (a + 1..d).any(|b| {
            points.iter().all(|p| {
                (0..d).all(|j| j == a || j == b || p.coords()[j] == first.coords()[j])
            })
        })
    })
}

/// Monte Carlo estimate of `P[X_[0, uN^d] ⊇ A]` from uniformly started walks.
pub fn coverage_probability(
    geometry: &TorusGeometry,
    a: &[TorusPoint],
    u: f64,
    replicas: u64,
    seed: u64,
) -> Result<CoverageEstimate> {
    Ok(coverage_curve(geometry, &[a.to_vec()], u, replicas, seed)?.remove(0))
}

/// Coverage probabilities of several planar sets from the same replicas.
/// Each walk stops as soon as every point of every set has been visited.
pub fn coverage_curve(
    geometry: &TorusGeometry,
    sets: &[Vec<TorusPoint>],
    u: f64,
    replicas: u64,
    seed: u64,
) -> Result<Vec<CoverageEstimate>> {
    for a in sets {
        if a.is_empty() {
            return Err(Error::Parameter("empty target set".into()));
        }
        if !is_planar(geometry, a) {
            return Err(Error::NotPlanar);
        }
    }
    let steps = steps_for(geometry, u)?;
    let mut targets: Vec<usize> = sets.iter().flatten().map(|p| geometry.index(p)).collect();
    targets.sort_unstable();
    targets.dedup();
    let set_slots: Vec<Vec<usize>> = sets
        .iter()
        .map(|a| {
            a.iter()
                .map(|p| targets.binary_search(&geometry.index(p)).unwrap())
                .collect()
        })
        .collect();

    let covered: Vec<Vec<bool>> = (0..replicas)
        .into_par_iter()
        .map(|rep| {
            let cfg = WalkConfig::new(geometry.clone(), u, seed, rep);
            let mut hit = vec![false; targets.len()];
            let mut left = targets.len();
            simulate(&cfg, steps, |_, idx, _| {
                if let Ok(k) = targets.binary_search(&idx) {
                    if !hit[k] {
                        hit[k] = true;
                        left -= 1;
                    }
                }
                if left == 0 {
                    Flow::Stop
                } else {
                    Flow::Continue
                }
            })?;
            Ok(set_slots.iter().map(|s| s.iter().all(|&k| hit[k])).collect())
        })
        .collect::<Result<_>>()?;

    Ok(sets
        .iter()
        .enumerate()
        .map(|(i, a)| CoverageEstimate {
            set_size: a.len(),
            proportion: Proportion::new(covered.iter().filter(|c| c[i]).count() as u64, replicas),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planarity() {
        let g = TorusGeometry::new(4, 6).unwrap();
        let p = |c: &[i64]| g.point(c).unwrap();
        assert!(is_planar(&g, &[p(&[0, 0, 0, 0])]));
        assert!(is_planar(&g, &[p(&[0, 0, 0, 0]), p(&[1, 2, 0, 0])]));
        assert!(!is_planar(&g, &[p(&[0, 0, 0, 0]), p(&[1, 2, 3, 0])]));
        let err = coverage_probability(&g, &[p(&[0, 0, 0, 0]), p(&[1, 1, 1, 0])], 0.1, 2, 0);
        assert!(matches!(err, Err(Error::NotPlanar)));
    }

    #[test]
    fn nested_sets_are_ordered() {
        let g = TorusGeometry::new(3, 8).unwrap();
        let sets: Vec<Vec<TorusPoint>> = (1..=3)
            .map(|k| (0..k).map(|i| g.point(&[i, 0, 0]).unwrap()).collect())
            .collect();
        let est = coverage_curve(&g, &sets, 0.5, 400, 1).unwrap();
        for w in est.windows(2) {
            assert!(w[0].proportion.successes >= w[1].proportion.successes);
        }
    }
}
