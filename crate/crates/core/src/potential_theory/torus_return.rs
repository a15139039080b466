//! `q_N`: chance that the walk on `(Z/NZ)^{d-m}` started at a unit vector
//! hits the origin within `N²` steps.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};
use crate::stats::Proportion;

/// Largest state count for which the exact value is also computed.
pub const EXACT_STATE_LIMIT: usize = 10_000;

const CHUNK: u64 = 10_000;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiniteReturn {
    pub d: u32,
    pub m: u32,
    pub n: usize,
    pub steps: u64,
    pub estimate: Proportion,
    pub exact: Option<f64>,
}

pub fn q_n_finite(d: u32, m: u32, n: usize, n_samples: u64, seed: u64) -> Result<FiniteReturn> {
    if m < 1 || m + 3 > d {
        return Err(Error::Parameter(format!("m = {m} outside 1..=d-3 for d = {d}")));
    }
    if n < 2 {
        return Err(Error::Geometry(format!("side {n} < 2")));
    }
    let nu = (d - m) as usize;
    let steps = (n * n) as u64;
    let exact = n
        .checked_pow(nu as u32)
        .filter(|&s| s <= EXACT_STATE_LIMIT)
        .map(|_| exact_hit_probability(nu, n, steps));

    let chunks = n_samples.div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, Stream::FiniteTorus, c);
            let count = CHUNK.min(n_samples - c * CHUNK);
            let mut hits = 0;
            let mut z = vec![0usize; nu];
            for _ in 0..count {
                z.iter_mut().for_each(|x| *x = 0);
                z[0] = 1;
                let mut nonzero = 1usize;
                for _ in 0..steps {
                    let mv = rng.random_range(0..2 * nu as u32) as usize;
                    let j = mv >> 1;
                    let before = z[j] != 0;
                    z[j] = if mv & 1 == 0 { (z[j] + 1) % n } else { (z[j] + n - 1) % n };
                    let after = z[j] != 0;
                    nonzero = nonzero + after as usize - before as usize;
                    if nonzero == 0 {
                        hits += 1;
                        break;
                    }
                }
            }
            hits
        })
        .sum();
    Ok(FiniteReturn {
        d,
        m,
        n,
        steps,
        estimate: Proportion::new(hits, n_samples),
        exact,
    })
}

/// Propagates the law of the walk from `e_1` with the origin absorbing.
fn exact_hit_probability(nu: usize, n: usize, steps: u64) -> f64 {
    let states = n.pow(nu as u32);
    let strides: Vec<usize> = (0..nu).map(|j| n.pow((nu - 1 - j) as u32)).collect();
    let mut p = vec![0.0; states];
    p[strides[0]] = 1.0;
    let mut next = vec![0.0; states];
    let w = 1.0 / (2 * nu) as f64;
    let mut absorbed = 0.0;
    for _ in 0..steps {
        next.iter_mut().for_each(|x| *x = 0.0);
        for (i, &mass) in p.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            for &s in &strides {
                let c = (i / s) % n;
                let up = if c + 1 == n { i - (n - 1) * s } else { i + s };
                let down = if c == 0 { i + (n - 1) * s } else { i - s };
                next[up] += mass * w;
                next[down] += mass * w;
            }
        }
        absorbed += next[0];
        next[0] = 0.0;
        std::mem::swap(&mut p, &mut next);
    }
    absorbed
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_value_is_inside_the_monte_carlo_interval() {
        let r = q_n_finite(5, 2, 4, 40_000, 3).unwrap();
        let exact = r.exact.unwrap();
        assert!((0.0..=1.0).contains(&exact));
        assert!(r.estimate.ci.contains(exact), "{exact} vs {:?}", r.estimate.ci);
    }

    #[test]
    fn range_of_m_is_checked() {
        assert!(q_n_finite(5, 0, 4, 10, 0).is_err());
        assert!(q_n_finite(5, 3, 4, 10, 0).is_err());
        assert!(q_n_finite(6, 3, 4, 10, 0).is_ok());
    }

    /// On `Z/2Z` the walk alternates between 1 and 0: one step suffices.
    #[test]
    fn tiny_torus() {
        assert!((exact_hit_probability(1, 2, 4) - 1.0).abs() < 1e-15);
        let three = exact_hit_probability(3, 2, 4);
        assert!(three > 0.0 && three < 1.0);
    }
}
