//! Total variation between empirical laws, and maximal couplings.
//!
//! Total variation here is `Σ |p - q|` without the factor ½, so it ranges
//! over `[0, 2]`; a maximal coupling mismatches with probability half of it.

use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::histogram::SummaryHistogram;
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Rng, Stream};
use crate::stats::Interval;

pub const DEFAULT_BOOTSTRAP: usize = 200;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TvEstimate {
    /// `Σ |p̂ - q̂|`.
    pub raw: f64,
    /// `raw` minus the expected inflation from sampling noise, floored at 0.
    pub bias_corrected: f64,
    /// Basic bootstrap 95% interval for `bias_corrected`.
    pub ci: Interval,
    pub n_p: u64,
    pub n_q: u64,
    pub bootstrap: usize,
}

fn raw_tv(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum()
}

/// Expected `Σ |p̂ - q̂|` when `p = q`, from the half-normal mean
/// `√(2/π) σ` per atom.
fn noise_floor(p: &[f64], q: &[f64], n_p: u64, n_q: u64) -> f64 {
    let k = (2.0 / std::f64::consts::PI).sqrt();
    p.iter()
        .zip(q)
        .map(|(a, b)| k * (a * (1.0 - a) / n_p as f64 + b * (1.0 - b) / n_q as f64).sqrt())
        .sum()
}

fn corrected(p: &[f64], q: &[f64], n_p: u64, n_q: u64) -> (f64, f64) {
    let raw = raw_tv(p, q);
    (raw, (raw - noise_floor(p, q, n_p, n_q)).max(0.0))
}

fn multinomial(counts: &[u64], total: u64, rng: &mut Rng) -> Vec<f64> {
    let mut left = total;
    let mut mass = 1.0;
    let mut out = Vec::with_capacity(counts.len());
    for &c in counts {
        let p = c as f64 / total as f64;
        let k = if left == 0 || p <= 0.0 {
            0
        } else if p >= mass {
            left
        } else {
            Binomial::new(left, (p / mass).min(1.0)).expect("valid binomial").sample(rng)
        };
        out.push(k as f64 / total as f64);
        left -= k;
        mass -= p;
    }
    out
}

pub fn tv_distance(p: &SummaryHistogram, q: &SummaryHistogram) -> Result<TvEstimate> {
    tv_distance_with(p, q, DEFAULT_BOOTSTRAP, 0)
}

pub fn tv_distance_with(p: &SummaryHistogram, q: &SummaryHistogram, bootstrap: usize, seed: u64) -> Result<TvEstimate> {
    if !p.same_atoms(q) {
        return Err(Error::AtomMismatch);
    }
    if p.total == 0 || q.total == 0 {
        return Err(Error::Parameter("empty histogram".into()));
    }
    let (pf, qf) = (p.frequencies(), q.frequencies());
    let (raw, bias_corrected) = corrected(&pf, &qf, p.total, q.total);
    let mut rng = stream_rng(seed, Stream::Bootstrap, 0);
    let mut reps: Vec<f64> = (0..bootstrap)
        .map(|_| {
            let a = multinomial(&p.counts, p.total, &mut rng);
            let b = multinomial(&q.counts, q.total, &mut rng);
            corrected(&a, &b, p.total, q.total).1
        })
        .collect();
    reps.sort_by(f64::total_cmp);
    let ci = if reps.is_empty() {
        Interval {
            lo: bias_corrected,
            hi: bias_corrected,
        }
    } else {
        let at = |f: f64| reps[((f * (reps.len() - 1) as f64).round() as usize).min(reps.len() - 1)];
        Interval {
            lo: (2.0 * bias_corrected - at(0.975)).clamp(0.0, 2.0),
            hi: (2.0 * bias_corrected - at(0.025)).clamp(0.0, 2.0),
        }
    };
    Ok(TvEstimate {
        raw,
        bias_corrected,
        ci,
        n_p: p.total,
        n_q: q.total,
        bootstrap,
    })
}

/// A joint law on `atoms × atoms` with prescribed marginals.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Coupling {
    /// Row-major `joint[i * atoms + j]`.
    pub joint: Vec<f64>,
    pub atoms: usize,
    /// Off-diagonal mass.
    pub mismatch: f64,
}

impl Coupling {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.joint[i * self.atoms + j]
    }

    pub fn first_marginal(&self) -> Vec<f64> {
        self.joint.chunks(self.atoms).map(|row| row.iter().sum()).collect()
    }

    pub fn second_marginal(&self) -> Vec<f64> {
        (0..self.atoms)
            .map(|j| (0..self.atoms).map(|i| self.at(i, j)).sum())
            .collect()
    }
}

const NORMALIZATION_SLACK: f64 = 1e-9;

/// `min(p, q)` on the diagonal, `(p - q)₊ ⊗ (q - p)₊` normalized off it.
pub fn maximal_coupling(p: &[f64], q: &[f64]) -> Result<Coupling> {
    if p.len() != q.len() {
        return Err(Error::AtomMismatch);
    }
    for v in [p, q] {
        if v.iter().any(|&x| !(x >= 0.0)) {
            return Err(Error::Parameter("negative or NaN mass".into()));
        }
        let s: f64 = v.iter().sum();
        if (s - 1.0).abs() > NORMALIZATION_SLACK {
            return Err(Error::Unnormalized(s));
        }
    }
    let k = p.len();
    let mut joint = vec![0.0; k * k];
    let excess: Vec<f64> = p.iter().zip(q).map(|(a, b)| (a - b).max(0.0)).collect();
    let deficit: Vec<f64> = p.iter().zip(q).map(|(a, b)| (b - a).max(0.0)).collect();
    let mismatch: f64 = excess.iter().sum();
    for i in 0..k {
        joint[i * k + i] = p[i].min(q[i]);
        if mismatch > 0.0 && excess[i] > 0.0 {
            for j in 0..k {
                joint[i * k + j] += excess[i] * deficit[j] / mismatch;
            }
        }
    }
    Ok(Coupling {
        joint,
        atoms: k,
        mismatch,
    })
}
