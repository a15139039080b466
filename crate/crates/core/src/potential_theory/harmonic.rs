//! Harmonic measure from infinity `e_C(z) = P_z[H̃_C = ∞]` of the box
//! `C = B(0, L) ⊂ Z^d`, its capacity and the normalized measure `μ_C`.
//!
//! The estimator is symmetrized: points of `C` related by a coordinate
//! permutation or sign flip share one pooled estimate, so the profile is
//! exactly invariant under the symmetry group of the box.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::returns::{escape_bias_bound, returns_before_escape};
use crate::error::{Error, Result};
use crate::lattice::{linf_norm, sphere_zd};
use crate::rng::{stream_rng, Rng, Stream};
use crate::stats::{wilson, Interval, Z95};
use crate::walk_engine::cube_jumper;

const CHUNK: u64 = 10_000;

/// Sorted absolute values: the orbit label of a point under the
/// hyperoctahedral group.
pub fn orbit_key(z: &[i64]) -> Vec<i64> {
    let mut k: Vec<i64> = z.iter().map(|c| c.abs()).collect();
    k.sort_unstable();
    k
}

/// Boundary points of `B(0, L)`: the sphere `|z|_∞ = L` (just `{0}` for
/// `L = 0`).
pub fn box_boundary(d: usize, radius: usize) -> Vec<Vec<i64>> {
    sphere_zd(&vec![0; d], radius)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitWeight {
    pub representative: Vec<i64>,
    pub multiplicity: usize,
    pub escapes: u64,
    pub samples: u64,
    pub weight: f64,
    pub ci: Interval,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HarmonicProfile {
    #[serde(rename = "L")]
    pub radius: usize,
    pub d: usize,
    pub escape_radius: usize,
    pub orbits: Vec<OrbitWeight>,
    pub capacity: f64,
    /// Standard error of `capacity`.
    pub capacity_se: f64,
    /// The true weights lie in `[estimate - bias_bound, estimate]` up to
    /// sampling error, since escapes are counted as never returning.
    pub bias_bound: f64,
    #[serde(skip)]
    index: HashMap<Vec<i64>, usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProfileRecord {
    pub point: Vec<i64>,
    pub e: f64,
    pub mu: f64,
}

impl HarmonicProfile {
    /// Builds a profile from known per-orbit weights (keys as in
    /// [`orbit_key`]); sample counts are recorded as zero.
    pub fn from_orbit_weights(d: usize, radius: usize, weights: &[(Vec<i64>, f64)]) -> Result<Self> {
        let mut mult: HashMap<Vec<i64>, usize> = HashMap::new();
        for z in box_boundary(d, radius) {
            *mult.entry(orbit_key(&z)).or_default() += 1;
        }
        let mut orbits = Vec::new();
        for (k, w) in weights {
            let m = *mult
                .get(k)
                .ok_or_else(|| Error::Parameter(format!("{k:?} is not a boundary orbit")))?;
            orbits.push(OrbitWeight {
                representative: k.clone(),
                multiplicity: m,
                escapes: 0,
                samples: 0,
                weight: *w,
                ci: Interval { lo: *w, hi: *w },
            });
        }
        Ok(Self::assemble(d, radius, 0, orbits, 0.0))
    }

    fn assemble(d: usize, radius: usize, escape_radius: usize, mut orbits: Vec<OrbitWeight>, bias: f64) -> Self {
        orbits.sort_by(|a, b| a.representative.cmp(&b.representative));
        let capacity = orbits.iter().map(|o| o.multiplicity as f64 * o.weight).sum();
        let capacity_se = orbits
            .iter()
            .filter(|o| o.samples > 0)
            .map(|o| {
                let m = o.multiplicity as f64;
                m * m * o.weight * (1.0 - o.weight) / o.samples as f64
            })
            .sum::<f64>()
            .sqrt();
        let index = orbits
            .iter()
            .enumerate()
            .map(|(i, o)| (o.representative.clone(), i))
            .collect();
        Self {
            radius,
            d,
            escape_radius,
            orbits,
            capacity,
            capacity_se,
            bias_bound: bias,
            index,
        }
    }

    /// `e_C(z)`; zero off the boundary of the box.
    pub fn weight(&self, z: &[i64]) -> f64 {
        if z.len() != self.d || linf_norm(z) != self.radius as i64 {
            return 0.0;
        }
        self.index
            .get(&orbit_key(z))
            .map_or(0.0, |&i| self.orbits[i].weight)
    }

    /// `μ_C(z) = e_C(z) / cap(C)`.
    pub fn mu(&self, z: &[i64]) -> f64 {
        self.weight(z) / self.capacity
    }

    pub fn records(&self) -> Vec<ProfileRecord> {
        box_boundary(self.d, self.radius)
            .into_iter()
            .map(|z| ProfileRecord {
                e: self.weight(&z),
                mu: self.mu(&z),
                point: z,
            })
            .collect()
    }

    /// Sampler for `μ_C`.
    pub fn start_sampler(&self) -> Result<StartSampler> {
        if !(self.capacity > 0.0) {
            return Err(Error::Parameter("profile has zero capacity".into()));
        }
        let w: Vec<f64> = self
            .orbits
            .iter()
            .map(|o| o.multiplicity as f64 * o.weight)
            .collect();
        let alias = WeightedAliasIndex::new(w).map_err(|e| Error::Parameter(e.to_string()))?;
        Ok(StartSampler {
            reps: self.orbits.iter().map(|o| o.representative.clone()).collect(),
            alias,
        })
    }
}

pub struct StartSampler {
    reps: Vec<Vec<i64>>,
    alias: WeightedAliasIndex<f64>,
}

impl StartSampler {
    /// Orbit by weight, then a uniform symmetry applied to its
    /// representative, which is uniform on the orbit.
    pub fn sample(&self, rng: &mut Rng) -> Vec<i64> {
        let mut z = self.reps[self.alias.sample(rng)].clone();
        z.shuffle(rng);
        for c in z.iter_mut() {
            if rng.random::<bool>() {
                *c = -*c;
            }
        }
        z
    }
}

/// Estimates `e_C` on the boundary of `C = B(0, L)` by sending
/// `n_samples` walks from each orbit representative; a walk counts as
/// escaped when it leaves `B(0, escape_radius)` without re-entering `C`.
pub fn harmonic_measure(
    radius: usize,
    d: usize,
    escape_radius: usize,
    n_samples: u64,
    seed: u64,
) -> Result<HarmonicProfile> {
    if d < 3 {
        return Err(Error::Recurrent(d));
    }
    if escape_radius < 2 || escape_radius < 10 * radius {
        return Err(Error::Parameter(format!(
            "escape radius {escape_radius} must be at least max(2, 10 L) = {}",
            (10 * radius).max(2)
        )));
    }
    let mut mult: HashMap<Vec<i64>, usize> = HashMap::new();
    for z in box_boundary(d, radius) {
        *mult.entry(orbit_key(&z)).or_default() += 1;
    }
    let mut keys: Vec<Vec<i64>> = mult.keys().cloned().collect();
    keys.sort();
    let jumper = cube_jumper(d);
    let chunks = n_samples.div_ceil(CHUNK);
    let core = radius as i64;
    let tasks: Vec<(usize, u64)> = (0..keys.len())
        .flat_map(|o| (0..chunks).map(move |c| (o, c)))
        .collect();
    let escapes: Vec<u64> = tasks
        .par_iter()
        .map(|&(o, c)| {
            let mut rng = stream_rng(seed, Stream::Harmonic, ((o as u64) << 32) | c);
            let count = CHUNK.min(n_samples - c * CHUNK);
            let mut esc = 0;
            let mut z = vec![0i64; d];
            for _ in 0..count {
                z.copy_from_slice(&keys[o]);
                let m = rng.random_range(0..2 * d as u32) as usize;
                z[m >> 1] += if m & 1 == 0 { 1 } else { -1 };
                if !returns_before_escape(&mut z, core, escape_radius as i64, &jumper, &mut rng) {
                    esc += 1;
                }
            }
            esc
        })
        .collect();
    let orbits: Vec<OrbitWeight> = keys
        .iter()
        .enumerate()
        .map(|(o, k)| {
            let e: u64 = escapes[o * chunks as usize..(o + 1) * chunks as usize].iter().sum();
            OrbitWeight {
                representative: k.clone(),
                multiplicity: mult[k],
                escapes: e,
                samples: n_samples,
                weight: e as f64 / n_samples as f64,
                ci: wilson(e, n_samples, Z95),
            }
        })
        .collect();
    let mut profile = HarmonicProfile::assemble(d, radius, escape_radius, orbits, 0.0);
    let cap_hi = profile.capacity + Z95 * profile.capacity_se;
    profile.bias_bound = escape_bias_bound(d as u32, cap_hi, radius, escape_radius);
    Ok(profile)
}
