//! The limit excursion law `Q`: start from `μ_C`, run the `Z^d` walk and
//! keep the path up to its last visit to `C = B(0, L)`.
//!
//! Infinite horizon is replaced by stopping at the first exit from
//! `B(0, R)`; the chance that the walk would have come back afterwards is
//! reported as `bias_bound`.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::harmonic::HarmonicProfile;
use super::returns::escape_bias_bound;
use crate::error::{Error, Result};
use crate::lattice::linf_norm;
use crate::rng::{stream_rng, Rng, Stream};
use crate::stats::Z95;
use crate::walk_engine::{cube_jumper, CubeJumper};

const CHUNK: u64 = 10_000;

/// A finite nearest-neighbour path in `Z^d` that starts and ends on the
/// sphere `|z|_∞ = L`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QPath {
    sites: Vec<Vec<i64>>,
}

impl QPath {
    pub fn new(sites: Vec<Vec<i64>>, radius: usize) -> Result<Self> {
        check_steps(&sites)?;
        let (first, last) = (&sites[0], &sites[sites.len() - 1]);
        for end in [first, last] {
            if linf_norm(end) != radius as i64 {
                return Err(Error::NotAPath(format!("endpoint {end:?} is not on the sphere of radius {radius}")));
            }
        }
        Ok(Self { sites })
    }

    pub fn sites(&self) -> &[Vec<i64>] {
        &self.sites
    }

    /// Number of steps `T`.
    pub fn duration(&self) -> usize {
        self.sites.len() - 1
    }

    pub fn start(&self) -> &[i64] {
        &self.sites[0]
    }

    pub fn end(&self) -> &[i64] {
        &self.sites[self.sites.len() - 1]
    }
}

fn check_steps(sites: &[Vec<i64>]) -> Result<()> {
    let Some(first) = sites.first() else {
        return Err(Error::NotAPath("empty path".into()));
    };
    let d = first.len();
    for (k, w) in sites.windows(2).enumerate() {
        if w[1].len() != d {
            return Err(Error::NotAPath(format!("site {} has dimension {}", k + 1, w[1].len())));
        }
        let l1: i64 = w[0].iter().zip(&w[1]).map(|(a, b)| (a - b).abs()).sum();
        if l1 != 1 {
            return Err(Error::NotAPath(format!("sites {k} and {} are not neighbours", k + 1)));
        }
    }
    Ok(())
}

/// `cap(C)^{-1} e_C(w_0) (2d)^{-T} e_C(w_T)` with the profile's weights.
pub fn q_path_probability(profile: &HarmonicProfile, sites: &[Vec<i64>]) -> Result<f64> {
    let path = QPath::new(sites.to_vec(), profile.radius)?;
    if path.start().len() != profile.d {
        return Err(Error::NotAPath(format!("path lives in dimension {}", path.start().len())));
    }
    let step = (2.0 * profile.d as f64).powi(-(path.duration() as i32));
    Ok(profile.weight(path.start()) * step * profile.weight(path.end()) / profile.capacity)
}

/// Compact description of one `Q` draw.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QSummary {
    pub entry: Vec<i64>,
    /// Number of distinct cells of `C` visited.
    pub trace_size: usize,
    /// `T`, unknown when the walk was accelerated before its last visit.
    pub duration: Option<u64>,
    pub path: Option<QPath>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QSamples<T> {
    pub samples: Vec<T>,
    pub escape_radius: usize,
    /// Bound on the chance that a walk would return to `C` after leaving
    /// `B(0, R)`, which would change its sample.
    pub bias_bound: f64,
}

struct Walker<'a> {
    radius: i64,
    escape: i64,
    side: usize,
    jumper: Option<&'a CubeJumper>,
    visited: Vec<bool>,
    touched: Vec<usize>,
}

impl<'a> Walker<'a> {
    fn new(d: usize, radius: usize, escape: usize, jumper: Option<&'a CubeJumper>) -> Self {
        let side = 2 * radius + 1;
        Self {
            radius: radius as i64,
            escape: escape as i64,
            side,
            jumper,
            visited: vec![false; side.pow(d as u32)],
            touched: Vec::new(),
        }
    }

    fn cell(&self, z: &[i64]) -> usize {
        z.iter()
            .fold(0, |acc, &c| acc * self.side + (c + self.radius) as usize)
    }

    /// Runs one walk from `start`. Paths are kept up to `path_cap` steps.
    fn run(&mut self, start: Vec<i64>, rng: &mut Rng, path_cap: usize) -> QSummary {
        for &i in &self.touched {
            self.visited[i] = false;
        }
        self.touched.clear();
        let d = start.len();
        let mut z = start.clone();
        let mut buf = vec![start.clone()];
        let (mut steps, mut last, mut last_len) = (0u64, 0u64, 1usize);
        let (mut jumped, mut duration_known, mut recording, mut path_lost) = (false, true, true, false);
        loop {
            let norm = linf_norm(&z);
            if norm > self.escape {
                break;
            }
            if norm <= self.radius {
                let c = self.cell(&z);
                if !self.visited[c] {
                    self.visited[c] = true;
                    self.touched.push(c);
                }
                if jumped {
                    duration_known = false;
                } else {
                    last = steps;
                }
                if recording {
                    last_len = buf.len();
                } else {
                    path_lost = true;
                }
            }
            let room = (norm - self.radius - 1).min(self.escape - norm);
            if room >= 1 {
                if let Some(j) = self.jumper {
                    if j.jump(&mut z, room as usize, rng).is_some() {
                        jumped = true;
                        recording = false;
                        continue;
                    }
                }
            }
            let m = rng.random_range(0..2 * d as u32) as usize;
            z[m >> 1] += if m & 1 == 0 { 1 } else { -1 };
            steps += 1;
            if recording {
                if buf.len() > path_cap {
                    recording = false;
                } else {
                    buf.push(z.clone());
                }
            }
        }
        let path = if path_lost || !duration_known {
            None
        } else {
            buf.truncate(last_len);
            let p = QPath::new(buf, self.radius as usize).expect("last visit lies on the sphere");
            Some(p)
        };
        QSummary {
            entry: start,
            trace_size: self.touched.len(),
            duration: duration_known.then_some(last),
            path,
        }
    }
}

fn check_profile(profile: &HarmonicProfile, escape_radius: usize) -> Result<()> {
    if !(profile.capacity > 0.0) {
        return Err(Error::Parameter("profile has zero capacity".into()));
    }
    if escape_radius <= profile.radius {
        return Err(Error::Parameter(format!(
            "escape radius {escape_radius} must exceed L = {}",
            profile.radius
        )));
    }
    Ok(())
}

fn tail_bias(profile: &HarmonicProfile, escape_radius: usize) -> f64 {
    let cap = profile.capacity + Z95 * profile.capacity_se;
    escape_bias_bound(profile.d as u32, cap, profile.radius, escape_radius)
}

fn sample_with<T: Send>(
    profile: &HarmonicProfile,
    escape_radius: usize,
    n: u64,
    seed: u64,
    jumper: Option<&CubeJumper>,
    path_cap: usize,
    map: impl Fn(QSummary) -> T + Sync,
) -> Result<QSamples<T>> {
    check_profile(profile, escape_radius)?;
    let starts = profile.start_sampler()?;
    let chunks = n.div_ceil(CHUNK);
    let samples: Vec<T> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = stream_rng(seed, Stream::QLaw, c);
            let mut walker = Walker::new(profile.d, profile.radius, escape_radius, jumper);
            let count = CHUNK.min(n - c * CHUNK);
            (0..count)
                .map(|_| {
                    let s = starts.sample(&mut rng);
                    map(walker.run(s, &mut rng, path_cap))
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(QSamples {
        samples,
        escape_radius,
        bias_bound: tail_bias(profile, escape_radius),
    })
}

/// Exact paths of `Q` from single-step walks.
pub fn sample_q(profile: &HarmonicProfile, escape_radius: usize, n: u64, seed: u64) -> Result<QSamples<QPath>> {
    sample_with(profile, escape_radius, n, seed, None, usize::MAX, |s| {
        s.path.expect("unaccelerated walks keep their path")
    })
}

/// Summaries of `Q` draws. Far from `C` the walk crosses whole cubes at
/// once, which keeps the entry point and trace exact but can hide the
/// duration. Paths no longer than `path_cap` steps are kept when known.
pub fn sample_q_summaries(
    profile: &HarmonicProfile,
    escape_radius: usize,
    n: u64,
    seed: u64,
    path_cap: usize,
) -> Result<QSamples<QSummary>> {
    let jumper = cube_jumper(profile.d);
    sample_with(profile, escape_radius, n, seed, Some(&jumper), path_cap, |s| s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential_theory::harmonic::harmonic_measure;
    use crate::stats::wilson;

    #[test]
    fn path_validation() {
        assert!(QPath::new(vec![vec![1, 0, 0], vec![2, 0, 0], vec![1, 0, 0]], 1).is_ok());
        assert!(QPath::new(vec![vec![1, 0, 0], vec![1, 1, 1]], 1).is_err());
        assert!(QPath::new(vec![vec![0, 0, 0]], 1).is_err());
        assert!(QPath::new(vec![], 1).is_err());
    }

    #[test]
    fn zero_length_probability() {
        let p = HarmonicProfile::from_orbit_weights(3, 0, &[(vec![0, 0, 0], 0.6)]).unwrap();
        let v = q_path_probability(&p, &[vec![0, 0, 0]]).unwrap();
        assert!((v - 0.6).abs() < 1e-15);
        let loop2 = q_path_probability(&p, &[vec![0, 0, 0], vec![1, 0, 0], vec![0, 0, 0]]).unwrap();
        assert!((loop2 - 0.6 / 36.0).abs() < 1e-15);
        assert!(q_path_probability(&p, &[vec![0, 0, 0], vec![1, 1, 0]]).is_err());
    }

    #[test]
    fn endpoints_and_point_loops() {
        let prof = harmonic_measure(0, 3, 16, 20_000, 4).unwrap();
        let s = sample_q(&prof, 16, 5_000, 5).unwrap();
        for p in &s.samples {
            assert_eq!(p.start(), &[0, 0, 0]);
            assert_eq!(p.end(), &[0, 0, 0]);
        }
        let zero = s.samples.iter().filter(|p| p.duration() == 0).count() as u64;
        let want = prof.orbits[0].weight;
        assert!(wilson(zero, 5_000, 4.0).contains(want));
    }

    #[test]
    fn accelerated_summaries_agree_on_trace_law() {
        let prof = harmonic_measure(1, 3, 12, 20_000, 6).unwrap();
        let exact = sample_with(&prof, 12, 20_000, 7, None, usize::MAX, |s| s).unwrap();
        let fast = sample_q_summaries(&prof, 12, 20_000, 8, 64).unwrap();
        let mean = |v: &[QSummary]| v.iter().map(|s| s.trace_size as f64).sum::<f64>() / v.len() as f64;
        let (a, b) = (mean(&exact.samples), mean(&fast.samples));
        assert!((a - b).abs() < 0.1, "{a} vs {b}");
        for s in &fast.samples {
            assert_eq!(linf_norm(&s.entry), 1);
            if let (Some(p), Some(t)) = (&s.path, s.duration) {
                assert_eq!(p.duration() as u64, t);
                assert_eq!(p.start(), s.entry.as_slice());
            }
        }
    }
}
