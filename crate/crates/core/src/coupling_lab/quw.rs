//! Sampling the first centered excursion of the torus walk through a union
//! of core boxes, stratified by its exit point from the halo.
//!
//! Away from the boxes the walk crosses whole cubes in one draw of their
//! exit law. Cubes never meet a core box, and after entry they stay inside
//! the halo, so entry, trace and exit point are exact. Only the duration
//! can be lost, which is then reported as unknown.

use std::collections::BTreeMap;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::histogram::ExcursionSummary;
use crate::error::{Error, Result};
use crate::lattice::{circular_dist, linf_norm, wrap_signed};
use crate::rng::{stream_rng, Rng, Stream};
use crate::walk_engine::{cube_jumper, CubeJumper};

const CHUNK: u64 = 1_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuwParams {
    pub d: usize,
    #[serde(rename = "N")]
    pub side: usize,
    #[serde(rename = "L")]
    pub core: usize,
    pub r: usize,
    pub centers: Vec<Vec<usize>>,
    pub start: Vec<usize>,
}

impl QuwParams {
    /// Two centers half a torus apart along the first axis and a start half
    /// a torus away from both along the second.
    pub fn two_centers(d: usize, side: usize, core: usize, r: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::Geometry("need d >= 2".into()));
        }
        let q = side / 4;
        let x1 = vec![q; d];
        let mut x2 = x1.clone();
        x2[0] = (q + side / 2) % side;
        let mut start = x1.clone();
        start[1] = (q + side / 2) % side;
        let p = Self {
            d,
            side,
            core,
            r,
            centers: vec![x1, x2],
            start,
        };
        p.validate()?;
        Ok(p)
    }

    fn dist(&self, a: &[usize], b: &[usize]) -> usize {
        a.iter().zip(b).map(|(&x, &y)| circular_dist(x, y, self.side)).max().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        let (n, m) = (self.side, self.centers.len());
        if self.d < 3 {
            return Err(Error::Recurrent(self.d));
        }
        if self.r < 10 * self.core {
            return Err(Error::Parameter(format!("r = {} < 10 L = {}", self.r, 10 * self.core)));
        }
        if n < 4 * self.r + 6 {
            return Err(Error::Geometry(format!("N = {n} < 4r + 6 = {}", 4 * self.r + 6)));
        }
        if m < 2 {
            return Err(Error::Parameter("need at least two centers".into()));
        }
        if n < m * (2 * self.r + 3) {
            return Err(Error::Geometry(format!("N = {n} < M (2r + 3) = {}", m * (2 * self.r + 3))));
        }
        for p in self.centers.iter().chain([&self.start]) {
            if p.len() != self.d || p.iter().any(|&c| c >= n) {
                return Err(Error::Geometry(format!("{p:?} is not a point of the torus")));
            }
        }
        for i in 0..m {
            for j in 0..i {
                if self.dist(&self.centers[i], &self.centers[j]) < 2 * self.r + 3 {
                    return Err(Error::Geometry(format!("centers {j} and {i} closer than 2r + 3")));
                }
            }
            if self.dist(&self.centers[i], &self.start) <= self.r {
                return Err(Error::Geometry(format!("start lies in the halo of center {i}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuwSamples {
    pub params: QuwParams,
    pub summaries: Vec<ExcursionSummary>,
}

impl QuwSamples {
    /// Sample counts per `(center, exit point)` stratum.
    pub fn strata(&self) -> BTreeMap<(usize, Vec<i64>), u64> {
        let mut m = BTreeMap::new();
        for s in &self.summaries {
            let w = s.exit.clone().expect("torus samples carry their exit");
            *m.entry((s.center, w)).or_insert(0) += 1;
        }
        m
    }

    /// The samples of one stratum: draws from the law conditioned on that
    /// exit point.
    pub fn stratum(&self, center: usize, exit: &[i64]) -> Vec<&ExcursionSummary> {
        self.summaries
            .iter()
            .filter(|s| s.center == center && s.exit.as_deref() == Some(exit))
            .collect()
    }
}

struct TorusWalker<'a> {
    p: &'a QuwParams,
    centers: Vec<Vec<i64>>,
    jumper: &'a CubeJumper,
    max_jump: usize,
    box_side: usize,
    visited: Vec<bool>,
    touched: Vec<usize>,
}

impl<'a> TorusWalker<'a> {
    fn new(p: &'a QuwParams, jumper: &'a CubeJumper) -> Self {
        let box_side = 2 * p.core + 1;
        Self {
            p,
            centers: p.centers.iter().map(|c| c.iter().map(|&x| x as i64).collect()).collect(),
            jumper,
            max_jump: (p.side - 1) / 2,
            box_side,
            visited: vec![false; box_side.pow(p.d as u32)],
            touched: Vec::new(),
        }
    }

    /// Nearest center and the `L∞` distance to it.
    fn nearest(&self, z: &[i64]) -> (usize, i64) {
        let n = self.p.side;
        let mut best = (0, i64::MAX);
        for (i, c) in self.centers.iter().enumerate() {
            let d = z
                .iter()
                .zip(c)
                .map(|(a, b)| wrap_signed(a - b, n).abs())
                .max()
                .unwrap_or(0);
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }

    fn step(z: &mut [i64], rng: &mut Rng) {
        let m = rng.random_range(0..2 * z.len() as u32) as usize;
        z[m >> 1] += if m & 1 == 0 { 1 } else { -1 };
    }

    fn run(&mut self, rng: &mut Rng) -> ExcursionSummary {
        let n = self.p.side as i64;
        let core = self.p.core as i64;
        let halo = self.p.r as i64;
        let mut z: Vec<i64> = self.p.start.iter().map(|&x| x as i64).collect();
        // up to the first entrance into a core box
        let center = loop {
            let (i, dist) = self.nearest(&z);
            if dist <= core {
                break i;
            }
            let room = ((dist - core - 1) as usize).min(self.max_jump);
            if self.jumper.jump(&mut z, room, rng).is_none() {
                Self::step(&mut z, rng);
            }
            z.iter_mut().for_each(|c| *c = c.rem_euclid(n));
        };
        // centered coordinates from here on; the halo is smaller than half
        // the torus so no wrapping is needed
        let mut y: Vec<i64> = z
            .iter()
            .zip(&self.centers[center])
            .map(|(a, b)| wrap_signed(a - b, self.p.side))
            .collect();
        let entry = y.clone();
        for &i in &self.touched {
            self.visited[i] = false;
        }
        self.touched.clear();
        let (mut steps, mut last) = (0u64, 0u64);
        let (mut jumped, mut known) = (false, true);
        loop {
            let norm = linf_norm(&y);
            if norm > halo {
                break;
            }
            if norm <= core {
                let c = y.iter().fold(0, |acc, &v| acc * self.box_side + (v + core) as usize);
                if !self.visited[c] {
                    self.visited[c] = true;
                    self.touched.push(c);
                }
                if jumped {
                    known = false;
                } else {
                    last = steps;
                }
            }
            let room = (norm - core - 1).min(halo - norm);
            if room >= 1 && self.jumper.jump(&mut y, room as usize, rng).is_some() {
                jumped = true;
                continue;
            }
            Self::step(&mut y, rng);
            steps += 1;
        }
        ExcursionSummary {
            center,
            entry,
            exit: Some(y),
            trace_size: self.touched.len(),
            duration: known.then_some(last),
        }
    }
}

/// `n` independent first excursions, each from a fresh walk started at
/// `params.start`.
pub fn sample_quw(params: &QuwParams, n: u64, seed: u64) -> Result<QuwSamples> {
    params.validate()?;
    let jumper = cube_jumper(params.d);
    let chunks = n.div_ceil(CHUNK);
    let summaries = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = stream_rng(seed, Stream::Coupling, c);
            let mut walker = TorusWalker::new(params, &jumper);
            let count = CHUNK.min(n - c * CHUNK);
            (0..count).map(|_| walker.run(&mut rng)).collect::<Vec<_>>()
        })
        .collect();
    Ok(QuwSamples {
        params: params.clone(),
        summaries,
    })
}
