//! Simple random walk on `Z^ν` with explicit stop rules.

use std::collections::HashSet;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::linf_norm;
use crate::rng::Rng;

/// Target set of a [`StopRule`].
#[derive(Clone, Debug, Default)]
pub enum HitSet {
    #[default]
    Empty,
    Points(HashSet<Vec<i64>>),
    /// The L∞ ball `B(0, radius)`.
    Box(u64),
}

impl HitSet {
    #[inline]
    pub fn contains(&self, z: &[i64]) -> bool {
        match self {
            HitSet::Empty => false,
            HitSet::Points(s) => s.contains(z),
            HitSet::Box(r) => linf_norm(z) as u64 <= *r,
        }
    }
}

#[derive(Clone, Debug)]
pub struct StopRule {
    pub hit: HitSet,
    /// Stop on the first point with `|z|_∞ > exit_radius`.
    pub exit_radius: Option<u64>,
    pub max_steps: u64,
    /// Ignore the hit set at time 0 (return rather than entrance times).
    pub strict_hit: bool,
}

impl StopRule {
    pub fn new(max_steps: u64) -> Self {
        Self {
            hit: HitSet::Empty,
            exit_radius: None,
            max_steps,
            strict_hit: false,
        }
    }

    pub fn hitting(mut self, hit: HitSet) -> Self {
        self.hit = hit;
        self
    }

    pub fn exiting(mut self, radius: u64) -> Self {
        self.exit_radius = Some(radius);
        self
    }

    pub fn strict(mut self) -> Self {
        self.strict_hit = true;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Hit,
    Exited,
    MaxSteps,
}

#[derive(Clone, Debug)]
pub struct ZdWalkOutcome {
    pub reason: StopReason,
    pub end: Vec<i64>,
    pub steps: u64,
    pub path: Option<Vec<Vec<i64>>>,
}

pub fn run_zd_walk(start: &[i64], rule: &StopRule, rng: &mut Rng, record_path: bool) -> Result<ZdWalkOutcome> {
    let nu = start.len();
    if nu == 0 {
        return Err(Error::Parameter("zero-dimensional walk".into()));
    }
    let mut z = start.to_vec();
    let mut path = record_path.then(|| vec![z.clone()]);
    let check = |z: &[i64], t: u64| -> Option<StopReason> {
        if (t > 0 || !rule.strict_hit) && rule.hit.contains(z) {
            return Some(StopReason::Hit);
        }
        match rule.exit_radius {
            Some(r) if linf_norm(z) as u64 > r => Some(StopReason::Exited),
            _ => None,
        }
    };
    let mut steps = 0;
    let reason = loop {
        if let Some(r) = check(&z, steps) {
            break r;
        }
        if steps == rule.max_steps {
            break StopReason::MaxSteps;
        }
        let m = rng.random_range(0..2 * nu as u32) as usize;
        z[m >> 1] += if m & 1 == 0 { 1 } else { -1 };
        steps += 1;
        if let Some(p) = path.as_mut() {
            p.push(z.clone());
        }
    };
    Ok(ZdWalkOutcome {
        reason,
        end: z,
        steps,
        path,
    })
}
