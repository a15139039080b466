//! Return probability `q(ν)` of simple random walk on `Z^ν` and the Green
//! value `g_ν(0) = 1 / (1 - q(ν))`.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bessel::ie0;
use super::quadrature::integrate;
use crate::error::{Error, Result};
use crate::lattice::linf_norm;
use crate::rng::{stream_rng, Rng, Stream};
use crate::stats::{wilson, Interval, Z95};
use crate::walk_engine::{cube_jumper, CubeJumper};

/// Default absolute tolerance on `g_ν(0)`.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// Largest ν handled by quadrature inside [`q_nu`].
pub const ASYMPTOTIC_SWITCH: u32 = 32;

/// Walks per independent random stream in the Monte Carlo estimators.
const CHUNK: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Quadrature,
    Asymptotic,
    MonteCarlo,
    Exact,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReturnProbability {
    pub nu: u32,
    pub value: f64,
    pub green: f64,
    pub method: Method,
    /// Absolute error bound (quadrature, asymptotic) or 95% half-width
    /// (Monte Carlo) on `value`.
    pub error: f64,
    pub ci: Option<Interval>,
    /// One-sided truncation bias: the true value may exceed the estimate by
    /// at most this much.
    pub bias_bound: f64,
    pub samples: u64,
}

impl ReturnProbability {
    fn from_green(nu: u32, green: f64, green_err: f64, method: Method) -> Self {
        Self {
            nu,
            value: 1.0 - 1.0 / green,
            green,
            method,
            error: green_err / (green * green),
            ci: None,
            bias_bound: 0.0,
            samples: 0,
        }
    }
}

fn check_nu(nu: u32) -> Result<()> {
    if nu <= 2 {
        Err(Error::Recurrent(nu as usize))
    } else {
        Ok(())
    }
}

/// `g_ν(0) = ∫_0^∞ (e^{-t/ν} I_0(t/ν))^ν dt`, split at `t = ν`; the tail uses
/// `t = ν / w²` on `w ∈ (0, 1]`, which turns the algebraic decay into a
/// bounded smooth integrand.
pub fn green_quadrature(nu: u32, tol: f64) -> Result<(f64, f64)> {
    check_nu(nu)?;
    let v = nu as f64;
    let f = |t: f64| ie0(t / v).powf(v);
    let head = integrate(f, 0.0, v, tol / 2.0, 4000);
    let tail = integrate(
        |w: f64| {
            let t = v / (w * w);
            f(t) * 2.0 * v / (w * w * w)
        },
        0.0,
        1.0,
        tol / 2.0,
        4000,
    );
    Ok((head.value + tail.value, head.error + tail.error))
}

pub fn q_nu_quadrature(nu: u32) -> Result<ReturnProbability> {
    q_nu_quadrature_tol(nu, DEFAULT_TOLERANCE)
}

pub fn q_nu_quadrature_tol(nu: u32, tol: f64) -> Result<ReturnProbability> {
    let (g, err) = green_quadrature(nu, tol)?;
    Ok(ReturnProbability::from_green(nu, g, err, Method::Quadrature))
}

/// Four-term large-ν expansion
/// `q = 1/(2ν) + 1/(2ν²) + 7/(8ν³) + 35/(16ν⁴)` with error envelope
/// `10/ν⁵`, checked against the quadrature for `ν > 32`.
pub fn q_nu_asymptotic(nu: u32) -> Result<ReturnProbability> {
    check_nu(nu)?;
    let v = nu as f64;
    let q = 1.0 / (2.0 * v) + 1.0 / (2.0 * v * v) + 7.0 / (8.0 * v.powi(3)) + 35.0 / (16.0 * v.powi(4));
    Ok(ReturnProbability {
        nu,
        value: q,
        green: 1.0 / (1.0 - q),
        method: Method::Asymptotic,
        error: 10.0 / v.powi(5),
        ci: None,
        bias_bound: 0.0,
        samples: 0,
    })
}

/// Quadrature up to ν = 32, the asymptotic branch above.
pub fn q_nu(nu: u32, tol: f64) -> Result<ReturnProbability> {
    if nu > ASYMPTOTIC_SWITCH {
        q_nu_asymptotic(nu)
    } else {
        q_nu_quadrature_tol(nu, tol)
    }
}

/// `Γ(k / 2)` for a positive integer `k`.
fn gamma_half(k: u32) -> f64 {
    let mut x = if k % 2 == 0 { 1.0 } else { std::f64::consts::PI.sqrt() };
    let mut a = if k % 2 == 0 { 1.0 } else { 0.5 };
    while 2.0 * a < k as f64 {
        x *= a;
        a += 1.0;
    }
    x
}

/// Constant `a_ν` of the Green function decay `G(x) ~ a_ν |x|^{2-ν}`.
pub fn green_decay_constant(nu: u32) -> f64 {
    let v = nu as f64;
    v * gamma_half(nu - 2) / (2.0 * std::f64::consts::PI.powf(v / 2.0))
}

/// Upper bound on the chance that a walk leaving `B(0, R)` later hits a set
/// of capacity `capacity` inside `B(0, core)`: twice the Green decay at the
/// distance `R + 1 - core`.
pub fn escape_bias_bound(nu: u32, capacity: f64, core: usize, escape_radius: usize) -> f64 {
    let dist = (escape_radius + 1 - core) as f64;
    (2.0 * green_decay_constant(nu) * capacity / dist.powi(nu as i32 - 2)).min(1.0)
}

/// Runs the walk from `z` (outside `B(0, core)`) until it enters the core
/// (`true`) or leaves `B(0, escape)` (`false`). Far from both it jumps
/// across cubes, which leaves this outcome's law unchanged.
pub(crate) fn returns_before_escape(
    z: &mut [i64],
    core: i64,
    escape: i64,
    jumper: &CubeJumper,
    rng: &mut Rng,
) -> bool {
    let nu = z.len() as u32;
    loop {
        let norm = linf_norm(z);
        if norm <= core {
            return true;
        }
        if norm > escape {
            return false;
        }
        let room = (norm - core - 1).min(escape - norm);
        if room < 1 || jumper.jump(z, room as usize, rng).is_none() {
            let m = rng.random_range(0..2 * nu) as usize;
            z[m >> 1] += if m & 1 == 0 { 1 } else { -1 };
        }
    }
}

/// Fraction of walks from 0 that come back to 0 before leaving
/// `B(0, escape_radius)`; escapes count as no return, so the estimate is
/// biased low by at most `bias_bound`.
pub fn q_nu_montecarlo(nu: u32, escape_radius: usize, n_samples: u64, seed: u64) -> Result<ReturnProbability> {
    check_nu(nu)?;
    if escape_radius < 2 {
        return Err(Error::Parameter("escape radius must be at least 2".into()));
    }
    let jumper = cube_jumper(nu as usize);
    let chunks = n_samples.div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, Stream::LatticeWalk, c);
            let count = CHUNK.min(n_samples - c * CHUNK);
            let mut hits = 0;
            let mut z = vec![0i64; nu as usize];
            for _ in 0..count {
                z.iter_mut().for_each(|x| *x = 0);
                let m = rng.random_range(0..2 * nu) as usize;
                z[m >> 1] = if m & 1 == 0 { 1 } else { -1 };
                if returns_before_escape(&mut z, 0, escape_radius as i64, &jumper, &mut rng) {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let p = hits as f64 / n_samples as f64;
    let half = Z95 * (p * (1.0 - p) / n_samples as f64).sqrt();
    Ok(ReturnProbability {
        nu,
        value: p,
        green: 1.0 / (1.0 - p),
        method: Method::MonteCarlo,
        error: half,
        ci: Some(wilson(hits, n_samples, Z95)),
        bias_bound: escape_bias_bound(nu, 1.0 - p, 0, escape_radius),
        samples: n_samples,
    })
}

/// Exact probability of returning to 0 before leaving `B(0, R)`, from the
/// absorbing chain on `B(0, R)` solved by Gauss–Seidel sweeps.
pub fn q_truncated_exact(nu: u32, escape_radius: usize) -> Result<f64> {
    if nu == 0 || escape_radius == 0 {
        return Err(Error::Parameter("need nu >= 1 and R >= 1".into()));
    }
    let side = 2 * escape_radius + 1;
    let states = side.pow(nu);
    if states > 2_000_000 {
        return Err(Error::Parameter(format!("{states} states is too many")));
    }
    let r = escape_radius as i64;
    let to_index = |z: &[i64]| z.iter().fold(0usize, |acc, &c| acc * side + (c + r) as usize);
    let origin = to_index(&vec![0; nu as usize]);
    // neighbour lists, None for exits
    let mut nbrs: Vec<Vec<Option<usize>>> = Vec::with_capacity(states);
    let mut z = vec![-r; nu as usize];
    for _ in 0..states {
        let mut list = Vec::with_capacity(2 * nu as usize);
        for j in 0..nu as usize {
            for s in [1, -1] {
                z[j] += s;
                list.push(if z[j].abs() > r { None } else { Some(to_index(&z)) });
                z[j] -= s;
            }
        }
        nbrs.push(list);
        for j in (0..nu as usize).rev() {
            if z[j] < r {
                z[j] += 1;
                break;
            }
            z[j] = -r;
        }
    }
    // h(x) = P_x[hit 0 before exit]
    let mut h = vec![0.0; states];
    h[origin] = 1.0;
    let w = 1.0 / (2 * nu) as f64;
    for _ in 0..1_000_000 {
        let mut delta: f64 = 0.0;
        for x in 0..states {
            if x == origin {
                continue;
            }
            let v: f64 = nbrs[x].iter().map(|n| n.map_or(0.0, |y| h[y])).sum::<f64>() * w;
            delta = delta.max((v - h[x]).abs());
            h[x] = v;
        }
        if delta < 1e-15 {
            break;
        }
    }
    Ok(nbrs[origin].iter().map(|n| n.map_or(0.0, |y| h[y])).sum::<f64>() * w)
}
