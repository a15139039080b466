//! Exact exit law of simple random walk from the centre of an L∞ cube.
//!
//! Started at the centre of `B(0, m) ⊂ Z^d`, the walk leaves the cube
//! through each of the `2d` faces with probability `1/(2d)`. On the face
//! `{z_a = m + 1}` the position law is a discrete sine series: with
//! `M = 2m + 2`, odd transverse modes `k_j = 2 i_j + 1`, `θ_j = k_j π / M`,
//! `μ = Σ_j (2 - 2 cos θ_j)` and `cosh α = 1 + μ / 2`,
//!
//! `P(y) = (m+1)^{1-d} Σ_k Π_j (-1)^{i_j} sin(k_j π n_j / M) / (2 cosh(α (m+1)))`
//!
//! where `n_j = y_j + m + 1`. The series is evaluated by applying the mode
//! transform one transverse axis at a time. Walks that only need the exit
//! point (not the time spent) can jump across whole cubes with it.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng as _;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;

use crate::error::{Error, Result};
use crate::rng::Rng;

/// Upper bound on the number of face cells of a tabulated cube.
const MAX_FACE_CELLS: usize = 1 << 21;

const PLANNED_RADII: [usize; 15] = [1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64, 96, 128, 256];

pub struct CubeExitLaw {
    dim: usize,
    radius: usize,
    /// Exit probabilities on one face, conditioned on that face, row-major
    /// over the `d - 1` transverse coordinates in `[-m, m]`.
    face: Vec<f64>,
    /// Unnormalized face mass from the series; `1/(2d)` up to rounding.
    face_mass: f64,
    alias: WeightedAliasIndex<f64>,
}

impl CubeExitLaw {
    pub fn new(dim: usize, radius: usize) -> Result<Self> {
        if dim == 0 || radius == 0 {
            return Err(Error::Parameter("cube exit law needs d >= 1 and m >= 1".into()));
        }
        let side = 2 * radius + 1;
        let t = dim - 1;
        let cells = side.checked_pow(t as u32).filter(|&c| c <= MAX_FACE_CELLS);
        let cells = cells.ok_or_else(|| {
            Error::Parameter(format!("cube face of radius {radius} in d={dim} too large"))
        })?;
        let modes = radius + 1;
        let big_m = (2 * radius + 2) as f64;
        let h = (radius + 1) as f64;

        // mode weights on the odd-mode grid
        let theta: Vec<f64> = (0..modes).map(|i| (2 * i + 1) as f64 * PI / big_m).collect();
        let one_d: Vec<f64> = theta.iter().map(|th| 2.0 - 2.0 * th.cos()).collect();
        let mut w = vec![0.0; modes.pow(t as u32)];
        let mut idx = vec![0usize; t];
        for slot in w.iter_mut() {
            let mu: f64 = idx.iter().map(|&i| one_d[i]).sum();
            let alpha = (1.0 + mu / 2.0).acosh();
            let x = alpha * h;
            // 1 / (2 cosh x), overflow free
            let e = (-x).exp();
            let sign = if idx.iter().map(|&i| i).sum::<usize>() % 2 == 0 { 1.0 } else { -1.0 };
            *slot = sign * e / (1.0 + e * e) / h.powi(t as i32);
            advance(&mut idx, modes);
        }

        // sin(k_i π n / M) for n = 1..=side
        let basis: Vec<f64> = (0..side)
            .flat_map(|p| {
                let n = (p + 1) as f64;
                theta.iter().map(move |th| (th * n).sin())
            })
            .collect();

        // transform axis by axis: shape goes from modes^t to side^t
        let mut cur = w;
        let mut shape = vec![modes; t];
        for axis in 0..t {
            let outer: usize = shape[..axis].iter().product();
            let inner: usize = shape[axis + 1..].iter().product();
            let mut next = vec![0.0; outer * side * inner];
            for o in 0..outer {
                for p in 0..side {
                    let row = &basis[p * modes..(p + 1) * modes];
                    let dst = &mut next[(o * side + p) * inner..(o * side + p + 1) * inner];
                    for (k, &b) in row.iter().enumerate() {
                        let src = &cur[(o * modes + k) * inner..(o * modes + k + 1) * inner];
                        for (d, s) in dst.iter_mut().zip(src) {
                            *d += b * s;
                        }
                    }
                }
            }
            cur = next;
            shape[axis] = side;
        }
        if t == 0 {
            // d = 1: a single face cell holding the full face mass
            cur = vec![cur[0]];
        }
        debug_assert_eq!(cur.len(), cells);
        let face_mass: f64 = cur.iter().sum();
        let mut face: Vec<f64> = cur.iter().map(|&p| p.max(0.0)).collect();
        let total: f64 = face.iter().sum();
        face.iter_mut().for_each(|p| *p /= total);
        let alias = WeightedAliasIndex::new(face.clone())
            .map_err(|e| Error::Parameter(format!("cube exit alias table: {e}")))?;
        Ok(Self {
            dim,
            radius,
            face,
            face_mass,
            alias,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Conditional exit law on one face.
    pub fn face_law(&self) -> &[f64] {
        &self.face
    }

    pub fn face_mass(&self) -> f64 {
        self.face_mass
    }

    /// Probability of leaving at `z` (with `|z|_∞ = m + 1` on exactly one
    /// axis), zero elsewhere.
    pub fn exit_probability(&self, z: &[i64]) -> f64 {
        let m = self.radius as i64;
        let on: Vec<usize> = (0..z.len()).filter(|&j| z[j].abs() == m + 1).collect();
        if on.len() != 1 || z.iter().any(|c| c.abs() > m + 1) {
            return 0.0;
        }
        let a = on[0];
        let side = 2 * self.radius + 1;
        let mut k = 0;
        for (j, &c) in z.iter().enumerate() {
            if j != a {
                k = k * side + (c + m) as usize;
            }
        }
        self.face[k] / (2 * self.dim) as f64
    }

    /// Moves `z` from the centre of the cube to a sampled exit point.
    #[inline]
    pub fn jump(&self, z: &mut [i64], rng: &mut Rng) {
        let d = self.dim;
        let face = rng.random_range(0..2 * d as u32) as usize;
        let a = face >> 1;
        let m = self.radius as i64;
        let side = 2 * self.radius + 1;
        let mut k = self.alias.sample(rng);
        for j in (0..d).rev() {
            if j == a {
                continue;
            }
            z[j] += (k % side) as i64 - m;
            k /= side;
        }
        z[a] += if face & 1 == 0 { m + 1 } else { -(m + 1) };
    }
}

fn advance(idx: &mut [usize], base: usize) {
    for v in idx.iter_mut().rev() {
        *v += 1;
        if *v < base {
            return;
        }
        *v = 0;
    }
}

fn law_cache() -> &'static Mutex<HashMap<(usize, usize), Arc<CubeExitLaw>>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<CubeExitLaw>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn cached_law(dim: usize, radius: usize) -> Arc<CubeExitLaw> {
    let mut cache = law_cache().lock().unwrap_or_else(|e| e.into_inner());
    cache
        .entry((dim, radius))
        .or_insert_with(|| Arc::new(CubeExitLaw::new(dim, radius).expect("planned radius")))
        .clone()
}

/// Jumps across the largest admissible tabulated cube. Laws are built on
/// first use and shared process wide.
#[derive(Clone)]
pub struct CubeJumper {
    dim: usize,
    radii: Vec<usize>,
    laws: Vec<OnceLock<Arc<CubeExitLaw>>>,
}

pub fn cube_jumper(dim: usize) -> CubeJumper {
    let radii: Vec<usize> = PLANNED_RADII
        .iter()
        .copied()
        .filter(|&m| {
            (2 * m + 1)
                .checked_pow(dim as u32 - 1)
                .is_some_and(|c| c <= MAX_FACE_CELLS)
        })
        .collect();
    let laws = radii.iter().map(|_| OnceLock::new()).collect();
    CubeJumper { dim, radii, laws }
}

impl CubeJumper {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn largest_radius(&self) -> usize {
        self.radii.last().copied().unwrap_or(0)
    }

    /// Replaces the walk's passage through `B(z, m)` by a single exit draw,
    /// with `m` the largest tabulated radius `<= max_radius`. Returns the
    /// radius used, or `None` when `max_radius < 1` (take a plain step).
    #[inline]
    pub fn jump(&self, z: &mut [i64], max_radius: usize, rng: &mut Rng) -> Option<usize> {
        let pos = self.radii.partition_point(|&m| m <= max_radius);
        if pos == 0 {
            return None;
        }
        let law = self.laws[pos - 1].get_or_init(|| cached_law(self.dim, self.radii[pos - 1]));
        law.jump(z, rng);
        Some(law.radius)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::linf_norm;
    use crate::rng::{stream_rng, Stream};

    /// Pushes probability mass through the cube until almost none is left,
    /// collecting what lands outside.
    fn brute_force_exit(d: usize, m: i64) -> HashMap<Vec<i64>, f64> {
        let mut mass: HashMap<Vec<i64>, f64> = HashMap::new();
        mass.insert(vec![0; d], 1.0);
        let mut exits: HashMap<Vec<i64>, f64> = HashMap::new();
        let p = 1.0 / (2 * d) as f64;
        loop {
            let total: f64 = mass.values().sum();
            if total < 1e-13 {
                break;
            }
            let mut next = HashMap::new();
            for (z, w) in mass {
                for j in 0..d {
                    for s in [-1, 1] {
                        let mut y = z.clone();
                        y[j] += s;
                        let slot = if linf_norm(&y) > m {
                            exits.entry(y).or_insert(0.0)
                        } else {
                            next.entry(y).or_insert(0.0)
                        };
                        *slot += w * p;
                    }
                }
            }
            mass = next;
        }
        exits
    }

    #[test]
    fn series_matches_mass_propagation() {
        for (d, m) in [(3, 1), (3, 2), (3, 3), (4, 1), (4, 2), (2, 3)] {
            let law = CubeExitLaw::new(d, m).unwrap();
            assert!((law.face_mass() - 1.0 / (2 * d) as f64).abs() < 1e-10);
            let exits = brute_force_exit(d, m as i64);
            for (z, p) in &exits {
                let q = law.exit_probability(z);
                assert!((p - q).abs() < 1e-10, "d={d} m={m} z={z:?}: {p} vs {q}");
            }
            let covered: f64 = exits.keys().map(|z| law.exit_probability(z)).sum();
            assert!((covered - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn large_faces_are_normalized() {
        let law = CubeExitLaw::new(3, 64).unwrap();
        assert!((law.face_mass() - 1.0 / 6.0).abs() < 1e-9);
        let law = CubeExitLaw::new(5, 8).unwrap();
        assert!((law.face_mass() - 0.1).abs() < 1e-9);
        assert!(law.face_law().iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn jumps_land_on_the_cube_boundary() {
        let j = cube_jumper(3);
        let mut rng = stream_rng(9, Stream::LatticeWalk, 0);
        for max in [0, 1, 5, 40, 1000] {
            let mut z = vec![10, -3, 7];
            match j.jump(&mut z, max, &mut rng) {
                None => assert_eq!(max, 0),
                Some(m) => {
                    assert!(m <= max);
                    let dz = [z[0] - 10, z[1] + 3, z[2] - 7];
                    assert_eq!(linf_norm(&dz), m as i64 + 1);
                }
            }
        }
        assert_eq!(j.largest_radius(), 256);
        assert_eq!(cube_jumper(4).largest_radius(), 48);
    }

    #[test]
    fn sampled_faces_follow_the_law() {
        let law = CubeExitLaw::new(3, 2).unwrap();
        let mut rng = stream_rng(5, Stream::LatticeWalk, 1);
        let n = 200_000;
        let mut counts: HashMap<Vec<i64>, u64> = HashMap::new();
        for _ in 0..n {
            let mut z = vec![0, 0, 0];
            law.jump(&mut z, &mut rng);
            *counts.entry(z).or_default() += 1;
        }
        for (z, c) in counts {
            let p = law.exit_probability(&z);
            let f = c as f64 / n as f64;
            let sd = (p * (1.0 - p) / n as f64).sqrt();
            assert!((f - p).abs() < 5.0 * sd + 1e-9, "{z:?}: {f} vs {p}");
        }
    }
}
