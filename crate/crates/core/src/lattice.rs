//! Torus and `Z^d` geometry.
//!
//! Cells of the torus `(Z/NZ)^d` are addressed either by a [`TorusPoint`]
//! or by a linear index in row-major order with the last coordinate
//! varying fastest. Every file format in this crate uses that order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest cell count accepted for a torus; first-visit times and labels
/// are stored in 32-bit slots.
pub const MAX_CELLS: usize = u32::MAX as usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_i32(s: i32) -> Option<Self> {
        match s {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }
}

/// Dimension and side length of a discrete torus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGeometry", into = "RawGeometry")]
pub struct TorusGeometry {
    dim: usize,
    side: usize,
    strides: Vec<usize>,
    cells: usize,
}

#[derive(Serialize, Deserialize)]
struct RawGeometry {
    d: usize,
    n: usize,
}

impl TryFrom<RawGeometry> for TorusGeometry {
    type Error = Error;
    fn try_from(raw: RawGeometry) -> Result<Self> {
        TorusGeometry::new(raw.d, raw.n)
    }
}

impl From<TorusGeometry> for RawGeometry {
    fn from(g: TorusGeometry) -> Self {
        RawGeometry { d: g.dim, n: g.side }
    }
}

impl TorusGeometry {
    pub fn new(dim: usize, side: usize) -> Result<Self> {
        if dim < 3 {
            return Err(Error::Geometry(format!("dimension {dim} < 3")));
        }
        Self::with_any_dim(dim, side)
    }

    /// Same as [`TorusGeometry::new`] without the `d >= 3` requirement.
    /// Used for lower-dimensional auxiliary tori (planes, projected walks).
    pub fn with_any_dim(dim: usize, side: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Geometry("dimension 0".into()));
        }
        if side < 2 {
            return Err(Error::Geometry(format!("side length {side} < 2")));
        }
        let cells = (0..dim)
            .try_fold(1usize, |acc, _| acc.checked_mul(side))
            .filter(|&c| c <= MAX_CELLS)
            .ok_or_else(|| Error::Geometry(format!("{side}^{dim} cells overflow the 32-bit index")))?;
        let mut strides = vec![1usize; dim];
        for j in (0..dim - 1).rev() {
            strides[j] = strides[j + 1] * side;
        }
        Ok(Self {
            dim,
            side,
            strides,
            cells,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn cell_count(&self) -> usize {
        self.cells
    }

    /// Linear-index offset of a unit move along `direction`.
    pub fn stride(&self, direction: usize) -> usize {
        self.strides[direction]
    }

    pub fn point(&self, coords: &[i64]) -> Result<TorusPoint> {
        if coords.len() != self.dim {
            return Err(Error::Geometry(format!(
                "point has {} coordinates, torus has dimension {}",
                coords.len(),
                self.dim
            )));
        }
        let n = self.side as i64;
        Ok(TorusPoint(
            coords.iter().map(|&c| c.rem_euclid(n) as usize).collect(),
        ))
    }

    pub fn origin(&self) -> TorusPoint {
        TorusPoint(vec![0; self.dim])
    }

    pub fn index(&self, p: &TorusPoint) -> usize {
        self.index_of(&p.0)
    }

    /// Linear index of already-reduced coordinates.
    pub fn index_of(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .zip(&self.strides)
            .map(|(&c, &s)| c * s)
            .sum()
    }

    pub fn point_at(&self, index: usize) -> TorusPoint {
        let mut coords = vec![0; self.dim];
        self.coords_into(index, &mut coords);
        TorusPoint(coords)
    }

    pub fn coords_into(&self, mut index: usize, out: &mut [usize]) {
        for j in (0..self.dim).rev() {
            out[j] = index % self.side;
            index /= self.side;
        }
    }

    pub fn step(&self, p: &TorusPoint, direction: usize, sign: Sign) -> Result<TorusPoint> {
        if direction >= self.dim {
            return Err(Error::Direction {
                direction,
                dim: self.dim,
            });
        }
        let mut q = p.clone();
        let c = &mut q.0[direction];
        *c = match sign {
            Sign::Plus => (*c + 1) % self.side,
            Sign::Minus => (*c + self.side - 1) % self.side,
        };
        Ok(q)
    }

    pub fn linf_dist(&self, p: &TorusPoint, q: &TorusPoint) -> usize {
        linf_dist_coords(&p.0, &q.0, self.side)
    }

    /// Signed displacement `q - p` with each coordinate taken in
    /// `(-N/2, N/2]`, the representative of smallest magnitude.
    pub fn displacement(&self, p: &[usize], q: &[usize]) -> Vec<i64> {
        p.iter()
            .zip(q)
            .map(|(&a, &b)| wrap_signed(b as i64 - a as i64, self.side))
            .collect()
    }

    fn check_radius(&self, radius: usize) -> Result<()> {
        if 2 * radius + 1 > self.side {
            return Err(Error::BallTooLarge {
                radius,
                side: self.side,
            });
        }
        Ok(())
    }

    /// Closed L∞ ball on the torus.
    pub fn ball(&self, center: &TorusPoint, radius: usize) -> Result<Vec<TorusPoint>> {
        self.check_radius(radius)?;
        let c: Vec<i64> = center.0.iter().map(|&x| x as i64).collect();
        ball_zd(&c, radius)
            .into_iter()
            .map(|z| self.point(&z))
            .collect()
    }

    /// L∞ sphere `S(center, radius)` on the torus.
    pub fn sphere(&self, center: &TorusPoint, radius: usize) -> Result<Vec<TorusPoint>> {
        self.check_radius(radius)?;
        let c: Vec<i64> = center.0.iter().map(|&x| x as i64).collect();
        sphere_zd(&c, radius)
            .into_iter()
            .map(|z| self.point(&z))
            .collect()
    }

    /// All canonical axis lines: `d * N^(d-1)` of them.
    pub fn lines(&self) -> Vec<AxisLine> {
        let mut out = Vec::with_capacity(self.dim * self.cells / self.side);
        for direction in 0..self.dim {
            for idx in 0..self.cells {
                let p = self.point_at(idx);
                if p.0[direction] == 0 {
                    out.push(AxisLine { base: p, direction });
                }
            }
        }
        out
    }

    /// All canonical coordinate planes: `C(d,2) * N^(d-2)` of them.
    pub fn planes(&self) -> Vec<CoordinatePlane> {
        let mut out = Vec::new();
        for a in 0..self.dim {
            for b in a + 1..self.dim {
                for idx in 0..self.cells {
                    let p = self.point_at(idx);
                    if p.0[a] == 0 && p.0[b] == 0 {
                        out.push(CoordinatePlane {
                            base: p,
                            directions: (a, b),
                        });
                    }
                }
            }
        }
        out
    }

    /// Linear indices of the cells of `line`, in order along its direction.
    pub fn line_cells(&self, line: &AxisLine) -> Vec<usize> {
        let base = self.index(&line.base);
        let s = self.strides[line.direction];
        (0..self.side).map(|k| base + k * s).collect()
    }

    /// Linear indices of the cells of `plane`; entry `i * N + j` is the cell
    /// at offset `i` along the first direction and `j` along the second.
    pub fn plane_cells(&self, plane: &CoordinatePlane) -> Vec<usize> {
        let base = self.index(&plane.base);
        let (a, b) = plane.directions;
        let (sa, sb) = (self.strides[a], self.strides[b]);
        let mut out = Vec::with_capacity(self.side * self.side);
        for i in 0..self.side {
            for j in 0..self.side {
                out.push(base + i * sa + j * sb);
            }
        }
        out
    }
}

/// A cell of the torus; coordinates are always reduced modulo `N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TorusPoint(Vec<usize>);

impl TorusPoint {
    pub fn coords(&self) -> &[usize] {
        &self.0
    }

    pub fn as_i64(&self) -> Vec<i64> {
        self.0.iter().map(|&c| c as i64).collect()
    }
}

/// An axis-parallel line of the torus in canonical form (base coordinate
/// along `direction` is zero).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AxisLine {
    base: TorusPoint,
    direction: usize,
}

impl AxisLine {
    pub fn through(geometry: &TorusGeometry, p: &TorusPoint, direction: usize) -> Result<Self> {
        if direction >= geometry.dim() {
            return Err(Error::Direction {
                direction,
                dim: geometry.dim(),
            });
        }
        let mut base = p.clone();
        base.0[direction] = 0;
        Ok(Self { base, direction })
    }

    pub fn base(&self) -> &TorusPoint {
        &self.base
    }

    pub fn direction(&self) -> usize {
        self.direction
    }
}

/// A coordinate plane of the torus in canonical form (base coordinates
/// along both directions are zero, directions stored in increasing order).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoordinatePlane {
    base: TorusPoint,
    directions: (usize, usize),
}

impl CoordinatePlane {
    pub fn through(
        geometry: &TorusGeometry,
        p: &TorusPoint,
        first: usize,
        second: usize,
    ) -> Result<Self> {
        let d = geometry.dim();
        if first >= d || second >= d {
            return Err(Error::Direction {
                direction: first.max(second),
                dim: d,
            });
        }
        if first == second {
            return Err(Error::Parameter("plane directions must differ".into()));
        }
        let (a, b) = if first < second {
            (first, second)
        } else {
            (second, first)
        };
        let mut base = p.clone();
        base.0[a] = 0;
        base.0[b] = 0;
        Ok(Self {
            base,
            directions: (a, b),
        })
    }

    pub fn base(&self) -> &TorusPoint {
        &self.base
    }

    pub fn directions(&self) -> (usize, usize) {
        self.directions
    }

    pub fn contains(&self, p: &TorusPoint) -> bool {
        let (a, b) = self.directions;
        p.0.iter()
            .zip(&self.base.0)
            .enumerate()
            .all(|(j, (x, y))| j == a || j == b || x == y)
    }
}

/// Circular distance between two residues modulo `n`.
#[inline]
pub fn circular_dist(a: usize, b: usize, n: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(n - d)
}

#[inline]
pub fn linf_dist_coords(p: &[usize], q: &[usize], n: usize) -> usize {
    p.iter()
        .zip(q)
        .map(|(&a, &b)| circular_dist(a, b, n))
        .max()
        .unwrap_or(0)
}

/// Representative of `x mod n` in `(-n/2, n/2]`.
#[inline]
pub fn wrap_signed(x: i64, n: usize) -> i64 {
    let n = n as i64;
    let r = x.rem_euclid(n);
    if 2 * r > n {
        r - n
    } else {
        r
    }
}

/// Length minus one of the shortest circular window covering every
/// occupied residue; 0 for an empty set.
pub fn circular_extent(occupied: &[bool]) -> usize {
    let n = occupied.len();
    let Some(first) = occupied.iter().position(|&o| o) else {
        return 0;
    };
    // longest circular run of unoccupied residues
    let mut longest = 0;
    let mut run = 0;
    for k in 1..=n {
        if occupied[(first + k) % n] {
            longest = longest.max(run);
            run = 0;
        } else {
            run += 1;
        }
    }
    n - longest - 1
}

/// Wrap-aware L∞ diameter of a set of cells lying in `plane`: the larger of
/// the two per-axis circular covering extents.
pub fn plane_diameter(
    geometry: &TorusGeometry,
    plane: &CoordinatePlane,
    cells: &[TorusPoint],
) -> Result<usize> {
    let n = geometry.side();
    let (a, b) = plane.directions();
    let mut occ_a = vec![false; n];
    let mut occ_b = vec![false; n];
    for p in cells {
        if !plane.contains(p) {
            return Err(Error::NotPlanar);
        }
        occ_a[p.0[a]] = true;
        occ_b[p.0[b]] = true;
    }
    Ok(circular_extent(&occ_a).max(circular_extent(&occ_b)))
}

pub fn linf_norm(z: &[i64]) -> i64 {
    z.iter().map(|c| c.abs()).max().unwrap_or(0)
}

/// Closed L∞ ball of `Z^d` (any dimension), in lexicographic order.
pub fn ball_zd(center: &[i64], radius: usize) -> Vec<Vec<i64>> {
    let r = radius as i64;
    let d = center.len();
    let width = 2 * radius + 1;
    let total = width.pow(d as u32);
    let mut out = Vec::with_capacity(total);
    let mut offset = vec![-r; d];
    for _ in 0..total {
        out.push(center.iter().zip(&offset).map(|(c, o)| c + o).collect());
        for j in (0..d).rev() {
            if offset[j] < r {
                offset[j] += 1;
                break;
            }
            offset[j] = -r;
        }
    }
    out
}

/// L∞ sphere of `Z^d`.
pub fn sphere_zd(center: &[i64], radius: usize) -> Vec<Vec<i64>> {
    ball_zd(center, radius)
        .into_iter()
        .filter(|z| {
            z.iter()
                .zip(center)
                .map(|(a, b)| (a - b).unsigned_abs() as usize)
                .max()
                .unwrap_or(0)
                == radius
        })
        .collect()
}
