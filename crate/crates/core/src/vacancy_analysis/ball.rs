use super::line_bases;
use crate::error::Result;
use crate::lattice::TorusGeometry;
use crate::walk_engine::OccupancyGrid;

/// L∞ dilation of `mask` by `radius` on the torus: a cell is set when some
/// set cell lies within distance `radius`. Separable circular sliding window,
/// one pass per axis.
pub fn dilate(geometry: &TorusGeometry, mask: &[bool], radius: usize) -> Vec<bool> {
    let n = geometry.side();
    let mut cur = mask.to_vec();
    if radius == 0 {
        return cur;
    }
    let mut line = vec![false; n];
    let mut prefix = vec![0u32; 2 * n + 1];
    for dir in 0..geometry.dim() {
        let s = geometry.stride(dir);
        let bases: Vec<usize> = line_bases(geometry, dir).collect();
        for base in bases {
            for (k, v) in line.iter_mut().enumerate() {
                *v = cur[base + k * s];
            }
            if 2 * radius + 1 >= n {
                let any = line.iter().any(|&v| v);
                for k in 0..n {
                    cur[base + k * s] = any;
                }
                continue;
            }
            for k in 0..2 * n {
                prefix[k + 1] = prefix[k] + line[k % n] as u32;
            }
            for k in 0..n {
                // window [k - r, k + r] shifted by n into [0, 2n)
                let lo = k + n - radius;
                let hi = k + n + radius + 1;
                let count = if hi <= 2 * n {
                    prefix[hi] - prefix[lo]
                } else {
                    prefix[2 * n] - prefix[lo] + prefix[hi - 2 * n]
                };
                cur[base + k * s] = count > 0;
            }
        }
    }
    cur
}

/// L∞ erosion: a cell stays set when its whole ball of radius `radius` is set.
pub fn erode(geometry: &TorusGeometry, mask: &[bool], radius: usize) -> Vec<bool> {
    let inv: Vec<bool> = mask.iter().map(|&b| !b).collect();
    dilate(geometry, &inv, radius).into_iter().map(|b| !b).collect()
}

/// Largest `m` such that some L∞ ball of radius `m` is entirely vacant at
/// time `t`, and 0 when there is none. Equivalently, the largest distance
/// from a cell to the visited set, minus one. Binary search over `m` with
/// an erosion test, `O(d N^d log N)`.
pub fn largest_vacant_ball(grid: &OccupancyGrid, t: u64) -> Result<usize> {
    grid.check_time(t)?;
    let geom = grid.geometry();
    let vacant = grid.vacant_mask(t);
    if !vacant.iter().any(|&v| v) {
        return Ok(0);
    }
    let fits = |m: usize| erode(geom, &vacant, m).iter().any(|&b| b);
    // balls of radius > (N-1)/2 would overlap themselves
    let (mut lo, mut hi) = (0usize, (geom.side() - 1) / 2);
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Ok(lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::linf_dist_coords;

    fn brute_dilate(g: &TorusGeometry, mask: &[bool], r: usize) -> Vec<bool> {
        (0..g.cell_count())
            .map(|i| {
                let p = g.point_at(i);
                (0..g.cell_count())
                    .any(|j| mask[j] && linf_dist_coords(p.coords(), g.point_at(j).coords(), g.side()) <= r)
            })
            .collect()
    }

    #[test]
    fn dilation_matches_brute_force() {
        let g = TorusGeometry::new(3, 7).unwrap();
        let mask: Vec<bool> = (0..g.cell_count()).map(|i| (i * 7919) % 53 == 0).collect();
        for r in 0..5 {
            assert_eq!(dilate(&g, &mask, r), brute_dilate(&g, &mask, r), "r={r}");
        }
    }

    #[test]
    fn single_visited_cell() {
        let g = TorusGeometry::new(3, 9).unwrap();
        let mut vis = vec![false; 729];
        vis[0] = true;
        let grid = OccupancyGrid::from_visited_mask(g, &vis).unwrap();
        assert_eq!(largest_vacant_ball(&grid, 0).unwrap(), 3);
    }

    #[test]
    fn fully_visited_is_zero() {
        let g = TorusGeometry::new(3, 5).unwrap();
        let grid = OccupancyGrid::from_visited_mask(g, &[true; 125]).unwrap();
        assert_eq!(largest_vacant_ball(&grid, 0).unwrap(), 0);
    }
}
