//! Geometry of the vacant set read off an [`OccupancyGrid`] at a query time.

mod ball;
mod components;
mod coverage;
mod events;
mod local;

pub use ball::{dilate, erode, largest_vacant_ball};
pub use components::{vacant_components, VacantComponents};
pub use coverage::{coverage_curve, coverage_probability, is_planar, CoverageEstimate};
pub use events::{
    axis_run_threshold, connects_to_sphere, detect_c, detect_g, detect_g_with, detect_u, detect_v,
    longest_axis_run, EventReport, GParams, GiantStats, UReport, VReport, VWitness,
};
pub(crate) use events::v_geometry;
pub use local::{gamma_tilde, local_function_average, GammaTilde, LocalFunctionSpec, LocalSelector};

use crate::lattice::TorusGeometry;
use crate::walk_engine::OccupancyGrid;

/// Fraction of cells still vacant at time `t`.
pub fn vacant_fraction(grid: &OccupancyGrid, t: u64) -> crate::Result<f64> {
    grid.check_time(t)?;
    let cells = grid.geometry().cell_count();
    Ok((cells - grid.visited_count(t)) as f64 / cells as f64)
}

/// Linear indices of the cells with coordinate 0 along `direction`, i.e. the
/// starting cells of every line in that direction.
pub(crate) fn line_bases(geometry: &TorusGeometry, direction: usize) -> impl Iterator<Item = usize> + '_ {
    let stride = geometry.stride(direction);
    let n = geometry.side();
    (0..geometry.cell_count()).filter(move |&i| (i / stride) % n == 0)
}

/// Calls `f` with each of the `2d` torus neighbours of cell `index`.
#[inline]
pub(crate) fn for_each_neighbor(geometry: &TorusGeometry, index: usize, mut f: impl FnMut(usize)) {
    let n = geometry.side();
    for j in 0..geometry.dim() {
        let s = geometry.stride(j);
        let c = (index / s) % n;
        f(if c + 1 == n { index - (n - 1) * s } else { index + s });
        f(if c == 0 { index + (n - 1) * s } else { index - s });
    }
}

/// `floor(x)` with values within `1e-9` of an integer snapped to it, so that
/// e.g. `0.5 * ln(e^2)` or `64^0.5` land on the intended integer.
pub(crate) fn snapped_floor(x: f64) -> usize {
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r.max(0.0) as usize
    } else {
        x.floor().max(0.0) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk_engine::{run_walk, WalkConfig};

    #[test]
    fn fraction_at_time_zero_and_monotone() {
        let c = WalkConfig::new(TorusGeometry::new(3, 10).unwrap(), 1.0, 4, 0);
        let g = run_walk(&c, &mut []).unwrap();
        assert_eq!(vacant_fraction(&g, 0).unwrap(), 999.0 / 1000.0);
        let mut prev = 1.0;
        for t in (0..=g.total_steps()).step_by(50) {
            let f = vacant_fraction(&g, t).unwrap();
            assert!(f <= prev);
            prev = f;
        }
        assert!(vacant_fraction(&g, g.total_steps() + 1).is_err());
    }

    #[test]
    fn neighbours_wrap() {
        let g = TorusGeometry::new(3, 4).unwrap();
        let mut out = Vec::new();
        for_each_neighbor(&g, 0, |i| out.push(g.point_at(i).as_i64()));
        out.sort();
        assert_eq!(
            out,
            vec![vec![0, 0, 1], vec![0, 0, 3], vec![0, 1, 0], vec![0, 3, 0], vec![1, 0, 0], vec![3, 0, 0]]
        );
        assert_eq!(line_bases(&g, 1).count(), 16);
        assert_eq!(snapped_floor(64f64.powf(0.5)), 8);
        assert_eq!(snapped_floor(2.9999999999), 3);
        assert_eq!(snapped_floor(2.7), 2);
    }
}
