use proptest::prelude::*;
use torus_vacant::lattice::{
    ball_zd, circular_dist, circular_extent, linf_dist_coords, sphere_zd, wrap_signed, Sign, TorusGeometry,
};

fn geometry() -> impl Strategy<Value = TorusGeometry> {
    (1usize..=4, 2usize..=9).prop_map(|(d, n)| TorusGeometry::with_any_dim(d, n).unwrap())
}

fn geometry_and_cell() -> impl Strategy<Value = (TorusGeometry, usize)> {
    geometry().prop_flat_map(|g| {
        let c = g.cell_count();
        (Just(g), 0..c)
    })
}

proptest! {
    #[test]
    fn index_round_trip((g, i) in geometry_and_cell()) {
        let p = g.point_at(i);
        prop_assert_eq!(g.index(&p), i);
        prop_assert_eq!(g.index_of(p.coords()), i);
        let shifted: Vec<i64> = p.as_i64().iter().map(|&c| c + 3 * g.side() as i64).collect();
        prop_assert_eq!(g.point(&shifted).unwrap(), p);
    }

    #[test]
    fn steps_are_inverse((g, i) in geometry_and_cell(), dir in 0usize..4) {
        let dir = dir % g.dim();
        let p = g.point_at(i);
        let q = g.step(&p, dir, Sign::Plus).unwrap();
        prop_assert_eq!(g.linf_dist(&p, &q), 1);
        prop_assert_eq!(g.step(&q, dir, Sign::Minus).unwrap(), p);
    }

    #[test]
    fn torus_metric_axioms((g, i) in geometry_and_cell(), j in 0usize..10_000, k in 0usize..10_000) {
        let c = g.cell_count();
        let (p, q, r) = (g.point_at(i), g.point_at(j % c), g.point_at(k % c));
        prop_assert_eq!(g.linf_dist(&p, &q), g.linf_dist(&q, &p));
        prop_assert!(g.linf_dist(&p, &r) <= g.linf_dist(&p, &q) + g.linf_dist(&q, &r));
        prop_assert!(g.linf_dist(&p, &q) <= g.side() / 2);
        prop_assert_eq!(g.linf_dist(&p, &q), linf_dist_coords(p.coords(), q.coords(), g.side()));
    }

    #[test]
    fn ball_and_sphere_sizes((g, i) in geometry_and_cell(), r in 0usize..4) {
        prop_assume!(2 * r + 1 <= g.side());
        let p = g.point_at(i);
        let ball = g.ball(&p, r).unwrap();
        prop_assert_eq!(ball.len(), (2 * r + 1).pow(g.dim() as u32));
        prop_assert!(ball.iter().all(|q| g.linf_dist(&p, q) <= r));
        let sphere = g.sphere(&p, r).unwrap();
        prop_assert!(sphere.iter().all(|q| g.linf_dist(&p, q) == r));
        let inner = if r == 0 { 0 } else { (2 * r - 1).pow(g.dim() as u32) };
        prop_assert_eq!(sphere.len(), ball.len() - inner);
    }

    #[test]
    fn zd_balls_match_counts(d in 1usize..=4, r in 0usize..4) {
        let b = ball_zd(&vec![0; d], r);
        prop_assert_eq!(b.len(), (2 * r + 1).pow(d as u32));
        let s = sphere_zd(&vec![0; d], r);
        prop_assert!(s.iter().all(|z| z.iter().map(|c| c.abs()).max().unwrap() == r as i64));
    }

    #[test]
    fn wrap_signed_is_a_representative(x in -1000i64..1000, n in 2usize..20) {
        let w = wrap_signed(x, n);
        prop_assert!(w.unsigned_abs() as usize <= n / 2);
        prop_assert_eq!((x - w).rem_euclid(n as i64), 0);
    }

    #[test]
    fn circular_extent_is_brute_force(occ in proptest::collection::vec(any::<bool>(), 2..16)) {
        let n = occ.len();
        let set: Vec<usize> = (0..n).filter(|&i| occ[i]).collect();
        let brute = if set.is_empty() {
            0
        } else {
            (1..=n)
                .find(|&w| (0..n).any(|s| set.iter().all(|&v| (v + n - s) % n < w)))
                .unwrap() - 1
        };
        prop_assert_eq!(circular_extent(&occ), brute);
    }
}

#[test]
fn lines_and_planes_partition_the_torus() {
    let g = TorusGeometry::new(3, 5).unwrap();
    let lines = g.lines();
    assert_eq!(lines.len(), 3 * 25);
    for dir in 0..3 {
        let mut seen = vec![0; g.cell_count()];
        for l in lines.iter().filter(|l| l.direction() == dir) {
            for i in g.line_cells(l) {
                seen[i] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
    }
    let planes = g.planes();
    assert_eq!(planes.len(), 3 * 5);
    for p in &planes {
        let cells = g.plane_cells(p);
        assert_eq!(cells.len(), 25);
        assert!(cells.iter().all(|&i| p.contains(&g.point_at(i))));
    }
    assert_eq!(circular_dist(0, 4, 5), 1);
}

#[test]
fn bad_geometry_is_rejected() {
    assert!(TorusGeometry::new(0, 5).is_err());
    assert!(TorusGeometry::new(3, 1).is_err());
    assert!(TorusGeometry::new(2, 5).is_err());
    assert!(TorusGeometry::with_any_dim(0, 5).is_err());
    let g = TorusGeometry::with_any_dim(2, 5).unwrap();
    assert!(g.point(&[1]).is_err());
    assert!(g.step(&g.origin(), 2, Sign::Plus).is_err());
}
