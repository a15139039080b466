use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use torus_vacant::error::Error;
use torus_vacant::lattice::{Sign, TorusGeometry};
use torus_vacant::rng::{stream_rng, Stream};
use torus_vacant::walk_engine::{
    excursion_schedule, observe_walk, run_walk, run_zd_walk, HitSet, LinfBox, OccupancyGrid, PathRecorder,
    StartRule, StopReason, StopRule, WalkConfig, NEVER,
};

fn recorded(cfg: &WalkConfig) -> (OccupancyGrid, Vec<usize>) {
    let mut rec = PathRecorder::for_config(cfg, 1_000_000).unwrap();
    let grid = run_walk(cfg, &mut [&mut rec]).unwrap();
    (grid, rec.cells)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn path_is_nearest_neighbour_and_first_visits_agree(
        d in 1usize..=4, n in 3usize..=7, u in 0.0f64..1.5, seed in any::<u64>(),
    ) {
        let g = TorusGeometry::with_any_dim(d, n).unwrap();
        let cfg = WalkConfig::new(g.clone(), u, seed, 0);
        let (grid, path) = recorded(&cfg);
        prop_assert_eq!(path.len() as u64, grid.total_steps() + 1);
        for w in path.windows(2) {
            prop_assert_eq!(g.linf_dist(&g.point_at(w[0]), &g.point_at(w[1])), 1);
        }
        let mut first = vec![NEVER; g.cell_count()];
        for (t, &i) in path.iter().enumerate() {
            if first[i] == NEVER {
                first[i] = t as u32;
            }
        }
        prop_assert_eq!(grid.first_visit(), &first[..]);
    }

    #[test]
    fn visited_count_is_monotone(seed in any::<u64>(), u in 0.1f64..2.0) {
        let g = TorusGeometry::new(3, 6).unwrap();
        let grid = run_walk(&WalkConfig::new(g, u, seed, 0), &mut []).unwrap();
        let horizon = grid.total_steps();
        let counts: Vec<usize> = (0..=horizon).step_by(7).map(|t| grid.visited_count(t)).collect();
        prop_assert!(counts.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(grid.check_time(horizon + 1).is_err());
    }

    #[test]
    fn same_seed_same_grid_distinct_replicas_differ(seed in any::<u64>()) {
        let g = TorusGeometry::new(3, 8).unwrap();
        let a = run_walk(&WalkConfig::new(g.clone(), 0.5, seed, 3), &mut []).unwrap();
        let b = run_walk(&WalkConfig::new(g.clone(), 0.5, seed, 3), &mut []).unwrap();
        let c = run_walk(&WalkConfig::new(g, 0.5, seed, 4), &mut []).unwrap();
        prop_assert_eq!(a.first_visit(), b.first_visit());
        prop_assert_ne!(a.first_visit(), c.first_visit());
    }

    #[test]
    fn grid_file_round_trip(seed in any::<u64>(), replica in 0u64..100) {
        let g = TorusGeometry::new(3, 9).unwrap();
        let grid = run_walk(&WalkConfig::new(g, 0.7, seed, replica), &mut []).unwrap();
        let mut bytes = Vec::new();
        grid.write_to(&mut bytes).unwrap();
        let back = OccupancyGrid::read_from(&bytes[..]).unwrap();
        prop_assert_eq!(back.first_visit(), grid.first_visit());
        prop_assert_eq!(back.total_steps(), grid.total_steps());
        prop_assert_eq!(back.seed(), seed);
        prop_assert_eq!(back.replica_index(), replica);
    }

    #[test]
    fn schedules_alternate(seed in any::<u64>(), l in 0usize..2, extra in 1usize..3) {
        let g = TorusGeometry::with_any_dim(2, 12).unwrap();
        let cfg = WalkConfig::new(g.clone(), 1.0, seed, 0).with_start(StartRule::Fixed(vec![0, 0]));
        let (_, cells) = recorded(&cfg);
        let path: Vec<_> = cells.iter().map(|&i| g.point_at(i)).collect();
        let c = g.point(&[6, 6]).unwrap();
        let s = excursion_schedule(&g, &path, &LinfBox::new(c.clone(), l), &LinfBox::new(c, l + extra), true).unwrap();
        prop_assert!(s.returns.len() == s.departures.len() + usize::from(s.open));
        for (k, &dep) in s.departures.iter().enumerate() {
            prop_assert!(s.returns[k] < dep);
            if k + 1 < s.returns.len() {
                prop_assert!(dep < s.returns[k + 1]);
            }
        }
        let last = s.last_visits.as_ref().unwrap();
        for (k, &lv) in last.iter().enumerate() {
            prop_assert!(s.returns[k] <= lv && lv < s.departures[k]);
        }
        let end = path.len() as u64 - 1;
        let counts = s.counts_at(end);
        prop_assert_eq!(counts.completed as usize, s.departures.len());
        prop_assert_eq!(counts.open, u64::from(s.open));
    }
}

#[test]
fn step_directions_are_uniform() {
    // chi-squared goodness of fit over the 2d step directions
    let g = TorusGeometry::new(3, 11).unwrap();
    let cfg = WalkConfig::new(g.clone(), 0.1, 77, 0);
    let (_, path) = recorded(&cfg);
    let mut counts = [0f64; 6];
    for w in path.windows(2) {
        let (a, b) = (g.point_at(w[0]), g.point_at(w[1]));
        let dir = (0..3).find(|&j| a.coords()[j] != b.coords()[j]).unwrap();
        let plus = g.step(&a, dir, Sign::Plus).unwrap() == b;
        counts[2 * dir + usize::from(!plus)] += 1.0;
    }
    let total: f64 = counts.iter().sum();
    let chi2: f64 = counts.iter().map(|c| (c - total / 6.0).powi(2) / (total / 6.0)).sum();
    let p = 1.0 - ChiSquared::new(5.0).unwrap().cdf(chi2);
    assert!(p > 1e-4, "chi2 {chi2}, p {p}");
}

#[test]
fn observe_walk_matches_run_walk() {
    let g = TorusGeometry::new(3, 7).unwrap();
    let cfg = WalkConfig::new(g, 0.8, 5, 2);
    let (_, a) = recorded(&cfg);
    let mut rec = PathRecorder::for_config(&cfg, 1_000_000).unwrap();
    observe_walk(&cfg, &mut [&mut rec]).unwrap();
    assert_eq!(a, rec.cells);
}

#[test]
fn zd_walk_stop_rules() {
    let mut rng = stream_rng(3, Stream::LatticeWalk, 0);
    let out = run_zd_walk(&[0, 0, 0], &StopRule::new(1_000_000).exiting(5), &mut rng, true).unwrap();
    assert_eq!(out.reason, StopReason::Exited);
    assert_eq!(out.end.iter().map(|c| c.abs()).max().unwrap(), 6);
    assert_eq!(out.path.unwrap().len() as u64, out.steps + 1);

    let rule = StopRule::new(1).hitting(HitSet::Box(0)).strict();
    let out = run_zd_walk(&[0, 0, 0], &rule, &mut rng, false).unwrap();
    assert_eq!(out.reason, StopReason::MaxSteps);
}

#[test]
fn bad_grid_bytes_are_format_errors() {
    let err = OccupancyGrid::read_from(&b"NOTAGRID\x01"[..]).unwrap_err();
    assert!(matches!(err, Error::Format(_)));
    let err = OccupancyGrid::read_from(&b"TV"[..]).unwrap_err();
    assert!(matches!(err, Error::Format(_)));
}

#[test]
fn zero_time_visits_only_the_start() {
    let g = TorusGeometry::new(4, 5).unwrap();
    let cfg = WalkConfig::new(g.clone(), 0.0, 1, 0).with_start(StartRule::Fixed(vec![1, 2, 3, 4]));
    let grid = run_walk(&cfg, &mut []).unwrap();
    assert_eq!(grid.visited_count(0), 1);
    assert!(grid.is_visited(g.index_of(&[1, 2, 3, 4]), 0));
}
