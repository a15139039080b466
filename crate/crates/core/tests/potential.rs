use proptest::prelude::*;
use torus_vacant::potential_theory::{
    box_boundary, constants_row, escape_bias_bound, harmonic_measure, ie0, integrate, orbit_key,
    q_n_finite, q_nu, q_nu_asymptotic, q_nu_quadrature, q_path_probability, q_truncated_exact, sample_q,
    star_saw_count, DEFAULT_TOLERANCE, MAX_SAW_LENGTH,
};

/// `e^{-x} I_0(x)` from the power series, summed in log space.
fn ie0_series(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut log_term = -x;
    for k in 0..2000u32 {
        if k > 0 {
            let kf = k as f64;
            log_term += 2.0 * (x / 2.0).ln() - 2.0 * kf.ln();
        }
        let t = log_term.exp();
        sum += t;
        if k as f64 > x && t < 1e-18 * sum {
            break;
        }
    }
    sum
}

/// Self-avoiding paths on Z^2 with the eight king moves, by plain
/// recursion over a coordinate list.
fn brute_star_saw(n: usize) -> u64 {
    fn rec(path: &mut Vec<(i64, i64)>, left: usize) -> u64 {
        if left == 0 {
            return 1;
        }
        let (x, y) = *path.last().unwrap();
        let mut total = 0;
        for dx in -1..=1 {
            for dy in -1..=1 {
                let next = (x + dx, y + dy);
                if (dx, dy) != (0, 0) && !path.contains(&next) {
                    path.push(next);
                    total += rec(path, left - 1);
                    path.pop();
                }
            }
        }
        total
    }
    rec(&mut vec![(0, 0)], n)
}

#[test]
fn bessel_matches_series() {
    for x in [0.0, 1e-3, 0.5, 1.0, 3.7, 10.0, 25.0, 80.0, 300.0] {
        let a = ie0(x);
        let b = ie0_series(x);
        assert!((a - b).abs() <= 1e-12 * b.max(1e-300), "x={x}: {a} vs {b}");
    }
}

#[test]
fn quadrature_integrates_known_functions() {
    let r = integrate(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-13, 1000);
    assert!((r.value - 2.0).abs() < 1e-12);
    let r = integrate(|x| (-x * x).exp(), 0.0, 6.0, 1e-13, 1000);
    assert!((r.value - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-12);
}

#[test]
fn three_dimensional_return_probability() {
    // Watson's closed form for the simple cubic lattice
    let g = (6f64.sqrt() / (32.0 * std::f64::consts::PI.powi(3)))
        * statrs::function::gamma::gamma(1.0 / 24.0)
        * statrs::function::gamma::gamma(5.0 / 24.0)
        * statrs::function::gamma::gamma(7.0 / 24.0)
        * statrs::function::gamma::gamma(11.0 / 24.0);
    let q3 = 1.0 - 1.0 / g;
    let ours = q_nu(3, DEFAULT_TOLERANCE).unwrap();
    assert!((ours.value - q3).abs() < 1e-10, "{} vs {q3}", ours.value);
}

#[test]
fn asymptotic_and_quadrature_agree_where_both_apply() {
    for nu in [32, 40] {
        let a = q_nu_asymptotic(nu).unwrap();
        let b = q_nu_quadrature(nu).unwrap();
        assert!((a.value - b.value).abs() <= a.error + b.error + 1e-12);
    }
    assert!(q_nu(2, DEFAULT_TOLERANCE).is_err());
}

#[test]
fn return_probabilities_decrease_in_dimension() {
    let q: Vec<f64> = (3..=12).map(|nu| q_nu(nu, DEFAULT_TOLERANCE).unwrap().value).collect();
    assert!(q.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn truncated_returns_bracket_the_limit() {
    // returns before leaving a finite box undercount by a bounded amount
    let q3 = q_nu(3, DEFAULT_TOLERANCE).unwrap().value;
    let small = q_truncated_exact(3, 4).unwrap();
    let larger = q_truncated_exact(3, 8).unwrap();
    assert!(small <= larger + 1e-12 && larger <= q3 + 1e-12);
    assert!(q3 - larger <= escape_bias_bound(3, 1.0, 0, 8));
}

#[test]
fn star_saw_counts() {
    for n in 1..=6 {
        assert_eq!(star_saw_count(n).unwrap(), brute_star_saw(n), "n={n}");
    }
    assert!(star_saw_count(MAX_SAW_LENGTH + 1).is_err());
}

#[test]
fn constants_below_and_above_threshold() {
    let r5 = constants_row(5, DEFAULT_TOLERANCE).unwrap();
    assert!(r5.mu > 1.0 && r5.lambda0.is_none());
    let big = constants_row(1000, DEFAULT_TOLERANCE).unwrap();
    assert!(big.mu < 1.0);
    let (l, c) = (big.lambda0.unwrap(), big.c0.unwrap());
    assert!(l > 0.0 && c > 0.0);
}

#[test]
fn finite_torus_exact_small_sides() {
    let f = q_n_finite(5, 2, 4, 20_000, 3).unwrap();
    let exact = f.exact.unwrap();
    assert!(f.estimate.ci.lo - 0.01 <= exact && exact <= f.estimate.ci.hi + 0.01);
    assert!(q_n_finite(5, 3, 4, 10, 3).is_err());
}

#[test]
fn harmonic_profile_is_consistent() {
    let p = harmonic_measure(1, 3, 16, 4000, 5).unwrap();
    let boundary = box_boundary(3, 1);
    assert_eq!(boundary.len(), 26);
    let total: usize = p.orbits.iter().map(|o| o.multiplicity).sum();
    assert_eq!(total, 26);
    let cap: f64 = boundary.iter().map(|z| p.weight(z)).sum();
    assert!((cap - p.capacity).abs() < 1e-9);
    assert!(p.orbits.iter().all(|o| o.weight > 0.0 && o.weight <= 1.0));
    // corners escape most easily
    let corner = p.weight(&[1, 1, 1]);
    let face = p.weight(&[1, 0, 0]);
    assert!(corner > face);
    assert!(harmonic_measure(1, 2, 16, 10, 0).is_err());
}

#[test]
fn sampled_paths_have_positive_probability() {
    let p = harmonic_measure(1, 3, 16, 2000, 7).unwrap();
    let s = sample_q(&p, 16, 200, 8).unwrap();
    for path in &s.samples {
        // the path may leave C in between, but starts and ends on its boundary
        for end in [path.start(), path.end()] {
            assert_eq!(end.iter().map(|c| c.abs()).max(), Some(1));
        }
        if path.duration() > 100 {
            continue;
        }
        let prob = q_path_probability(&p, path.sites()).unwrap();
        let direct = p.weight(path.start()) * p.weight(path.end()) / p.capacity / 6f64.powi(path.duration() as i32);
        assert!(prob > 0.0 && (prob - direct).abs() <= 1e-12 * direct);
    }
}

proptest! {
    #[test]
    fn orbit_key_is_symmetry_invariant(z in proptest::collection::vec(-5i64..=5, 3), perm in 0usize..6, flips in 0u8..8) {
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let p = perms[perm];
        let w: Vec<i64> = (0..3)
            .map(|i| if flips >> i & 1 == 1 { -z[p[i]] } else { z[p[i]] })
            .collect();
        prop_assert_eq!(orbit_key(&z), orbit_key(&w));
    }

    #[test]
    fn escape_bound_shrinks_with_radius(nu in 3u32..10, r in 4usize..200) {
        prop_assert!(escape_bias_bound(nu, 1.0, 0, 2 * r) <= escape_bias_bound(nu, 1.0, 0, r));
    }
}
