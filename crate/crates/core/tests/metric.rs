mod common;

use common::{gh_oracle, random_plane_space};
use mmlab::metric::{
    gh_distance_small, hausdorff_distance, tube, tube_measure, FiniteMetricSpace, NeighborhoodQuery,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn planar(points: &[(f64, f64)]) -> FiniteMetricSpace {
    FiniteMetricSpace::from_points(points, |a, b| (a.0 - b.0).hypot(a.1 - b.1)).unwrap()
}

/// Smallest candidate ε for which each set lies in the other's closed ε-tube.
fn hausdorff_by_scan(space: &FiniteMetricSpace, a: &[usize], b: &[usize]) -> f64 {
    let mut candidates: Vec<f64> = (0..space.len())
        .flat_map(|i| (0..space.len()).map(move |j| (i, j)))
        .map(|(i, j)| space.dist(i, j))
        .collect();
    candidates.sort_by(|x, y| x.total_cmp(y));
    candidates.dedup();
    for eps in candidates {
        let ta = tube(space, &NeighborhoodQuery::new(a.to_vec(), eps).unwrap()).unwrap();
        let tb = tube(space, &NeighborhoodQuery::new(b.to_vec(), eps).unwrap()).unwrap();
        if b.iter().all(|i| ta.contains(i)) && a.iter().all(|i| tb.contains(i)) {
            return eps;
        }
    }
    unreachable!("the diameter is always a candidate")
}

fn points_strategy(max: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0f64..10.0, 0.0f64..10.0), 1..=max)
}

fn subset_strategy(len: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::btree_set(0..len, 1..=len).prop_map(|s| s.into_iter().collect())
}

proptest! {
    #[test]
    fn hausdorff_matches_epsilon_scan(
        (pts, a, b) in points_strategy(9).prop_flat_map(|p| {
            let n = p.len();
            (Just(p), subset_strategy(n), subset_strategy(n))
        })
    ) {
        let space = planar(&pts);
        prop_assert_eq!(hausdorff_distance(&space, &a, &b).unwrap(), hausdorff_by_scan(&space, &a, &b));
    }

    #[test]
    fn tube_measure_is_monotone(
        (pts, a) in points_strategy(10).prop_flat_map(|p| { let n = p.len(); (Just(p), subset_strategy(n)) }),
        e1 in 0.0f64..8.0,
        e2 in 0.0f64..8.0,
    ) {
        let space = planar(&pts);
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let m_lo = tube_measure(&space, &NeighborhoodQuery::new(a.clone(), lo).unwrap()).unwrap();
        let m_hi = tube_measure(&space, &NeighborhoodQuery::new(a, hi).unwrap()).unwrap();
        prop_assert!(m_lo <= m_hi);
    }

    #[test]
    fn hausdorff_triangle_inequality(
        (pts, a, b, c) in points_strategy(8).prop_flat_map(|p| {
            let n = p.len();
            (Just(p), subset_strategy(n), subset_strategy(n), subset_strategy(n))
        })
    ) {
        let space = planar(&pts);
        let h = |x: &[usize], y: &[usize]| hausdorff_distance(&space, x, y).unwrap();
        prop_assert!(h(&a, &c) <= h(&a, &b) + h(&b, &c) + 1e-12);
    }

    #[test]
    fn gh_is_at_most_half_the_larger_diameter(x in points_strategy(5), y in points_strategy(5)) {
        let (x, y) = (planar(&x), planar(&y));
        let d = gh_distance_small(&x, &y).unwrap();
        prop_assert!(d <= 0.5 * x.diameter().max(y.diameter()));
        prop_assert!(d >= 0.5 * (x.diameter() - y.diameter()).abs() - 1e-12);
        prop_assert_eq!(d, gh_distance_small(&y, &x).unwrap());
    }
}

#[test]
fn gh_matches_enumeration_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..60 {
        let x = random_plane_space(&mut rng, 4);
        let y = random_plane_space(&mut rng, 4);
        assert_eq!(gh_distance_small(&x, &y).unwrap(), gh_oracle(&x, &y));
    }
}

#[test]
fn gh_two_point_spaces() {
    for (a, b) in [(1.0, 3.0), (2.5, 2.5), (0.1, 7.0)] {
        let x = FiniteMetricSpace::line(&[0.0, a]).unwrap();
        let y = FiniteMetricSpace::line(&[0.0, b]).unwrap();
        assert_eq!(gh_distance_small(&x, &y).unwrap(), (a - b).abs() / 2.0);
    }
}

#[test]
fn gh_of_isometric_copies_is_zero() {
    let x = planar(&[(0.0, 0.0), (1.0, 0.0), (0.0, 2.0), (3.0, 3.0)]);
    let y = planar(&[(5.0, 5.0), (5.0, 6.0), (7.0, 5.0), (8.0, 8.0)]);
    assert_eq!(gh_distance_small(&x, &y).unwrap(), 0.0);
}

#[test]
fn metric_json_round_trip() {
    let x = planar(&[(0.0, 0.0), (3.0, 4.0)]);
    let back = FiniteMetricSpace::from_json(&x.to_json()).unwrap();
    assert_eq!(back, x);
}
