mod common;

use common::{random_points, rng};
use proptest::prelude::*;
use rand::Rng;
use robust_center::kcenter::{
    brute_force_kcenter, cluster_assign, threshold_greedy, threshold_packing,
};
use robust_center::metric::coverage_radius;
use robust_center::{gonzalez, DistanceOracle, PointId};

/// Optimal k-center radius by enumerating every k-subset as a bitmask.
fn reference_kcenter(n: usize, k: usize, o: &DistanceOracle<'_>) -> f64 {
    let all: Vec<PointId> = (0..n).map(PointId).collect();
    (1u32..1 << n)
        .filter(|m| m.count_ones() as usize == k.min(n))
        .map(|m| {
            let s: Vec<PointId> = (0..n).filter(|i| m >> i & 1 == 1).map(PointId).collect();
            coverage_radius(&s, &all, o).unwrap()
        })
        .fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn gonzalez_is_two_approximate(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=14);
        let dim = r.gen_range(1..=3);
        let ds = random_points(&mut r, n, dim);
        let o = DistanceOracle::new(&ds);
        let k = r.gen_range(1..=4);
        let g = gonzalez(&ds.ids(), k, &o).unwrap();
        let opt = reference_kcenter(n, k, &o);
        prop_assert!(g.radius <= 2.0 * opt);
        prop_assert_eq!(g.radius, coverage_radius(&g.centers, &ds.ids(), &o).unwrap());
        prop_assert_eq!(g.centers[0], PointId(0));
        let bf = brute_force_kcenter(&ds.ids(), k, &o).unwrap();
        prop_assert_eq!(bf.radius, opt);
    }

    #[test]
    fn packing_is_separated_and_covering(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=40);
        let ds = random_points(&mut r, n, 2);
        let o = DistanceOracle::new(&ds);
        let thr = r.gen_range(0.0..4.0);
        let pack = threshold_packing(&ds.ids(), thr, &o);
        for (i, &a) in pack.iter().enumerate() {
            for &b in &pack[i + 1..] {
                prop_assert!(o.dist(a, b) > thr);
            }
        }
        let cs = threshold_greedy(&ds.ids(), thr, &o).unwrap();
        prop_assert!(cs.radius <= thr);
        let cl = cluster_assign(&ds.ids(), &pack, &o).unwrap();
        prop_assert_eq!(cl.clusters().iter().map(Vec::len).sum::<usize>(), n);
        prop_assert!(cl.radius() <= thr);
    }
}

#[test]
fn gonzalez_uses_k_n_evaluations() {
    let mut r = rng(5);
    let ds = random_points(&mut r, 30, 2);
    let o = DistanceOracle::new(&ds);
    let before = o.evaluations();
    gonzalez(&ds.ids(), 4, &o).unwrap();
    assert_eq!(o.evaluations() - before, 4 * 30);
}
