mod common;

use common::{
    clustered_points, enumerate_optimum, random_matroid, random_points, rng, unit_points,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use robust_center::metric::robust_cost;
use robust_center::rmc::{
    brute_force_rmc, build_rmc_coreset, certify_c1, certify_c2, max_proxy_distance, solve_rmc,
    solve_rmcm_exact, solve_rmcm_heuristic, ExactRmcm, EXACT_SOLVER_BUDGET,
};
use robust_center::{Dataset, DistanceOracle, Gonzalez, MultiplicityPoint, PointId, RmcInstance};

fn dataset(seed: u64, n: usize) -> Dataset {
    let mut r = rng(seed ^ 0x5eed);
    if seed.is_multiple_of(2) {
        random_points(&mut r, n, 2)
    } else {
        clustered_points(&mut r, n, 2)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn brute_force_matches_enumeration(seed in any::<u64>(), kind in 0usize..3) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=11);
        let ds = dataset(seed, n);
        let o = DistanceOracle::new(&ds);
        let m = random_matroid(&mut r, n, kind);
        let z = r.gen_range(0..n.min(4));
        let inst = RmcInstance::new(&o, m.as_ref(), z).unwrap();
        let best = brute_force_rmc(&inst).unwrap();
        let reference = enumerate_optimum(n, &unit_points(n), z as u64, &o, |s| m.independent(s));
        prop_assert_eq!(best.cost, reference);
        prop_assert!(m.independent(&best.centers));
    }

    #[test]
    fn exact_solver_matches_enumeration(seed in any::<u64>(), kind in 0usize..3) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=12);
        let ds = dataset(seed, n);
        let o = DistanceOracle::new(&ds);
        let m = random_matroid(&mut r, n, kind);
        let members: Vec<MultiplicityPoint> = (0..n)
            .map(|i| MultiplicityPoint::new(PointId(i), r.gen_range(1..=5)))
            .collect();
        let total: u64 = members.iter().map(|p| p.multiplicity).sum();
        let z = r.gen_range(0..total.min(6));
        let got = solve_rmcm_exact(&members, m.as_ref(), z, &o, EXACT_SOLVER_BUDGET).unwrap();
        let pairs: Vec<(PointId, u64)> = members.iter().map(|p| (p.id, p.multiplicity)).collect();
        let reference = enumerate_optimum(n, &pairs, z, &o, |s| m.independent(s));
        prop_assert_eq!(got.cost, reference);
        prop_assert_eq!(got.cost, robust_cost(&got.centers, &members, z, &o).unwrap());
        let h = solve_rmcm_heuristic(&members, m.as_ref(), z, &o, 100).unwrap();
        prop_assert!(m.independent(&h.centers));
        prop_assert!(h.cost >= got.cost);
    }

    #[test]
    fn coreset_invariants(seed in any::<u64>(), kind in 0usize..3) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=40);
        let ds = dataset(seed, n);
        let o = DistanceOracle::new(&ds);
        let m = random_matroid(&mut r, n, kind);
        let z = r.gen_range(0..n.min(4));
        let inst = RmcInstance::new(&o, m.as_ref(), z).unwrap();
        let eps_prime = r.gen_range(0.05..0.95);
        let cs = build_rmc_coreset(&inst, eps_prime, &Gonzalez).unwrap();
        let audit = cs.audit.as_ref().unwrap();
        prop_assert_eq!(cs.total_mass(), n as u64);
        prop_assert!(cs.len() <= inst.rank() * cs.tau);
        // farthest-first is within 2 of the (k+z)-center optimum, itself below r*
        prop_assert!(cs.r_guess <= 2.0 * brute_force_rmc(&inst).unwrap().cost);
        // preimages partition V and proxies stay in their cluster
        for p in ds.ids() {
            let proxy = audit.proxy[&p];
            let l = audit.cluster[&p];
            prop_assert!(cs.blocks[l].contains(&proxy));
            prop_assert!(o.dist(p, proxy) <= 2.0 * cs.threshold);
        }
        for (l, block) in cs.blocks.iter().enumerate() {
            prop_assert!(m.independent(block));
            for p in cs.cluster_points(l).unwrap() {
                if !block.contains(&p) {
                    let mut t = block.clone();
                    t.push(p);
                    prop_assert!(!m.independent(&t));
                }
            }
            let count = audit.proxy.values().filter(|q| block.contains(q)).count() as u64;
            let mass: u64 = cs.members.iter().filter(|x| block.contains(&x.id)).map(|x| x.multiplicity).sum();
            prop_assert_eq!(count, mass);
        }
    }

    #[test]
    fn pipeline_meets_certificates(seed in any::<u64>(), kind in 0usize..3) {
        let mut r = rng(seed);
        let n = r.gen_range(2..=24);
        let ds = dataset(seed, n);
        let o = DistanceOracle::new(&ds);
        let m = random_matroid(&mut r, n, kind);
        let z = r.gen_range(0..n.min(4));
        let inst = RmcInstance::new(&o, m.as_ref(), z).unwrap();
        let eps = 0.5;
        let rstar = brute_force_rmc(&inst).unwrap().cost;
        let out = solve_rmc(&inst, eps, &ExactRmcm::default()).unwrap();
        let ep = out.coreset.eps_prime;
        prop_assert_eq!(ep, eps / 3.0);
        prop_assert!(m.independent(&out.solution.centers));
        prop_assert!(out.solution.cost <= (1.0 + eps) * rstar);
        prop_assert!(certify_c1(&out.coreset, rstar, &o).unwrap());
        prop_assert!(max_proxy_distance(&out.coreset, &o).unwrap() <= ep * rstar);
        prop_assert!(out.coreset_cost <= (1.0 + 2.0 * ep) * rstar);
        prop_assert!(out.solution.cost <= out.coreset_cost + ep * rstar);
        for _ in 0..5 {
            let mut order = ds.ids();
            order.shuffle(&mut r);
            let x = m.greedy(&order[..r.gen_range(0..=n)]);
            prop_assert!(certify_c2(&out.coreset, &x, rstar, m.as_ref(), &o).unwrap());
        }
    }
}

#[test]
fn c2_rejects_dependent_sets() {
    let ds = Dataset::from_line(&[0.0, 1.0, 2.0]).unwrap();
    let o = DistanceOracle::new(&ds);
    let u = robust_center::UniformMatroid::new(3, 1).unwrap();
    let inst = RmcInstance::new(&o, &u, 0).unwrap();
    let cs = build_rmc_coreset(&inst, 0.5, &Gonzalez).unwrap();
    assert!(certify_c2(&cs, &[PointId(0), PointId(1)], 1.0, &u, &o).is_err());
}

#[test]
fn zero_radius_guess_keeps_distinct_points() {
    let ds = Dataset::from_line(&[1.0, 1.0, 1.0, 4.0]).unwrap();
    let o = DistanceOracle::new(&ds);
    let u = robust_center::UniformMatroid::new(4, 1).unwrap();
    let inst = RmcInstance::new(&o, &u, 1).unwrap();
    let cs = build_rmc_coreset(&inst, 0.5, &Gonzalez).unwrap();
    assert_eq!(cs.r_guess, 0.0);
    assert_eq!(cs.tau, 2);
    assert_eq!(
        cs.members,
        [
            MultiplicityPoint::new(PointId(0), 3),
            MultiplicityPoint::new(PointId(3), 1)
        ]
    );
}
