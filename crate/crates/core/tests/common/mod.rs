//! Random instances and independent reference computations.
#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robust_center::{
    Dataset, DistanceOracle, Matroid, PartitionMatroid, PointId, TransversalMatroid, UniformMatroid,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` points in `[0, 10)^dim`, coordinates rounded to one decimal so that
/// ties and duplicates occur.
pub fn random_points(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Dataset {
    let rows = (0..n)
        .map(|_| {
            (0..dim)
                .map(|_| (rng.gen_range(0.0..10.0f64) * 10.0).round() / 10.0)
                .collect()
        })
        .collect();
    Dataset::from_coords(rows).unwrap()
}

/// Clustered points with a few far outliers.
pub fn clustered_points(rng: &mut ChaCha8Rng, n: usize, outliers: usize) -> Dataset {
    let blobs = rng.gen_range(1..=3);
    let centers: Vec<(f64, f64)> = (0..blobs)
        .map(|_| (rng.gen_range(0.0..20.0), rng.gen_range(0.0..20.0)))
        .collect();
    let rows = (0..n)
        .map(|i| {
            if i < outliers {
                vec![rng.gen_range(80.0..120.0), rng.gen_range(80.0..120.0)]
            } else {
                let (cx, cy) = centers[rng.gen_range(0..blobs)];
                vec![cx + rng.gen_range(-1.0..1.0), cy + rng.gen_range(-1.0..1.0)]
            }
        })
        .collect();
    Dataset::from_coords(rows).unwrap()
}

pub fn random_weights(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..=hi)).collect()
}

/// Uniform, partition or transversal matroid of rank at most 3 on `0..n`.
pub fn random_matroid(rng: &mut ChaCha8Rng, n: usize, kind: usize) -> Box<dyn Matroid> {
    match kind % 3 {
        0 => Box::new(UniformMatroid::new(n, rng.gen_range(1..=3usize.min(n))).unwrap()),
        1 => {
            let cats = rng.gen_range(1..=3u32);
            let categories: Vec<u32> = (0..n).map(|_| rng.gen_range(0..cats)).collect();
            // total quota stays at most 3
            let cap = (3 / cats as usize).max(1);
            let quotas: BTreeMap<u32, usize> =
                (0..cats).map(|c| (c, rng.gen_range(1..=cap))).collect();
            Box::new(PartitionMatroid::new(categories, quotas).unwrap())
        }
        _ => {
            let slots = rng.gen_range(1..=3usize);
            let adjacency = (0..n)
                .map(|_| {
                    let mut a: Vec<usize> = (0..slots).filter(|_| rng.gen_bool(0.5)).collect();
                    if a.is_empty() {
                        a.push(rng.gen_range(0..slots));
                    }
                    a
                })
                .collect();
            Box::new(TransversalMatroid::new(slots, adjacency).unwrap())
        }
    }
}

/// Robust cost by definition: the least candidate radius whose ball union
/// over `centers` carries mass at least `total - z`.
pub fn naive_robust_cost(
    centers: &[PointId],
    points: &[(PointId, u64)],
    z: u64,
    oracle: &DistanceOracle<'_>,
) -> f64 {
    let dists: Vec<f64> = points
        .iter()
        .map(|&(p, _)| {
            centers
                .iter()
                .map(|&c| oracle.dist(p, c))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let total: u64 = points.iter().map(|p| p.1).sum();
    let mut best = f64::INFINITY;
    for &v in &dists {
        let covered: u64 = dists
            .iter()
            .zip(points)
            .filter(|(d, _)| **d <= v)
            .map(|(_, p)| p.1)
            .sum();
        if covered + z >= total && v < best {
            best = v;
        }
    }
    best
}

/// Bitmask enumeration of all center subsets satisfying `feasible`;
/// returns the optimal cost.
pub fn enumerate_optimum(
    n: usize,
    points: &[(PointId, u64)],
    z: u64,
    oracle: &DistanceOracle<'_>,
    mut feasible: impl FnMut(&[PointId]) -> bool,
) -> f64 {
    assert!(n <= 20);
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << n) {
        let set: Vec<PointId> = (0..n).filter(|i| mask >> i & 1 == 1).map(PointId).collect();
        if !feasible(&set) {
            continue;
        }
        best = best.min(naive_robust_cost(&set, points, z, oracle));
    }
    best
}

pub fn unit_points(n: usize) -> Vec<(PointId, u64)> {
    (0..n).map(|i| (PointId(i), 1)).collect()
}
