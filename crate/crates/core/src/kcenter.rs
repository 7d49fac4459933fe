//! Unconstrained k-center building blocks: farthest-first traversal, the
//! threshold packing scan, nearest-center assignment and an exact oracle.

use alloc::vec;
use alloc::vec::Vec;

use crate::combinatorics::{binomial, for_each_combination};
use crate::error::{Error, Result};
use crate::metric::{DistanceOracle, PointId};

/// Default number of center sets [`brute_force_kcenter`] may enumerate.
pub const KCENTER_ORACLE_BUDGET: u128 = 5_000_000;

/// A set of centers and its coverage radius over the points it was built on.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CenterSet {
    pub centers: Vec<PointId>,
    pub radius: f64,
}

/// A k-center approximation algorithm with a known ratio.
pub trait KCenter {
    /// Approximation ratio of [`KCenter::solve`].
    fn beta(&self) -> f64;
    fn solve(&self, points: &[PointId], k: usize, oracle: &DistanceOracle<'_>)
        -> Result<CenterSet>;
}

/// Farthest-first traversal; a 2-approximation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Gonzalez;

impl KCenter for Gonzalez {
    fn beta(&self) -> f64 {
        2.0
    }

    fn solve(
        &self,
        points: &[PointId],
        k: usize,
        oracle: &DistanceOracle<'_>,
    ) -> Result<CenterSet> {
        gonzalez(points, k, oracle)
    }
}

/// Farthest-first traversal started from the lowest id. Each further center
/// is the point farthest from the current centers (ties to the lowest id).
///
/// Uses exactly `min(k, |V|) * |V|` distance evaluations when `k < |V|`.
pub fn gonzalez(points: &[PointId], k: usize, oracle: &DistanceOracle<'_>) -> Result<CenterSet> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1"));
    }
    if points.is_empty() {
        return Err(Error::InvalidParameter("no points to cluster"));
    }
    oracle.check_all(points)?;
    if k >= points.len() {
        let mut centers = points.to_vec();
        centers.sort_unstable();
        centers.dedup();
        return Ok(CenterSet {
            centers,
            radius: 0.0,
        });
    }

    let first = *points.iter().min().expect("non-empty");
    let mut centers = Vec::with_capacity(k);
    centers.push(first);
    let mut min_dist = vec![f64::INFINITY; points.len()];
    loop {
        let newest = *centers.last().expect("at least one center");
        let mut far = (f64::NEG_INFINITY, PointId(usize::MAX));
        for (slot, &j) in min_dist.iter_mut().zip(points) {
            let d = oracle.dist(j, newest);
            if d < *slot {
                *slot = d;
            }
            if *slot > far.0 || (*slot == far.0 && j < far.1) {
                far = (*slot, j);
            }
        }
        if centers.len() == k {
            return Ok(CenterSet {
                centers,
                radius: far.0,
            });
        }
        centers.push(far.1);
    }
}

/// Single scan in list order that keeps every point farther than
/// `threshold` from the points kept so far.
///
/// The result is pairwise farther than `threshold` apart and covers all of
/// `points` within `threshold`.
pub fn threshold_packing(
    points: &[PointId],
    threshold: f64,
    oracle: &DistanceOracle<'_>,
) -> Vec<PointId> {
    let mut kept: Vec<PointId> = Vec::new();
    for &j in points {
        if kept.iter().all(|&c| oracle.dist(j, c) > threshold) {
            kept.push(j);
        }
    }
    kept
}

/// [`threshold_packing`] plus the exact coverage radius of the result.
pub fn threshold_greedy(
    points: &[PointId],
    threshold: f64,
    oracle: &DistanceOracle<'_>,
) -> Result<CenterSet> {
    if threshold.is_nan() || threshold < 0.0 {
        return Err(Error::InvalidParameter("threshold must be non-negative"));
    }
    oracle.check_all(points)?;
    let centers = threshold_packing(points, threshold, oracle);
    let radius = points
        .iter()
        .map(|&j| oracle.dist_to_set(j, &centers))
        .fold(0.0, f64::max);
    Ok(CenterSet { centers, radius })
}

/// Nearest-center partition of a point list.
#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub centers: Vec<PointId>,
    /// The clustered points, in the order they were given.
    pub points: Vec<PointId>,
    /// `cluster_of[i]` is the index in `centers` serving `points[i]`.
    pub cluster_of: Vec<usize>,
    /// `dist[i]` is `d(points[i], centers[cluster_of[i]])`.
    pub dist: Vec<f64>,
}

impl Clustering {
    /// Members of each cluster, in input order.
    pub fn clusters(&self) -> Vec<Vec<PointId>> {
        let mut out = vec![Vec::new(); self.centers.len()];
        for (&p, &c) in self.points.iter().zip(&self.cluster_of) {
            out[c].push(p);
        }
        out
    }

    pub fn radius(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }
}

/// Assigns every point to its nearest center; ties go to the lowest center index.
pub fn cluster_assign(
    points: &[PointId],
    centers: &[PointId],
    oracle: &DistanceOracle<'_>,
) -> Result<Clustering> {
    if centers.is_empty() {
        return Err(Error::EmptyCenterSet);
    }
    oracle.check_all(points)?;
    oracle.check_all(centers)?;
    let mut cluster_of = Vec::with_capacity(points.len());
    let mut dist = Vec::with_capacity(points.len());
    for &j in points {
        let (c, d) = oracle.nearest(j, centers);
        cluster_of.push(c);
        dist.push(d);
    }
    Ok(Clustering {
        centers: centers.to_vec(),
        points: points.to_vec(),
        cluster_of,
        dist,
    })
}

/// Exact k-center by enumerating every k-subset; the lexicographically
/// smallest optimal center set is returned.
pub fn brute_force_kcenter(
    points: &[PointId],
    k: usize,
    oracle: &DistanceOracle<'_>,
) -> Result<CenterSet> {
    brute_force_kcenter_with_budget(points, k, oracle, KCENTER_ORACLE_BUDGET)
}

pub fn brute_force_kcenter_with_budget(
    points: &[PointId],
    k: usize,
    oracle: &DistanceOracle<'_>,
    budget: u128,
) -> Result<CenterSet> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1"));
    }
    if points.is_empty() {
        return Err(Error::InvalidParameter("no points to cluster"));
    }
    oracle.check_all(points)?;
    let mut sorted = points.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let n = sorted.len();
    let k = k.min(n);
    let needed = binomial(n, k);
    if needed > budget {
        return Err(Error::OracleBudgetExceeded { needed, budget });
    }
    let dm = oracle.local_matrix(&sorted);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for_each_combination(n, k, |combo| {
        let radius = (0..n)
            .map(|j| {
                combo
                    .iter()
                    .map(|&c| dm[j * n + c])
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max);
        // combinations arrive in lexicographic order, so strict improvement
        // keeps the smallest optimal set
        if best.as_ref().is_none_or(|b| radius < b.0) {
            best = Some((radius, combo.to_vec()));
        }
    });
    let (radius, combo) = best.expect("at least one combination");
    Ok(CenterSet {
        centers: combo.into_iter().map(|i| sorted[i]).collect(),
        radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{coverage_radius, Dataset};

    fn ids(v: &[usize]) -> Vec<PointId> {
        v.iter().map(|&i| PointId(i)).collect()
    }

    #[test]
    fn gonzalez_examples() {
        let ds = Dataset::from_line(&[0.0, 4.0, 5.0, 10.0]).unwrap();
        let o = DistanceOracle::new(&ds);
        let all = ds.ids();
        let cs = gonzalez(&all, 2, &o).unwrap();
        assert_eq!(cs.centers, ids(&[0, 3]));
        assert_eq!(cs.radius, 5.0);
        assert_eq!(o.evaluations(), 2 * 4);

        let cs = gonzalez(&all, 4, &o).unwrap();
        assert_eq!(cs.radius, 0.0);
        assert_eq!(cs.centers, all);

        let cs = gonzalez(&all, 1, &o).unwrap();
        assert_eq!(cs.centers, ids(&[0]));
        assert_eq!(cs.radius, 10.0);

        let cs = gonzalez(&all, 7, &o).unwrap();
        assert_eq!(cs.radius, 0.0);
        assert!(gonzalez(&all, 0, &o).is_err());
    }

    #[test]
    fn gonzalez_first_center_is_lowest_id() {
        let ds = Dataset::from_line(&[3.0, 0.0, 9.0]).unwrap();
        let o = DistanceOracle::new(&ds);
        let cs = gonzalez(&ids(&[2, 1, 0]), 2, &o).unwrap();
        assert_eq!(cs.centers, ids(&[0, 2]));
        assert_eq!(cs.radius, 3.0);
    }

    #[test]
    fn threshold_greedy_examples() {
        let ds = Dataset::from_line(&[0.0, 1.0, 2.0, 10.0]).unwrap();
        let o = DistanceOracle::new(&ds);
        let all = ds.ids();
        assert_eq!(threshold_greedy(&all, 0.0, &o).unwrap().centers, all);
        let cs = threshold_greedy(&all, 10.0, &o).unwrap();
        assert_eq!(cs.centers, ids(&[0]));
        assert_eq!(cs.radius, 10.0);
        let cs = threshold_greedy(&all, 1.5, &o).unwrap();
        assert_eq!(cs.centers, ids(&[0, 2, 3]));
        assert_eq!(cs.radius, 1.0);
        assert!(threshold_greedy(&all, -1.0, &o).is_err());
    }

    #[test]
    fn cluster_assign_examples() {
        let ds = Dataset::from_line(&[0.0, 1.0, 2.0, 10.0, 5.0]).unwrap();
        let o = DistanceOracle::new(&ds);
        let line = ids(&[0, 1, 2, 3]);
        let cl = cluster_assign(&line, &ids(&[0, 3]), &o).unwrap();
        assert_eq!(cl.clusters(), vec![ids(&[0, 1, 2]), ids(&[3])]);
        assert_eq!(cl.radius(), 2.0);

        let single = cluster_assign(&line, &ids(&[2]), &o).unwrap();
        assert_eq!(single.clusters(), vec![line.clone()]);

        // point 4 (at 5) is equidistant from 0 and 3; the lower index wins
        let tie = cluster_assign(&ids(&[4]), &ids(&[3, 0]), &o).unwrap();
        assert_eq!(tie.cluster_of, vec![0]);
        assert!(cluster_assign(&line, &[], &o).is_err());
    }

    #[test]
    fn brute_force_examples() {
        let ds = Dataset::from_line(&[0.0, 4.0, 5.0, 10.0]).unwrap();
        let o = DistanceOracle::new(&ds);
        let all = ds.ids();
        assert_eq!(brute_force_kcenter(&all, 4, &o).unwrap().radius, 0.0);
        // pair radii: {0,4}:6 {0,5}:5 {0,10}:5 {4,5}:5 {4,10}:4 {5,10}:5
        let best = brute_force_kcenter(&all, 2, &o).unwrap();
        assert_eq!(best.centers, ids(&[1, 3]));
        assert_eq!(best.radius, 4.0);
        assert_eq!(coverage_radius(&best.centers, &all, &o).unwrap(), 4.0);
        assert!(gonzalez(&all, 2, &o).unwrap().radius <= 2.0 * best.radius);

        let ds2 = Dataset::from_line(&[0.0, 10.0]).unwrap();
        let o2 = DistanceOracle::new(&ds2);
        let one = brute_force_kcenter(&ds2.ids(), 1, &o2).unwrap();
        assert_eq!(one.radius, 10.0);
        assert!(matches!(
            brute_force_kcenter_with_budget(&all, 2, &o, 3),
            Err(Error::OracleBudgetExceeded { .. })
        ));
    }
}
