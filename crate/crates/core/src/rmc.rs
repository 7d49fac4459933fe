//! Robust matroid center: coreset construction, the proximity and
//! transport certificates, solvers for the multiplicity variant, and the
//! end-to-end pipeline.
//!
//! The coreset is built in four steps:
//!
//! 1. a `beta`-approximate `(k+z)`-center solution bounds the scale `r_guess`;
//! 2. a threshold packing at `eps' / (2 beta) * r_guess` partitions the
//!    points into `tau` tight clusters;
//! 3. each cluster contributes a maximal independent subset `Y`;
//! 4. every point is proxied by its nearest `Y` member in its own cluster,
//!    and multiplicities count proxy preimages.
//!
//! Every point then sits within `eps' * r*` of its proxy, and any independent
//! set can be moved cluster-by-cluster into the coreset while staying
//! independent. An `alpha`-approximate answer on the coreset is therefore an
//! `(alpha + eps)`-approximate answer on the full data when
//! `eps' = eps / (2 alpha + 1)`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::combinatorics::{for_each_combination, subsets_up_to};
use crate::error::{Error, Result};
use crate::kcenter::{cluster_assign, threshold_packing, Gonzalez, KCenter};
use crate::matroid::{augment_witness, matroid_rank, Matroid};
use crate::metric::{
    cmp_dist, robust_cost_unit, robust_order_statistic, DistanceOracle, MultiplicityPoint, PointId,
};

/// Default enumeration budget for the exact coreset solver.
pub const EXACT_SOLVER_BUDGET: u128 = 10_000_000;
/// Default enumeration budget for [`brute_force_rmc`].
pub const RMC_ORACLE_BUDGET: u128 = 10_000_000;

/// A robust matroid center instance: data, matroid and outlier budget.
#[derive(Clone, Copy)]
pub struct RmcInstance<'a> {
    oracle: &'a DistanceOracle<'a>,
    matroid: &'a dyn Matroid,
    z: usize,
    rank: usize,
}

impl<'a> RmcInstance<'a> {
    pub fn new(oracle: &'a DistanceOracle<'a>, matroid: &'a dyn Matroid, z: usize) -> Result<Self> {
        let n = oracle.len();
        if n == 0 {
            return Err(Error::InvalidParameter("empty dataset"));
        }
        if matroid.ground_size() != n {
            return Err(Error::InvalidParameter(
                "matroid ground set does not match the dataset",
            ));
        }
        if z >= n {
            return Err(Error::InvalidParameter("z must be smaller than |V|"));
        }
        let rank = matroid_rank(matroid);
        Ok(RmcInstance {
            oracle,
            matroid,
            z,
            rank,
        })
    }

    pub fn oracle(&self) -> &'a DistanceOracle<'a> {
        self.oracle
    }

    pub fn matroid(&self) -> &'a dyn Matroid {
        self.matroid
    }

    pub fn z(&self) -> usize {
        self.z
    }

    /// Rank `k` of the matroid.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.oracle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.oracle.is_empty()
    }
}

impl core::fmt::Debug for RmcInstance<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("RmcInstance")
            .field("n", &self.len())
            .field("matroid", &self.matroid.kind())
            .field("rank", &self.rank)
            .field("z", &self.z)
            .finish()
    }
}

/// Per-point bookkeeping of a coreset: proxy and cluster of every original point.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProxyAudit {
    pub proxy: BTreeMap<PointId, PointId>,
    pub cluster: BTreeMap<PointId, usize>,
}

/// Coreset for robust matroid center.
#[derive(Debug, Clone, PartialEq)]
pub struct RmcCoreset {
    /// Coreset points with their proxy multiplicities.
    pub members: Vec<MultiplicityPoint>,
    /// `blocks[l]` is the maximal independent subset extracted from cluster `l`.
    pub blocks: Vec<Vec<PointId>>,
    /// Partition each block was built on (always 0 outside MapReduce).
    pub origin: Vec<usize>,
    /// Present whenever the full proxy map was retained.
    pub audit: Option<ProxyAudit>,
    /// Number of clusters.
    pub tau: usize,
    pub eps_prime: f64,
    pub beta: f64,
    /// Upper bound on the `(k+z)`-center radius that fixed the cluster scale
    /// (largest over partitions for a union).
    pub r_guess: f64,
    /// Cluster threshold (largest over partitions for a union).
    pub threshold: f64,
}

impl RmcCoreset {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn ids(&self) -> Vec<PointId> {
        self.members.iter().map(|m| m.id).collect()
    }

    pub fn total_mass(&self) -> u64 {
        self.members.iter().map(|m| m.multiplicity).sum()
    }

    /// All original points of cluster `l`, ascending; needs the audit.
    pub fn cluster_points(&self, l: usize) -> Result<Vec<PointId>> {
        let audit = self.audit.as_ref().ok_or(Error::MissingAudit)?;
        Ok(audit
            .cluster
            .iter()
            .filter(|&(_, &c)| c == l)
            .map(|(&p, _)| p)
            .collect())
    }

    /// Union of per-partition coresets; clusters are renumbered consecutively.
    pub fn union(parts: Vec<RmcCoreset>) -> Result<RmcCoreset> {
        let mut iter = parts.into_iter();
        let mut acc = iter
            .next()
            .ok_or(Error::InvalidParameter("no coresets to merge"))?;
        for part in iter {
            let offset = acc.blocks.len();
            acc.members.extend(part.members);
            acc.blocks.extend(part.blocks);
            acc.origin.extend(part.origin);
            acc.audit = match (acc.audit.take(), part.audit) {
                (Some(mut a), Some(b)) => {
                    a.proxy.extend(b.proxy);
                    a.cluster
                        .extend(b.cluster.into_iter().map(|(p, c)| (p, c + offset)));
                    Some(a)
                }
                _ => None,
            };
            acc.tau += part.tau;
            acc.r_guess = acc.r_guess.max(part.r_guess);
            acc.threshold = acc.threshold.max(part.threshold);
        }
        Ok(acc)
    }
}

/// Builds the coreset on the whole instance.
pub fn build_rmc_coreset(
    inst: &RmcInstance<'_>,
    eps_prime: f64,
    kcenter: &dyn KCenter,
) -> Result<RmcCoreset> {
    let all: Vec<PointId> = (0..inst.len()).map(PointId).collect();
    build_rmc_coreset_on(inst, &all, eps_prime, kcenter)
}

/// Builds the coreset on a subset of the instance's points (one MapReduce
/// partition). The `(k+z)`-center step only sees `points`.
pub fn build_rmc_coreset_on(
    inst: &RmcInstance<'_>,
    points: &[PointId],
    eps_prime: f64,
    kcenter: &dyn KCenter,
) -> Result<RmcCoreset> {
    if !(eps_prime > 0.0 && eps_prime < 1.0) {
        return Err(Error::InvalidParameter("eps' must lie in (0, 1)"));
    }
    if points.is_empty() {
        return Err(Error::InvalidParameter("no points to summarize"));
    }
    let oracle = inst.oracle();
    let beta = kcenter.beta();
    let r_guess = kcenter
        .solve(points, inst.rank() + inst.z(), oracle)?
        .radius;
    let threshold = eps_prime / (2.0 * beta) * r_guess;

    let packing = threshold_packing(points, threshold, oracle);
    let clustering = cluster_assign(points, &packing, oracle)?;

    let mut members = Vec::new();
    let mut blocks = Vec::with_capacity(packing.len());
    let mut audit = ProxyAudit::default();
    for (l, mut cluster) in clustering.clusters().into_iter().enumerate() {
        cluster.sort_unstable();
        let block = inst.matroid().greedy(&cluster);
        let mut mass = vec![0u64; block.len()];
        for &j in &cluster {
            // block members proxy themselves even when duplicates tie
            let slot = match block.iter().position(|&b| b == j) {
                Some(s) => s,
                None => oracle.nearest(j, &block).0,
            };
            mass[slot] += 1;
            audit.proxy.insert(j, block[slot]);
            audit.cluster.insert(j, l);
        }
        members.extend(
            block
                .iter()
                .zip(&mass)
                .map(|(&id, &m)| MultiplicityPoint::new(id, m)),
        );
        blocks.push(block);
    }

    Ok(RmcCoreset {
        members,
        origin: vec![0; blocks.len()],
        tau: blocks.len(),
        blocks,
        audit: Some(audit),
        eps_prime,
        beta,
        r_guess,
        threshold,
    })
}

/// Proximity certificate: every point lies within `eps' * rstar` of its proxy.
pub fn certify_c1(coreset: &RmcCoreset, rstar: f64, oracle: &DistanceOracle<'_>) -> Result<bool> {
    let audit = coreset.audit.as_ref().ok_or(Error::MissingAudit)?;
    let bound = coreset.eps_prime * rstar;
    Ok(audit
        .proxy
        .iter()
        .all(|(&j, &p)| oracle.dist(j, p) <= bound))
}

/// Largest proxy distance `max_j d(j, p(j))`.
pub fn max_proxy_distance(coreset: &RmcCoreset, oracle: &DistanceOracle<'_>) -> Result<f64> {
    let audit = coreset.audit.as_ref().ok_or(Error::MissingAudit)?;
    Ok(audit
        .proxy
        .iter()
        .map(|(&j, &p)| oracle.dist(j, p))
        .fold(0.0, f64::max))
}

/// Transport certificate for one independent set `x`.
///
/// Builds the injective map into the coreset element by element: an element
/// already in its cluster's block maps to itself; otherwise it is swapped for
/// an augmenting element of that block. Returns whether the image is
/// independent, injective and within `eps' * rstar` of the originals.
pub fn certify_c2(
    coreset: &RmcCoreset,
    x: &[PointId],
    rstar: f64,
    matroid: &dyn Matroid,
    oracle: &DistanceOracle<'_>,
) -> Result<bool> {
    Ok(transport(coreset, x, matroid)?.is_some_and(|image| {
        let bound = coreset.eps_prime * rstar;
        let distinct: BTreeSet<_> = image.iter().collect();
        distinct.len() == image.len()
            && matroid.independent(&image)
            && x.iter()
                .zip(&image)
                .all(|(&a, &b)| oracle.dist(a, b) <= bound)
    }))
}

/// The element-wise map of [`certify_c2`]; `None` when no augmenting element
/// exists (impossible for a genuine matroid).
pub fn transport(
    coreset: &RmcCoreset,
    x: &[PointId],
    matroid: &dyn Matroid,
) -> Result<Option<Vec<PointId>>> {
    let audit = coreset.audit.as_ref().ok_or(Error::MissingAudit)?;
    if !crate::matroid::is_independent(x, matroid)? {
        return Err(Error::InvalidParameter("X must be independent"));
    }
    let mut image = x.to_vec();
    for a in 0..x.len() {
        let point = x[a];
        let l = *audit
            .cluster
            .get(&point)
            .ok_or(Error::InvalidPointId(point))?;
        let block = &coreset.blocks[l];
        if block.contains(&point) {
            continue;
        }
        let rest: Vec<PointId> = image
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != a)
            .map(|(_, &p)| p)
            .collect();
        let cluster = coreset.cluster_points(l)?;
        match augment_witness(&rest, &cluster, block, point, matroid)? {
            Some(w) => image[a] = w,
            None => return Ok(None),
        }
    }
    Ok(Some(image))
}

/// A center set with its robust cost.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RobustSolution {
    /// Ascending ids.
    pub centers: Vec<PointId>,
    pub cost: f64,
    pub z: u64,
    pub epsilon: Option<f64>,
}

/// A solver for robust matroid center with multiplicities.
pub trait RmcmSolver {
    /// Approximation ratio the solver is credited with.
    fn alpha(&self) -> f64;
    fn name(&self) -> &'static str;
    /// Solves on `points` with the matroid restricted to their ids.
    fn solve(
        &self,
        points: &[MultiplicityPoint],
        matroid: &dyn Matroid,
        z: u64,
        oracle: &DistanceOracle<'_>,
    ) -> Result<RobustSolution>;
}

/// Exhaustive search over the independent subsets of the coreset.
#[derive(Debug, Clone, Copy)]
pub struct ExactRmcm {
    pub budget: u128,
}

impl Default for ExactRmcm {
    fn default() -> Self {
        ExactRmcm {
            budget: EXACT_SOLVER_BUDGET,
        }
    }
}

impl RmcmSolver for ExactRmcm {
    fn alpha(&self) -> f64 {
        1.0
    }

    fn name(&self) -> &'static str {
        "exact"
    }

    fn solve(
        &self,
        points: &[MultiplicityPoint],
        matroid: &dyn Matroid,
        z: u64,
        oracle: &DistanceOracle<'_>,
    ) -> Result<RobustSolution> {
        solve_rmcm_exact(points, matroid, z, oracle, self.budget)
    }
}

/// Swap-based local search; credited with ratio 3 but carries no guarantee.
#[derive(Debug, Clone, Copy)]
pub struct LocalSearchRmcm {
    pub max_rounds: usize,
}

impl Default for LocalSearchRmcm {
    fn default() -> Self {
        LocalSearchRmcm { max_rounds: 200 }
    }
}

impl RmcmSolver for LocalSearchRmcm {
    fn alpha(&self) -> f64 {
        3.0
    }

    fn name(&self) -> &'static str {
        "heuristic"
    }

    fn solve(
        &self,
        points: &[MultiplicityPoint],
        matroid: &dyn Matroid,
        z: u64,
        oracle: &DistanceOracle<'_>,
    ) -> Result<RobustSolution> {
        solve_rmcm_heuristic(points, matroid, z, oracle, self.max_rounds)
    }
}

/// Weighted points sorted by id with their local distance matrix.
pub(crate) struct LocalView {
    pub ids: Vec<PointId>,
    pub mass: Vec<u64>,
    pub dm: Vec<f64>,
}

impl LocalView {
    pub(crate) fn new(
        points: &[MultiplicityPoint],
        z: u64,
        oracle: &DistanceOracle<'_>,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("empty coreset"));
        }
        let mut sorted = points.to_vec();
        sorted.sort_unstable_by_key(|p| p.id);
        if sorted.windows(2).any(|w| w[0].id == w[1].id) {
            return Err(Error::InvalidParameter("coreset repeats a point"));
        }
        if sorted.iter().any(|p| p.multiplicity == 0) {
            return Err(Error::InvalidParameter("multiplicities must be positive"));
        }
        let ids: Vec<PointId> = sorted.iter().map(|p| p.id).collect();
        oracle.check_all(&ids)?;
        let mass: Vec<u64> = sorted.iter().map(|p| p.multiplicity).collect();
        let total: u64 = mass.iter().sum();
        if z >= total {
            return Err(Error::OutlierBudgetExhausted { z, mass: total });
        }
        let dm = oracle.local_matrix(&ids);
        Ok(LocalView { ids, mass, dm })
    }

    pub(crate) fn len(&self) -> usize {
        self.ids.len()
    }

    /// Robust cost given each point's distance to the center set.
    pub(crate) fn cost_from(&self, dist: &[f64], z: u64) -> f64 {
        let entries = dist
            .iter()
            .zip(&self.ids)
            .zip(&self.mass)
            .map(|((&d, &id), &m)| (d, id, m))
            .collect();
        robust_order_statistic(entries, z).expect("z checked against total mass")
    }

    /// Distances of every point to the centers at local indices `set`.
    pub(crate) fn dist_to(&self, set: &[usize]) -> Vec<f64> {
        let m = self.len();
        (0..m)
            .map(|i| {
                set.iter()
                    .map(|&c| self.dm[i * m + c])
                    .fold(f64::INFINITY, f64::min)
            })
            .collect()
    }

    pub(crate) fn cost_of(&self, set: &[usize], z: u64) -> f64 {
        self.cost_from(&self.dist_to(set), z)
    }

    pub(crate) fn to_ids(&self, set: &[usize]) -> Vec<PointId> {
        set.iter().map(|&i| self.ids[i]).collect()
    }
}

/// Exact optimum of the multiplicity instance by depth-first enumeration of
/// independent subsets in ascending id order (dependent prefixes are pruned).
/// The lexicographically smallest optimal center set wins ties.
pub fn solve_rmcm_exact(
    points: &[MultiplicityPoint],
    matroid: &dyn Matroid,
    z: u64,
    oracle: &DistanceOracle<'_>,
    budget: u128,
) -> Result<RobustSolution> {
    let view = LocalView::new(points, z, oracle)?;
    let m = view.len();
    let rank = matroid.greedy(&view.ids).len();
    if subsets_up_to(m, rank) > budget {
        return Err(Error::SolverBudgetExceeded { budget });
    }

    struct Search<'v> {
        view: &'v LocalView,
        matroid: &'v dyn Matroid,
        z: u64,
        chosen: Vec<usize>,
        chosen_ids: Vec<PointId>,
        best: Option<(f64, Vec<usize>)>,
    }

    impl Search<'_> {
        fn descend(&mut self, start: usize, dist: &[f64]) {
            let m = self.view.len();
            for next in start..m {
                self.chosen_ids.push(self.view.ids[next]);
                if self.matroid.independent(&self.chosen_ids) {
                    self.chosen.push(next);
                    let refined: Vec<f64> = dist
                        .iter()
                        .enumerate()
                        .map(|(i, &d)| d.min(self.view.dm[i * m + next]))
                        .collect();
                    let cost = self.view.cost_from(&refined, self.z);
                    // depth-first ascending order visits sets lexicographically
                    if self.best.as_ref().is_none_or(|b| cost < b.0) {
                        self.best = Some((cost, self.chosen.clone()));
                    }
                    self.descend(next + 1, &refined);
                    self.chosen.pop();
                }
                self.chosen_ids.pop();
            }
        }
    }

    let mut search = Search {
        view: &view,
        matroid,
        z,
        chosen: Vec::new(),
        chosen_ids: Vec::new(),
        best: None,
    };
    search.descend(0, &vec![f64::INFINITY; m]);
    let (cost, set) = search.best.expect("singletons are independent");
    Ok(RobustSolution {
        centers: view.to_ids(&set),
        cost,
        z,
        epsilon: None,
    })
}

/// Local search: start from a greedy basis (heaviest points first), then
/// apply improving single swaps until none remains or `max_rounds` is hit.
pub fn solve_rmcm_heuristic(
    points: &[MultiplicityPoint],
    matroid: &dyn Matroid,
    z: u64,
    oracle: &DistanceOracle<'_>,
    max_rounds: usize,
) -> Result<RobustSolution> {
    let view = LocalView::new(points, z, oracle)?;
    let m = view.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| view.mass[b].cmp(&view.mass[a]).then(a.cmp(&b)));
    let order_ids: Vec<PointId> = order.iter().map(|&i| view.ids[i]).collect();
    let basis = matroid.greedy(&order_ids);
    let mut set: Vec<usize> = basis
        .iter()
        .map(|id| {
            view.ids
                .binary_search(id)
                .expect("basis drawn from the view")
        })
        .collect();
    let mut cost = view.cost_of(&set, z);

    for _ in 0..max_rounds {
        let mut improved = false;
        'scan: for pos in 0..set.len() {
            for cand in 0..m {
                if set.contains(&cand) {
                    continue;
                }
                let mut trial = set.clone();
                trial[pos] = cand;
                if !matroid.independent(&view.to_ids(&trial)) {
                    continue;
                }
                let c = view.cost_of(&trial, z);
                if cmp_dist(c, cost).is_lt() {
                    set = trial;
                    cost = c;
                    improved = true;
                    break 'scan;
                }
            }
        }
        if !improved {
            break;
        }
    }
    let mut centers = view.to_ids(&set);
    centers.sort_unstable();
    Ok(RobustSolution {
        centers,
        cost,
        z,
        epsilon: None,
    })
}

/// Result of the end-to-end pipeline.
#[derive(Debug, Clone)]
pub struct RmcOutcome {
    /// Centers with their robust cost on the full dataset.
    pub solution: RobustSolution,
    /// Robust cost of the centers on the coreset, with multiplicities.
    pub coreset_cost: f64,
    pub coreset: RmcCoreset,
}

/// `eps' = eps / (2 alpha + 1)`.
pub fn coreset_eps(eps: f64, alpha: f64) -> f64 {
    eps / (2.0 * alpha + 1.0)
}

/// Coreset pipeline with farthest-first traversal for the `(k+z)`-center step.
pub fn solve_rmc(inst: &RmcInstance<'_>, eps: f64, solver: &dyn RmcmSolver) -> Result<RmcOutcome> {
    solve_rmc_with(inst, eps, solver, &Gonzalez)
}

pub fn solve_rmc_with(
    inst: &RmcInstance<'_>,
    eps: f64,
    solver: &dyn RmcmSolver,
    kcenter: &dyn KCenter,
) -> Result<RmcOutcome> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter("epsilon must lie in (0, 1)"));
    }
    let eps_prime = coreset_eps(eps, solver.alpha());
    let coreset = build_rmc_coreset(inst, eps_prime, kcenter)?;
    finish_rmc(inst, eps, solver, coreset)
}

/// Solves on a finished coreset and re-evaluates the answer on the full data.
pub fn finish_rmc(
    inst: &RmcInstance<'_>,
    eps: f64,
    solver: &dyn RmcmSolver,
    coreset: RmcCoreset,
) -> Result<RmcOutcome> {
    let z = inst.z() as u64;
    let on_coreset = solver.solve(&coreset.members, inst.matroid(), z, inst.oracle())?;
    let all: Vec<PointId> = (0..inst.len()).map(PointId).collect();
    let cost = robust_cost_unit(&on_coreset.centers, &all, z, inst.oracle())?;
    Ok(RmcOutcome {
        solution: RobustSolution {
            centers: on_coreset.centers,
            cost,
            z,
            epsilon: Some(eps),
        },
        coreset_cost: on_coreset.cost,
        coreset,
    })
}

/// Exact optimum over all independent subsets of `V` (ground-truth oracle).
pub fn brute_force_rmc(inst: &RmcInstance<'_>) -> Result<RobustSolution> {
    brute_force_rmc_with_budget(inst, RMC_ORACLE_BUDGET)
}

pub fn brute_force_rmc_with_budget(inst: &RmcInstance<'_>, budget: u128) -> Result<RobustSolution> {
    let n = inst.len();
    let needed = subsets_up_to(n, inst.rank());
    if needed > budget {
        return Err(Error::OracleBudgetExceeded { needed, budget });
    }
    let ids: Vec<PointId> = (0..n).map(PointId).collect();
    let dm = inst.oracle().local_matrix(&ids);
    let z = inst.z() as u64;
    let mut best: Option<(f64, Vec<usize>)> = None;
    for size in 1..=inst.rank() {
        for_each_combination(n, size, |combo| {
            let set: Vec<PointId> = combo.iter().map(|&i| PointId(i)).collect();
            if !inst.matroid().independent(&set) {
                return;
            }
            let entries = (0..n)
                .map(|j| {
                    let d = combo
                        .iter()
                        .map(|&c| dm[j * n + c])
                        .fold(f64::INFINITY, f64::min);
                    (d, PointId(j), 1)
                })
                .collect();
            let cost = robust_order_statistic(entries, z).expect("z < n");
            let better = match &best {
                None => true,
                Some((c, s)) => cmp_dist(cost, *c).is_lt() || (cost == *c && combo < s.as_slice()),
            };
            if better {
                best = Some((cost, combo.to_vec()));
            }
        });
    }
    let (cost, combo) = best.expect("every singleton is independent");
    Ok(RobustSolution {
        centers: combo.into_iter().map(PointId).collect(),
        cost,
        z,
        epsilon: None,
    })
}
