//! Robust knapsack center: the guess-and-test loop over the number of
//! clusters `tau`, solvers for the multiplicity variant, and the exhaustive
//! oracle.
//!
//! Each iteration clusters the data around `tau` farthest-first centers
//! (radius `r1`), keeps the lightest point of every cluster with the cluster
//! size as multiplicity, and solves the small weighted instance (cost `r2`).
//! The loop stops once `r1` is negligible next to `r2`.

use alloc::vec::Vec;

use crate::combinatorics::{for_each_combination, subsets_up_to};
use crate::error::{Error, Result};
use crate::kcenter::{cluster_assign, Gonzalez, KCenter};
use crate::metric::{
    cmp_dist, robust_cost, robust_cost_unit, robust_order_statistic, DistanceOracle,
    MultiplicityPoint, PointId,
};
use crate::rmc::{LocalView, RobustSolution};

/// Default node budget of the exact solver's search.
pub const RKCM_NODE_BUDGET: u128 = 1 << 22;
/// Default enumeration budget for [`brute_force_rkc`].
pub const RKC_ORACLE_BUDGET: u128 = 1 << 22;

/// A robust knapsack center instance: weighted data and outlier budget.
#[derive(Debug, Clone, Copy)]
pub struct RkcInstance<'a> {
    oracle: &'a DistanceOracle<'a>,
    weights: &'a [f64],
    z: usize,
}

impl<'a> RkcInstance<'a> {
    pub fn new(oracle: &'a DistanceOracle<'a>, z: usize) -> Result<Self> {
        let n = oracle.len();
        if n == 0 {
            return Err(Error::InvalidParameter("empty dataset"));
        }
        let weights = oracle
            .dataset()
            .weights()
            .ok_or(Error::InvalidParameter("dataset has no weights"))?;
        if z >= n {
            return Err(Error::InvalidParameter("z must be smaller than |V|"));
        }
        Ok(RkcInstance { oracle, weights, z })
    }

    pub fn oracle(&self) -> &'a DistanceOracle<'a> {
        self.oracle
    }

    pub fn weights(&self) -> &'a [f64] {
        self.weights
    }

    pub fn weight(&self, id: PointId) -> f64 {
        self.weights[id.0]
    }

    pub fn z(&self) -> usize {
        self.z
    }

    pub fn len(&self) -> usize {
        self.oracle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.oracle.is_empty()
    }
}

/// Total weight of `centers`, summed in ascending id order.
pub fn knapsack_weight(centers: &[PointId], weights: &[f64]) -> f64 {
    let mut sorted = centers.to_vec();
    sorted.sort_unstable();
    sorted.iter().map(|p| weights[p.0]).sum()
}

/// Whether `centers` fits the unit knapsack.
pub fn is_feasible(centers: &[PointId], weights: &[f64]) -> bool {
    !centers.is_empty() && knapsack_weight(centers, weights) <= 1.0
}

/// A coreset point: cluster representative with weight and cluster size.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RkcMember {
    pub id: PointId,
    pub weight: f64,
    pub multiplicity: u64,
}

impl RkcMember {
    pub fn as_multiplicity(&self) -> MultiplicityPoint {
        MultiplicityPoint::new(self.id, self.multiplicity)
    }
}

/// Coreset of one loop iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct RkcCoreset {
    pub members: Vec<RkcMember>,
    pub tau: usize,
    /// Coverage radius of the clustering (largest over partitions for a union).
    pub r1: f64,
}

impl RkcCoreset {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn total_mass(&self) -> u64 {
        self.members.iter().map(|m| m.multiplicity).sum()
    }

    pub fn multiplicity_points(&self) -> Vec<MultiplicityPoint> {
        self.members
            .iter()
            .map(RkcMember::as_multiplicity)
            .collect()
    }
}

/// Lightest point of each cluster (ties to the lowest id) with the cluster size.
pub fn cluster_representatives(clusters: &[Vec<PointId>], weights: &[f64]) -> Vec<RkcMember> {
    clusters
        .iter()
        .filter(|c| !c.is_empty())
        .map(|c| {
            let id = *c
                .iter()
                .min_by(|a, b| weights[a.0].total_cmp(&weights[b.0]).then(a.cmp(b)))
                .expect("cluster is non-empty");
            RkcMember {
                id,
                weight: weights[id.0],
                multiplicity: c.len() as u64,
            }
        })
        .collect()
}

/// How `tau` grows between iterations.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Progression {
    /// `tau <- 2 tau`.
    Double,
    /// `tau <- ceil(|V|^eta * tau)`.
    Pow { eta: f64 },
}

impl Progression {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Progression::Double => Ok(()),
            Progression::Pow { eta } if eta > 0.0 && eta <= 1.0 => Ok(()),
            Progression::Pow { .. } => Err(Error::InvalidParameter("eta must lie in (0, 1]")),
        }
    }

    /// Next value of `tau`; strictly larger than `tau` until it reaches `n`.
    pub fn next(&self, tau: usize, n: usize) -> usize {
        let grown = match *self {
            Progression::Double => tau.saturating_mul(2),
            Progression::Pow { eta } => {
                let scaled = libm::ceil(libm::pow(n as f64, eta) * tau as f64);
                if scaled >= n as f64 {
                    n
                } else {
                    scaled as usize
                }
            }
        };
        grown.max(tau + 1).min(n)
    }
}

/// The stopping rule in division-free form.
///
/// Stops when `r1 = 0`, or when `r2 - 4 alpha r1 > 0` and
/// `alpha (4 alpha + 2) r1 <= eps (r2 - 4 alpha r1)`.
pub fn stop_test(r1: f64, r2: f64, eps: f64, alpha: f64) -> bool {
    if r1 == 0.0 {
        return true;
    }
    let gap = r2 - 4.0 * alpha * r1;
    gap > 0.0 && alpha * (4.0 * alpha + 2.0) * r1 <= eps * gap
}

/// The ratio `alpha (4 alpha + 2) r1 / (r2 - 4 alpha r1)` when defined.
pub fn stop_value(r1: f64, r2: f64, alpha: f64) -> Option<f64> {
    let gap = r2 - 4.0 * alpha * r1;
    (gap > 0.0).then(|| alpha * (4.0 * alpha + 2.0) * r1 / gap)
}

/// One iteration of the loop.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LoopRecord {
    pub tau: usize,
    pub r1: f64,
    pub r2: f64,
    pub stop_value: Option<f64>,
    pub stopped: bool,
    /// Cost the solver reported on the coreset.
    pub solver_cost: f64,
    /// Robust cost of the iteration's centers on the full data, when evaluated.
    pub full_cost: Option<f64>,
    pub coreset_size: usize,
    pub centers: Vec<PointId>,
}

#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LoopTrace {
    pub records: Vec<LoopRecord>,
}

impl LoopTrace {
    /// `tau` of the last iteration.
    pub fn final_tau(&self) -> Option<usize> {
        self.records.last().map(|r| r.tau)
    }

    pub fn iterations(&self) -> usize {
        self.records.len()
    }
}

/// A solver for robust knapsack center with multiplicities.
pub trait RkcmSolver {
    fn alpha(&self) -> f64;
    fn name(&self) -> &'static str;
    fn solve(
        &self,
        members: &[RkcMember],
        z: u64,
        oracle: &DistanceOracle<'_>,
    ) -> Result<RobustSolution>;
}

/// Exhaustive search over weight-feasible subsets.
#[derive(Debug, Clone, Copy)]
pub struct ExactRkcm {
    pub budget: u128,
}

impl Default for ExactRkcm {
    fn default() -> Self {
        ExactRkcm {
            budget: RKCM_NODE_BUDGET,
        }
    }
}

impl RkcmSolver for ExactRkcm {
    fn alpha(&self) -> f64 {
        1.0
    }

    fn name(&self) -> &'static str {
        "exact"
    }

    fn solve(
        &self,
        members: &[RkcMember],
        z: u64,
        oracle: &DistanceOracle<'_>,
    ) -> Result<RobustSolution> {
        solve_rkcm_exact(members, z, oracle, self.budget)
    }
}

/// Local search with weight-feasible swaps and additions; credited with
/// ratio 3 but carries no guarantee.
#[derive(Debug, Clone, Copy)]
pub struct LocalSearchRkcm {
    pub max_rounds: usize,
}

impl Default for LocalSearchRkcm {
    fn default() -> Self {
        LocalSearchRkcm { max_rounds: 200 }
    }
}

impl RkcmSolver for LocalSearchRkcm {
    fn alpha(&self) -> f64 {
        3.0
    }

    fn name(&self) -> &'static str {
        "heuristic"
    }

    fn solve(
        &self,
        members: &[RkcMember],
        z: u64,
        oracle: &DistanceOracle<'_>,
    ) -> Result<RobustSolution> {
        solve_rkcm_heuristic(members, z, oracle, self.max_rounds)
    }
}

fn view_and_weights(
    members: &[RkcMember],
    z: u64,
    oracle: &DistanceOracle<'_>,
) -> Result<(LocalView, Vec<f64>)> {
    for m in members {
        if !(0.0..=1.0).contains(&m.weight) {
            return Err(Error::InvalidWeight(m.id));
        }
    }
    let points: Vec<MultiplicityPoint> = members.iter().map(RkcMember::as_multiplicity).collect();
    let view = LocalView::new(&points, z, oracle)?;
    let weights = view
        .ids
        .iter()
        .map(|id| {
            members
                .iter()
                .find(|m| m.id == *id)
                .expect("same ids")
                .weight
        })
        .collect();
    Ok((view, weights))
}

/// Exact optimum by depth-first search in ascending id order, pruning
/// subsets whose weight exceeds 1. Lexicographically smallest optimum wins.
pub fn solve_rkcm_exact(
    members: &[RkcMember],
    z: u64,
    oracle: &DistanceOracle<'_>,
    budget: u128,
) -> Result<RobustSolution> {
    let (view, weights) = view_and_weights(members, z, oracle)?;
    let m = view.len();

    struct Search<'v> {
        view: &'v LocalView,
        weights: &'v [f64],
        z: u64,
        chosen: Vec<usize>,
        best: Option<(f64, Vec<usize>)>,
        nodes: u128,
        budget: u128,
    }

    impl Search<'_> {
        fn descend(&mut self, start: usize, load: f64, dist: &[f64]) -> Result<()> {
            let m = self.view.len();
            for next in start..m {
                let w = load + self.weights[next];
                if w > 1.0 {
                    continue;
                }
                self.nodes += 1;
                if self.nodes > self.budget {
                    return Err(Error::SolverBudgetExceeded {
                        budget: self.budget,
                    });
                }
                self.chosen.push(next);
                let refined: Vec<f64> = dist
                    .iter()
                    .enumerate()
                    .map(|(i, &d)| d.min(self.view.dm[i * m + next]))
                    .collect();
                let cost = self.view.cost_from(&refined, self.z);
                if self.best.as_ref().is_none_or(|b| cost < b.0) {
                    self.best = Some((cost, self.chosen.clone()));
                }
                self.descend(next + 1, w, &refined)?;
                self.chosen.pop();
            }
            Ok(())
        }
    }

    let mut search = Search {
        view: &view,
        weights: &weights,
        z,
        chosen: Vec::new(),
        best: None,
        nodes: 0,
        budget,
    };
    search.descend(0, 0.0, &alloc::vec![f64::INFINITY; m])?;
    let (cost, set) = search
        .best
        .ok_or(Error::Infeasible("every point is heavier than the budget"))?;
    Ok(RobustSolution {
        centers: view.to_ids(&set),
        cost,
        z,
        epsilon: None,
    })
}

/// Local search: greedy knapsack fill by multiplicity, then improving
/// swaps or additions until none remains or `max_rounds` is hit.
pub fn solve_rkcm_heuristic(
    members: &[RkcMember],
    z: u64,
    oracle: &DistanceOracle<'_>,
    max_rounds: usize,
) -> Result<RobustSolution> {
    let (view, weights) = view_and_weights(members, z, oracle)?;
    let m = view.len();
    let load = |set: &[usize]| {
        let mut s = set.to_vec();
        s.sort_unstable();
        s.iter().map(|&i| weights[i]).sum::<f64>()
    };
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| view.mass[b].cmp(&view.mass[a]).then(a.cmp(&b)));
    let mut set: Vec<usize> = Vec::new();
    for i in order {
        let mut trial = set.clone();
        trial.push(i);
        if load(&trial) <= 1.0 {
            set = trial;
        }
    }
    if set.is_empty() {
        return Err(Error::Infeasible("every point is heavier than the budget"));
    }
    let mut cost = view.cost_of(&set, z);

    for _ in 0..max_rounds {
        let mut next = None;
        'scan: for cand in 0..m {
            if set.contains(&cand) {
                continue;
            }
            let mut moves: Vec<Vec<usize>> = (0..set.len())
                .map(|pos| {
                    let mut t = set.clone();
                    t[pos] = cand;
                    t
                })
                .collect();
            let mut grown = set.clone();
            grown.push(cand);
            moves.push(grown);
            for trial in moves {
                if load(&trial) > 1.0 {
                    continue;
                }
                let c = view.cost_of(&trial, z);
                if cmp_dist(c, cost).is_lt() {
                    next = Some((trial, c));
                    break 'scan;
                }
            }
        }
        match next {
            Some((trial, c)) => {
                set = trial;
                cost = c;
            }
            None => break,
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

/// Outcome of one coreset-and-test step.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub centers: Vec<PointId>,
    pub r1: f64,
    pub r2: f64,
    pub solver_cost: f64,
    pub coreset: RkcCoreset,
}

/// One iteration: cluster with `tau` centers, summarize, solve, evaluate.
pub fn coreset_compute_and_test(
    inst: &RkcInstance<'_>,
    tau: usize,
    solver: &dyn RkcmSolver,
    kcenter: &dyn KCenter,
) -> Result<StepOutcome> {
    let all: Vec<PointId> = (0..inst.len()).map(PointId).collect();
    let coreset = build_rkc_coreset_on(inst, &all, tau, kcenter)?;
    solve_step(inst, solver, coreset)
}

/// The summary of `points` for `tau` clusters.
pub fn build_rkc_coreset_on(
    inst: &RkcInstance<'_>,
    points: &[PointId],
    tau: usize,
    kcenter: &dyn KCenter,
) -> Result<RkcCoreset> {
    if tau == 0 {
        return Err(Error::InvalidParameter("tau must be at least 1"));
    }
    let tau = tau.min(points.len());
    let oracle = inst.oracle();
    let centers = kcenter.solve(points, tau, oracle)?;
    let clustering = cluster_assign(points, &centers.centers, oracle)?;
    Ok(RkcCoreset {
        members: cluster_representatives(&clustering.clusters(), inst.weights()),
        tau,
        r1: centers.radius,
    })
}

/// Solves a (possibly merged) coreset and records `r2`.
pub fn solve_step(
    inst: &RkcInstance<'_>,
    solver: &dyn RkcmSolver,
    coreset: RkcCoreset,
) -> Result<StepOutcome> {
    let z = inst.z() as u64;
    let sol = solver.solve(&coreset.members, z, inst.oracle())?;
    let r2 = robust_cost(
        &sol.centers,
        &coreset.multiplicity_points(),
        z,
        inst.oracle(),
    )?;
    Ok(StepOutcome {
        centers: sol.centers,
        r1: coreset.r1,
        r2,
        solver_cost: sol.cost,
        coreset,
    })
}

/// Drives the loop; `step(tau)` runs one iteration and `audit` optionally
/// evaluates a center set on the full data.
pub fn run_loop(
    n: usize,
    eps: f64,
    alpha: f64,
    progression: Progression,
    mut step: impl FnMut(usize) -> Result<StepOutcome>,
    mut audit: impl FnMut(&[PointId]) -> Result<Option<f64>>,
) -> Result<(Vec<PointId>, LoopTrace)> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter("epsilon must lie in (0, 1)"));
    }
    if alpha < 1.0 {
        return Err(Error::InvalidParameter("alpha must be at least 1"));
    }
    progression.validate()?;
    let mut trace = LoopTrace::default();
    let mut tau = 1usize;
    loop {
        let out = step(tau)?;
        let stopped = stop_test(out.r1, out.r2, eps, alpha);
        let full_cost = audit(&out.centers)?;
        trace.records.push(LoopRecord {
            tau,
            r1: out.r1,
            r2: out.r2,
            stop_value: stop_value(out.r1, out.r2, alpha),
            stopped,
            solver_cost: out.solver_cost,
            full_cost,
            coreset_size: out.coreset.len(),
            centers: out.centers.clone(),
        });
        if stopped {
            return Ok((out.centers, trace));
        }
        if tau >= n {
            return Err(Error::Infeasible(
                "clustering at tau = |V| left a positive radius",
            ));
        }
        tau = progression.next(tau, n);
    }
}

/// Result of the loop.
#[derive(Debug, Clone)]
pub struct RkcOutcome {
    /// Final centers with their robust cost on the full data.
    pub solution: RobustSolution,
    pub trace: LoopTrace,
}

/// The guess-and-test loop with farthest-first clustering.
pub fn rknap_center(
    inst: &RkcInstance<'_>,
    eps: f64,
    solver: &dyn RkcmSolver,
    progression: Progression,
) -> Result<RkcOutcome> {
    rknap_center_with(inst, eps, solver, progression, &Gonzalez)
}

pub fn rknap_center_with(
    inst: &RkcInstance<'_>,
    eps: f64,
    solver: &dyn RkcmSolver,
    progression: Progression,
    kcenter: &dyn KCenter,
) -> Result<RkcOutcome> {
    let all: Vec<PointId> = (0..inst.len()).map(PointId).collect();
    let z = inst.z() as u64;
    let (centers, trace) = run_loop(
        inst.len(),
        eps,
        solver.alpha(),
        progression,
        |tau| coreset_compute_and_test(inst, tau, solver, kcenter),
        |s| robust_cost_unit(s, &all, z, inst.oracle()).map(Some),
    )?;
    let cost = trace
        .records
        .last()
        .and_then(|r| r.full_cost)
        .expect("audit always evaluates");
    Ok(RkcOutcome {
        solution: RobustSolution {
            centers,
            cost,
            z,
            epsilon: Some(eps),
        },
        trace,
    })
}

/// Ground truth for robust knapsack center.
#[derive(Debug, Clone, PartialEq)]
pub struct RkcOptimum {
    pub solution: RobustSolution,
    /// Fewest centers among all optimal solutions.
    pub min_cardinality: usize,
}

/// Exact optimum over all weight-feasible subsets of `V`.
pub fn brute_force_rkc(inst: &RkcInstance<'_>) -> Result<RkcOptimum> {
    brute_force_rkc_with_budget(inst, RKC_ORACLE_BUDGET)
}

pub fn brute_force_rkc_with_budget(inst: &RkcInstance<'_>, budget: u128) -> Result<RkcOptimum> {
    let n = inst.len();
    let w = inst.weights();
    let mut sorted = w.to_vec();
    sorted.sort_by(f64::total_cmp);
    // no feasible set is larger than the count of lightest weights fitting
    let mut max_size = 0;
    let mut acc = 0.0;
    for &x in &sorted {
        acc += x;
        if acc > 1.0 + 1e-9 {
            break;
        }
        max_size += 1;
    }
    if max_size == 0 {
        return Err(Error::Infeasible("every point is heavier than the budget"));
    }
    let needed = subsets_up_to(n, max_size);
    if needed > budget {
        return Err(Error::OracleBudgetExceeded { needed, budget });
    }
    let ids: Vec<PointId> = (0..n).map(PointId).collect();
    let dm = inst.oracle().local_matrix(&ids);
    let z = inst.z() as u64;
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut min_card = usize::MAX;
    for size in 1..=max_size {
        for_each_combination(n, size, |combo| {
            if combo.iter().map(|&i| w[i]).sum::<f64>() > 1.0 {
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
            match &best {
                Some((c, s)) if cost == *c => {
                    min_card = min_card.min(size);
                    if combo < s.as_slice() {
                        best = Some((cost, combo.to_vec()));
                    }
                }
                Some((c, _)) if cmp_dist(cost, *c).is_ge() => {}
                _ => {
                    best = Some((cost, combo.to_vec()));
                    min_card = size;
                }
            }
        });
    }
    let (cost, combo) = best.ok_or(Error::Infeasible("no weight-feasible center"))?;
    Ok(RkcOptimum {
        solution: RobustSolution {
            centers: combo.into_iter().map(PointId).collect(),
            cost,
            z,
            epsilon: None,
        },
        min_cardinality: min_card,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Dataset;
    use alloc::vec;

    fn ids(v: &[usize]) -> Vec<PointId> {
        v.iter().map(|&i| PointId(i)).collect()
    }

    fn member(id: usize, weight: f64, multiplicity: u64) -> RkcMember {
        RkcMember {
            id: PointId(id),
            weight,
            multiplicity,
        }
    }

    #[test]
    fn stop_rule_arithmetic() {
        // alpha = 3: 42 r1 <= eps (r2 - 12 r1)
        assert!(stop_test(1.0, 100.0, 0.5, 3.0));
        assert!(!stop_test(1.0, 95.0, 0.5, 3.0));
        assert!(stop_test(1.0, 96.0, 0.5, 3.0));
        assert_eq!(stop_value(1.0, 96.0, 3.0), Some(0.5));
        assert!(stop_test(0.0, 5.0, 0.1, 1.0));
        assert!(stop_test(0.0, 0.0, 0.1, 1.0));
        assert!(!stop_test(1.0, 4.0, 0.9, 1.0));
        assert_eq!(stop_value(1.0, 4.0, 1.0), None);
    }

    #[test]
    fn progressions() {
        assert_eq!(Progression::Double.next(1, 10), 2);
        assert_eq!(Progression::Double.next(8, 10), 10);
        let p = Progression::Pow { eta: 0.5 };
        assert_eq!(p.next(1, 16), 4);
        assert_eq!(p.next(4, 16), 16);
        assert_eq!(Progression::Pow { eta: 0.01 }.next(3, 16), 4);
        assert!(Progression::Pow { eta: 0.0 }.validate().is_err());
    }

    #[test]
    fn exact_solver_examples() {
        let ds = Dataset::from_line(&[0.0, 10.0]).unwrap();
        let o = DistanceOracle::new(&ds);
        let t = [member(0, 0.6, 3), member(1, 0.5, 1)];
        let s = solve_rkcm_exact(&t, 0, &o, RKCM_NODE_BUDGET).unwrap();
        assert_eq!(s.centers, ids(&[0]));
        assert_eq!(s.cost, 10.0);
        let s = solve_rkcm_exact(&t, 1, &o, RKCM_NODE_BUDGET).unwrap();
        assert_eq!(s.centers, ids(&[0]));
        assert_eq!(s.cost, 0.0);

        let heavy = [member(0, 1.0, 1), member(1, 1.0, 5)];
        let s = solve_rkcm_exact(&heavy, 0, &o, RKCM_NODE_BUDGET).unwrap();
        assert_eq!(s.centers.len(), 1);
        assert!(matches!(
            solve_rkcm_exact(&[member(0, 0.0, 1), member(1, 0.0, 1)], 0, &o, 1),
            Err(Error::SolverBudgetExceeded { .. })
        ));
    }

    #[test]
    fn brute_force_examples() {
        let ds = Dataset::from_line(&[0.0, 1.0, 2.0, 10.0])
            .unwrap()
            .with_weights(vec![0.6; 4])
            .unwrap();
        let o = DistanceOracle::new(&ds);
        let inst = RkcInstance::new(&o, 0).unwrap();
        let best = brute_force_rkc(&inst).unwrap();
        // singletons only: {0}:10 {1}:9 {2}:8 {10}:10
        assert_eq!(best.solution.centers, ids(&[2]));
        assert_eq!(best.solution.cost, 8.0);
        assert_eq!(best.min_cardinality, 1);

        let inst = RkcInstance::new(&o, 3).unwrap();
        assert_eq!(brute_force_rkc(&inst).unwrap().solution.cost, 0.0);

        let free = Dataset::from_line(&[0.0, 1.0, 2.0, 10.0])
            .unwrap()
            .with_weights(vec![0.0; 4])
            .unwrap();
        let o = DistanceOracle::new(&free);
        let inst = RkcInstance::new(&o, 0).unwrap();
        let best = brute_force_rkc(&inst).unwrap();
        assert_eq!(best.solution.cost, 0.0);
        assert_eq!(best.min_cardinality, 4);
    }

    #[test]
    fn coreset_step_examples() {
        let ds = Dataset::from_line(&[0.0, 1.0, 2.0, 10.0])
            .unwrap()
            .with_weights(vec![0.5, 0.2, 0.2, 0.9])
            .unwrap();
        let o = DistanceOracle::new(&ds);
        let inst = RkcInstance::new(&o, 1).unwrap();
        let one = coreset_compute_and_test(&inst, 1, &ExactRkcm::default(), &Gonzalez).unwrap();
        assert_eq!(one.coreset.members, vec![member(1, 0.2, 4)]);
        assert_eq!(one.r1, 10.0);
        assert_eq!(one.r2, 0.0);

        let all = coreset_compute_and_test(&inst, 9, &ExactRkcm::default(), &Gonzalez).unwrap();
        assert_eq!(all.r1, 0.0);
        assert_eq!(all.coreset.tau, 4);
        assert_eq!(all.coreset.len(), 4);
    }

    #[test]
    fn loop_terminates_with_trace() {
        let ds = Dataset::from_line(&[0.0, 0.1, 0.2, 5.0, 5.1, 40.0])
            .unwrap()
            .with_weights(vec![0.4, 0.3, 0.5, 0.6, 0.4, 0.9])
            .unwrap();
        let o = DistanceOracle::new(&ds);
        let inst = RkcInstance::new(&o, 1).unwrap();
        let out = rknap_center(&inst, 0.5, &ExactRkcm::default(), Progression::Double).unwrap();
        let taus: Vec<usize> = out.trace.records.iter().map(|r| r.tau).collect();
        assert!(taus.windows(2).all(|w| w[0] < w[1]));
        assert!(out.trace.records.last().unwrap().stopped);
        for r in &out.trace.records {
            assert!(r.full_cost.unwrap() <= 2.0 * r.r1 + r.r2);
        }
        assert!(is_feasible(&out.solution.centers, inst.weights()));
        let best = brute_force_rkc(&inst).unwrap().solution.cost;
        assert!(out.solution.cost <= 1.5 * best);
    }

    #[test]
    fn heuristic_is_feasible() {
        let ds = Dataset::from_line(&[0.0, 1.0, 5.0, 6.0])
            .unwrap()
            .with_weights(vec![0.5, 0.5, 0.5, 0.5])
            .unwrap();
        let o = DistanceOracle::new(&ds);
        let t: Vec<RkcMember> = (0..4).map(|i| member(i, 0.5, 1)).collect();
        let h = solve_rkcm_heuristic(&t, 0, &o, 50).unwrap();
        let e = solve_rkcm_exact(&t, 0, &o, RKCM_NODE_BUDGET).unwrap();
        assert!(is_feasible(&h.centers, ds.weights().unwrap()));
        assert!(h.cost >= e.cost);
        assert_eq!(e.cost, 1.0);
    }

    #[test]
    fn instance_needs_weights() {
        let ds = Dataset::from_line(&[0.0, 1.0]).unwrap();
        let o = DistanceOracle::new(&ds);
        assert!(RkcInstance::new(&o, 0).is_err());
    }
}
