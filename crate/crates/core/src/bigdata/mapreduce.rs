use alloc::vec::Vec;

use super::ResourceStats;
use crate::error::{Error, Result};
use crate::kcenter::Gonzalez;
use crate::metric::robust_cost_unit;
use crate::metric::PointId;
use crate::rkc::{
    build_rkc_coreset_on, run_loop, solve_step, LoopTrace, Progression, RkcCoreset, RkcInstance,
    RkcOutcome, RkcmSolver,
};
use crate::rmc::{
    build_rmc_coreset_on, coreset_eps, finish_rmc, RmcCoreset, RmcInstance, RmcOutcome, RmcmSolver,
    RobustSolution,
};

/// Disjoint, covering partition of `0..n`; point `i` goes to part `i mod l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionPlan {
    parts: Vec<Vec<PointId>>,
}

impl PartitionPlan {
    /// `l` is clamped to `[1, n]`.
    pub fn round_robin(n: usize, l: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("cannot partition an empty dataset"));
        }
        let l = l.clamp(1, n);
        let mut parts = alloc::vec![Vec::with_capacity(n / l + 1); l];
        for i in 0..n {
            parts[i % l].push(PointId(i));
        }
        Ok(PartitionPlan { parts })
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn parts(&self) -> &[Vec<PointId>] {
        &self.parts
    }

    pub fn part_of(&self, id: PointId) -> usize {
        id.0 % self.parts.len()
    }

    pub fn max_part_size(&self) -> usize {
        self.parts.iter().map(Vec::len).max().unwrap_or(0)
    }
}

fn clamp_round(x: f64, n: usize) -> usize {
    let r = libm::round(x);
    if r.is_nan() || r < 1.0 {
        1
    } else if r >= n as f64 {
        n.max(1)
    } else {
        r as usize
    }
}

/// `round(sqrt(n / (k (k + z))))` clamped to `[1, n]`.
pub fn default_partitions_rmc(n: usize, k: usize, z: usize) -> usize {
    let denom = (k.max(1) * (k.max(1) + z)) as f64;
    clamp_round(libm::sqrt(n as f64 / denom), n)
}

/// `round(sqrt(n / tau))` clamped to `[1, n]`.
pub fn default_partitions_rkc(n: usize, tau: usize) -> usize {
    clamp_round(libm::sqrt(n as f64 / tau.max(1) as f64), n)
}

/// Two rounds: per-partition coresets, then one reducer solving their union.
pub fn mr_solve_rmc(
    inst: &RmcInstance<'_>,
    eps: f64,
    solver: &dyn RmcmSolver,
    partitions: Option<usize>,
) -> Result<(RmcOutcome, ResourceStats)> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter("epsilon must lie in (0, 1)"));
    }
    let n = inst.len();
    let l = partitions.unwrap_or_else(|| default_partitions_rmc(n, inst.rank(), inst.z()));
    if l == 0 {
        return Err(Error::InvalidParameter("at least one partition is needed"));
    }
    let plan = PartitionPlan::round_robin(n, l)?;
    let evals = inst.oracle().evaluations();
    let eps_prime = coreset_eps(eps, solver.alpha());

    let mut pieces = Vec::with_capacity(plan.len());
    for (q, part) in plan.parts().iter().enumerate() {
        let mut piece = build_rmc_coreset_on(inst, part, eps_prime, &Gonzalez)?;
        piece.origin.iter_mut().for_each(|o| *o = q);
        pieces.push(piece);
    }
    let union = RmcCoreset::union(pieces)?;
    let t = union.len();
    let outcome = finish_rmc(inst, eps, solver, union)?;

    let stats = ResourceStats {
        rounds: 2,
        partitions: plan.len(),
        max_local_memory_items: plan.max_part_size().max(t),
        aggregate_memory_items: n.max(t),
        distance_evals: inst.oracle().evaluations() - evals,
        ..ResourceStats::default()
    };
    Ok((outcome, stats))
}

/// The guess-and-test loop with every iteration split into two rounds.
///
/// With `partitions = None` each iteration uses `round(sqrt(n / tau))` parts;
/// otherwise the given count is kept throughout.
pub fn mr_solve_rkc(
    inst: &RkcInstance<'_>,
    eps: f64,
    solver: &dyn RkcmSolver,
    progression: Progression,
    partitions: Option<usize>,
) -> Result<(RkcOutcome, ResourceStats)> {
    if partitions == Some(0) {
        return Err(Error::InvalidParameter("at least one partition is needed"));
    }
    let n = inst.len();
    let z = inst.z() as u64;
    let all: Vec<PointId> = (0..n).map(PointId).collect();
    let evals = inst.oracle().evaluations();
    let mut stats = ResourceStats::default();

    let (centers, trace): (Vec<PointId>, LoopTrace) = run_loop(
        n,
        eps,
        solver.alpha(),
        progression,
        |tau| {
            let l = partitions.unwrap_or_else(|| default_partitions_rkc(n, tau));
            let plan = PartitionPlan::round_robin(n, l)?;
            let mut merged = RkcCoreset {
                members: Vec::new(),
                tau,
                r1: 0.0,
            };
            for part in plan.parts() {
                let piece = build_rkc_coreset_on(inst, part, tau, &Gonzalez)?;
                merged.members.extend(piece.members);
                merged.r1 = merged.r1.max(piece.r1);
            }
            stats.rounds += 2;
            stats.partitions = stats.partitions.max(plan.len());
            stats.max_local_memory_items = stats
                .max_local_memory_items
                .max(plan.max_part_size())
                .max(merged.len());
            stats.aggregate_memory_items = stats.aggregate_memory_items.max(n.max(merged.len()));
            solve_step(inst, solver, merged)
        },
        |s| robust_cost_unit(s, &all, z, inst.oracle()).map(Some),
    )?;
    stats.distance_evals = inst.oracle().evaluations() - evals;
    let cost = trace
        .records
        .last()
        .and_then(|r| r.full_cost)
        .expect("audit always evaluates");
    Ok((
        RkcOutcome {
            solution: RobustSolution {
                centers,
                cost,
                z,
                epsilon: Some(eps),
            },
            trace,
        },
        stats,
    ))
}
