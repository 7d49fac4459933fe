use alloc::vec::Vec;

use super::scaling::{CellPayload, KnapsackPayload, NoPayload, ScalingSketch};
use super::stream::PointStream;
use super::ResourceStats;
use crate::error::{Error, Result};
use crate::kcenter::CenterSet;
use crate::metric::{robust_cost_unit, DistanceOracle, MultiplicityPoint, PointId};
use crate::rkc::{
    run_loop, solve_step, Progression, RkcCoreset, RkcInstance, RkcMember, RkcOutcome, RkcmSolver,
};
use crate::rmc::{
    coreset_eps, finish_rmc, ProxyAudit, RmcCoreset, RmcInstance, RmcOutcome, RmcmSolver,
    RobustSolution,
};

/// Feeds one full pass into `sketch`, returning the number of points read.
fn run_pass<P: super::SketchPayload>(
    stream: &mut dyn PointStream,
    sketch: &mut ScalingSketch<'_, P>,
    oracle: &DistanceOracle<'_>,
) -> Result<usize> {
    stream.begin_pass()?;
    let mut reads = 0;
    while let Some(p) = stream.next_point()? {
        oracle.check(p)?;
        sketch.insert(p);
        reads += 1;
    }
    if reads == 0 {
        return Err(Error::EmptyStream);
    }
    Ok(reads)
}

/// One pass of the scaling sketch; the returned radius is the coverage bound
/// `r'` of the smallest surviving guess.
pub fn stream_scaling_kcenter<'o>(
    stream: &mut dyn PointStream,
    target: usize,
    delta: f64,
    oracle: &'o DistanceOracle<'o>,
) -> Result<(CenterSet, ScalingSketch<'o, NoPayload>)> {
    let mut sketch = ScalingSketch::new(oracle, target, delta, NoPayload)?;
    run_pass(stream, &mut sketch, oracle)?;
    let best = sketch.best();
    let centers = CenterSet {
        centers: best.centers.clone(),
        radius: best.radius,
    };
    Ok((centers, sketch))
}

/// One-pass matroid coreset.
///
/// The sketch targets `k + z` centers with `beta = 2 + delta`; every guess
/// `g` keeps cells of radius about `eps' g / beta`, and the smallest
/// surviving guess supplies the coreset. `audit` retains the full proxy map.
pub fn stream_rmc_coreset(
    stream: &mut dyn PointStream,
    inst: &RmcInstance<'_>,
    eps_prime: f64,
    delta: f64,
    audit: bool,
) -> Result<(RmcCoreset, ResourceStats)> {
    if !(eps_prime > 0.0 && eps_prime < 1.0) {
        return Err(Error::InvalidParameter("eps' must lie in (0, 1)"));
    }
    let oracle = inst.oracle();
    let evals = oracle.evaluations();
    let beta = 2.0 + delta;
    let payload = CellPayload {
        matroid: inst.matroid(),
        eps_prime,
        beta,
        audit,
    };
    let mut sketch = ScalingSketch::new(oracle, inst.rank() + inst.z(), delta, payload)?;
    let reads = run_pass(stream, &mut sketch, oracle)?;
    let peak = sketch.peak_items();
    let best = sketch.into_best();

    let state = best.state;
    let mut members = Vec::new();
    let mut blocks = Vec::with_capacity(state.cells.len());
    for cell in &state.cells {
        members.extend(
            cell.y
                .iter()
                .zip(&cell.mass)
                .map(|(&id, &m)| MultiplicityPoint::new(id, m)),
        );
        blocks.push(cell.y.clone());
    }
    let audit = state.audit.map(|a| {
        let mut out = ProxyAudit::default();
        for (p, (cell, proxy)) in a {
            out.proxy.insert(p, proxy);
            out.cluster.insert(p, cell);
        }
        out
    });
    let coreset = RmcCoreset {
        members,
        origin: alloc::vec![0; blocks.len()],
        tau: blocks.len(),
        blocks,
        audit,
        eps_prime,
        beta,
        r_guess: best.radius,
        threshold: state.threshold,
    };
    let stats = ResourceStats {
        passes: 1,
        stream_reads: reads,
        max_local_memory_items: peak,
        aggregate_memory_items: peak,
        distance_evals: oracle.evaluations() - evals,
        ..ResourceStats::default()
    };
    Ok((coreset, stats))
}

/// One-pass matroid coreset followed by the solver; the final cost is
/// evaluated on the full data outside the stream.
pub fn stream_solve_rmc(
    stream: &mut dyn PointStream,
    inst: &RmcInstance<'_>,
    eps: f64,
    delta: f64,
    solver: &dyn RmcmSolver,
    audit: bool,
) -> Result<(RmcOutcome, ResourceStats)> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter("epsilon must lie in (0, 1)"));
    }
    let evals = inst.oracle().evaluations();
    let eps_prime = coreset_eps(eps, solver.alpha());
    let (coreset, mut stats) = stream_rmc_coreset(stream, inst, eps_prime, delta, audit)?;
    let outcome = finish_rmc(inst, eps, solver, coreset)?;
    stats.distance_evals = inst.oracle().evaluations() - evals;
    Ok((outcome, stats))
}

/// The guess-and-test loop with one pass per iteration; each pass runs a
/// `tau`-target sketch that tracks cluster sizes and lightest members.
pub fn stream_solve_rkc(
    stream: &mut dyn PointStream,
    inst: &RkcInstance<'_>,
    eps: f64,
    delta: f64,
    solver: &dyn RkcmSolver,
    progression: Progression,
) -> Result<(RkcOutcome, ResourceStats)> {
    let oracle = inst.oracle();
    let evals = oracle.evaluations();
    let weights = inst.weights();
    let z = inst.z() as u64;
    let all: Vec<PointId> = (0..inst.len()).map(PointId).collect();
    let mut stats = ResourceStats::default();

    let (centers, trace) = run_loop(
        inst.len(),
        eps,
        solver.alpha(),
        progression,
        |tau| {
            let mut sketch = ScalingSketch::new(oracle, tau, delta, KnapsackPayload { weights })?;
            stats.stream_reads += run_pass(stream, &mut sketch, oracle)?;
            stats.passes += 1;
            stats.max_local_memory_items = stats.max_local_memory_items.max(sketch.peak_items());
            let best = sketch.into_best();
            let members = best
                .state
                .iter()
                .map(|&(mass, id)| RkcMember {
                    id,
                    weight: weights[id.0],
                    multiplicity: mass,
                })
                .collect();
            let coreset = RkcCoreset {
                members,
                tau,
                r1: best.radius,
            };
            solve_step(inst, solver, coreset)
        },
        |s| robust_cost_unit(s, &all, z, oracle).map(Some),
    )?;
    stats.aggregate_memory_items = stats.max_local_memory_items;
    stats.distance_evals = oracle.evaluations() - evals;
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
