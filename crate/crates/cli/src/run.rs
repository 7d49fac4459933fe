//! Runs a pipeline in one of the three execution modes.

use std::path::Path;
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use robust_center::bigdata::{
    mr_solve_rkc, mr_solve_rmc, stream_solve_rkc, stream_solve_rmc, PointStream, ResourceStats,
    SliceStream, StreamLedger,
};
use robust_center::rkc::{
    is_feasible, knapsack_weight, rknap_center, ExactRkcm, LocalSearchRkcm, RkcOutcome,
};
use robust_center::rmc::{solve_rmc, ExactRmcm, LocalSearchRmcm, RmcOutcome};
use robust_center::{
    Dataset, DistanceOracle, Progression, RkcInstance, RkcmSolver, RmcInstance, RmcmSolver,
};

use crate::io::{is_matrix_path, FileStream};
use crate::report::{
    InstanceDescriptor, Mode, Problem, ProgressionKind, RunParams, RunReport, SolutionSummary,
    SolverKind, SCHEMA_VERSION,
};

/// A report together with the in-memory outcome it summarises.
#[derive(Debug)]
pub struct RunOutput {
    pub report: RunReport,
    pub rmc: Option<RmcOutcome>,
    pub rkc: Option<RkcOutcome>,
}

pub fn rmc_solver(kind: SolverKind) -> Box<dyn RmcmSolver> {
    match kind {
        SolverKind::Exact => Box::new(ExactRmcm::default()),
        SolverKind::Heuristic => Box::new(LocalSearchRmcm::default()),
    }
}

pub fn rkc_solver(kind: SolverKind) -> Box<dyn RkcmSolver> {
    match kind {
        SolverKind::Exact => Box::new(ExactRkcm::default()),
        SolverKind::Heuristic => Box::new(LocalSearchRkcm::default()),
    }
}

pub fn progression(params: &RunParams) -> Progression {
    match params.progression {
        ProgressionKind::Double => Progression::Double,
        ProgressionKind::Pow => Progression::Pow { eta: params.eta },
    }
}

/// Shuffled when seeded; otherwise the JSON-lines file itself, or id order
/// when there is no such file.
pub fn open_stream(n: usize, file: Option<&Path>, seed: Option<u64>) -> Box<dyn PointStream> {
    match (seed, file) {
        (Some(seed), _) => Box::new(SliceStream::shuffled(n, seed)),
        (None, Some(f)) if !is_matrix_path(f) => Box::new(FileStream::new(f)),
        _ => Box::new(SliceStream::in_order(n)),
    }
}

fn check_params(p: &RunParams) -> Result<()> {
    ensure!(
        p.epsilon > 0.0 && p.epsilon < 1.0,
        "--epsilon must lie in (0, 1)"
    );
    ensure!(
        p.delta.is_finite() && p.delta > 0.0,
        "--delta must be positive"
    );
    ensure!(p.eta > 0.0 && p.eta <= 1.0, "--eta must lie in (0, 1]");
    ensure!(p.partitions != Some(0), "--partitions must be at least 1");
    Ok(())
}

/// `label` names the dataset in the report; `stream_file` backs stream mode.
/// `audit` keeps the per-point proxy map of a streamed coreset.
pub fn run(
    ds: &Dataset,
    label: &str,
    stream_file: Option<&Path>,
    params: &RunParams,
    audit: bool,
) -> Result<RunOutput> {
    check_params(params)?;
    let start = Instant::now();
    let oracle = DistanceOracle::new(ds);
    let n = ds.len();
    let z = params.z;
    let mut instance = InstanceDescriptor {
        dataset: label.to_string(),
        n,
        metric: ds.kind(),
        dim: ds.dim(),
        weighted: ds.weights().is_some(),
        rank: None,
        params: params.clone(),
    };

    let (solution, stats, trace, rmc, rkc) = match params.problem {
        Problem::Rmc => {
            let spec = params
                .matroid
                .as_ref()
                .context("rmc needs a matroid (--matroid FILE or --k K)")?;
            let m = spec.build(ds).context("infeasible matroid")?;
            let inst = RmcInstance::new(&oracle, m.as_ref(), z)?;
            if inst.rank() == 0 {
                bail!("infeasible matroid: no point can be a center");
            }
            instance.rank = Some(inst.rank());
            let solver = rmc_solver(params.solver);
            let evals = oracle.evaluations();
            let (out, stats) = match params.mode {
                Mode::Seq => {
                    let out = solve_rmc(&inst, params.epsilon, solver.as_ref())?;
                    let stats = ResourceStats {
                        partitions: 1,
                        max_local_memory_items: n,
                        aggregate_memory_items: n,
                        distance_evals: oracle.evaluations() - evals,
                        ..ResourceStats::default()
                    };
                    (out, stats)
                }
                Mode::Mr => {
                    mr_solve_rmc(&inst, params.epsilon, solver.as_ref(), params.partitions)?
                }
                Mode::Stream => {
                    let mut s = StreamLedger::new(open_stream(n, stream_file, params.seed));
                    let (out, mut stats) = stream_solve_rmc(
                        &mut s,
                        &inst,
                        params.epsilon,
                        params.delta,
                        solver.as_ref(),
                        audit,
                    )?;
                    stats.passes = s.passes();
                    ensure!(
                        s.reads() == n * s.passes(),
                        "stream length differs from the dataset"
                    );
                    (out, stats)
                }
            };
            let summary = SolutionSummary {
                centers: out.solution.centers.clone(),
                cost: out.solution.cost,
                z: out.solution.z,
                feasible: !out.solution.centers.is_empty() && m.independent(&out.solution.centers),
                center_weight: None,
                alpha: solver.alpha(),
                coreset_size: out.coreset.len(),
                tau: out.coreset.tau,
                eps_prime: Some(out.coreset.eps_prime),
                coreset_cost: out.coreset_cost,
            };
            (summary, stats, None, Some(out), None)
        }
        Problem::Rkc => {
            let inst = RkcInstance::new(&oracle, z).context("infeasible weights")?;
            let solver = rkc_solver(params.solver);
            let prog = progression(params);
            let evals = oracle.evaluations();
            let (out, stats) = match params.mode {
                Mode::Seq => {
                    let out = rknap_center(&inst, params.epsilon, solver.as_ref(), prog)?;
                    let stats = ResourceStats {
                        partitions: 1,
                        max_local_memory_items: n,
                        aggregate_memory_items: n,
                        distance_evals: oracle.evaluations() - evals,
                        ..ResourceStats::default()
                    };
                    (out, stats)
                }
                Mode::Mr => mr_solve_rkc(
                    &inst,
                    params.epsilon,
                    solver.as_ref(),
                    prog,
                    params.partitions,
                )?,
                Mode::Stream => {
                    let mut s = StreamLedger::new(open_stream(n, stream_file, params.seed));
                    let (out, stats) = stream_solve_rkc(
                        &mut s,
                        &inst,
                        params.epsilon,
                        params.delta,
                        solver.as_ref(),
                        prog,
                    )?;
                    ensure!(
                        s.reads() == n * s.passes(),
                        "stream length differs from the dataset"
                    );
                    (out, stats)
                }
            };
            let last = out
                .trace
                .records
                .last()
                .context("the loop ran no iteration")?;
            let w = inst.weights();
            let summary = SolutionSummary {
                centers: out.solution.centers.clone(),
                cost: out.solution.cost,
                z: out.solution.z,
                feasible: !out.solution.centers.is_empty() && is_feasible(&out.solution.centers, w),
                center_weight: Some(knapsack_weight(&out.solution.centers, w)),
                alpha: solver.alpha(),
                coreset_size: last.coreset_size,
                tau: last.tau,
                eps_prime: None,
                coreset_cost: last.solver_cost,
            };
            let trace = Some(out.trace.clone());
            (summary, stats, trace, None, Some(out))
        }
    };

    let report = RunReport {
        schema_version: SCHEMA_VERSION,
        instance,
        mode: params.mode,
        solution,
        stats,
        trace,
        verification: None,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    Ok(RunOutput { report, rmc, rkc })
}
