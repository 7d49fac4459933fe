//! Oracle-backed checks of a run report.

use std::path::Path;

use anyhow::{ensure, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use robust_center::metric::robust_cost_unit;
use robust_center::rkc::{
    brute_force_rkc_with_budget, is_feasible, knapsack_weight, RKC_ORACLE_BUDGET,
};
use robust_center::rmc::{
    brute_force_rmc_with_budget, certify_c1, certify_c2, max_proxy_distance, solve_rmcm_exact,
    EXACT_SOLVER_BUDGET, RMC_ORACLE_BUDGET,
};
use robust_center::{Dataset, DistanceOracle, Error, PointId, RkcInstance, RmcInstance};

use crate::report::{Mode, Problem, RunParams, RunReport, SolverKind, Status, Verdict};
use crate::run::run;

/// Largest instances handed to the exhaustive oracles.
#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub rmc_max_n: usize,
    pub rkc_max_n: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            rmc_max_n: 30,
            rkc_max_n: 20,
        }
    }
}

/// Sampled independent sets per C2 check.
const C2_SAMPLES: usize = 20;

pub fn any_failed(verdicts: &[Verdict]) -> bool {
    verdicts.iter().any(|v| v.status == Status::Fail)
}

/// Checks `report` against `ds`, rerunning the pipeline from the report's
/// own parameters. Oracle-dependent checks are skipped above the size caps.
pub fn verify(
    ds: &Dataset,
    stream_file: Option<&Path>,
    report: &RunReport,
    opts: &VerifyOptions,
) -> Result<Vec<Verdict>> {
    let n = ds.len();
    ensure!(
        report.instance.n == n,
        "report describes {} points, dataset has {n}",
        report.instance.n
    );
    let params = &report.instance.params;
    let sol = &report.solution;
    let oracle = DistanceOracle::new(ds);
    let all: Vec<PointId> = ds.ids();
    let mut out = Vec::new();

    let in_range = !sol.centers.is_empty() && sol.centers.iter().all(|c| c.0 < n);
    if !in_range {
        out.push(Verdict::new(
            "feasibility",
            Status::Fail,
            "center ids empty or out of range",
        ));
        return Ok(out);
    }

    let cost = robust_cost_unit(&sol.centers, &all, sol.z, &oracle)?;
    let same = cost.to_bits() == sol.cost.to_bits();
    out.push(Verdict::from_bool(
        "cost",
        same,
        format!("recomputed {cost}, reported {}", sol.cost),
    ));

    let rerun = match run(ds, &report.instance.dataset, stream_file, params, false) {
        Ok(r) => r,
        Err(e) => {
            out.push(Verdict::new(
                "reproducible",
                Status::Fail,
                format!("rerun failed: {e:#}"),
            ));
            return Ok(out);
        }
    };
    let again = &rerun.report;
    let same = again.solution == *sol && again.trace == report.trace && again.stats == report.stats;
    out.push(Verdict::from_bool(
        "reproducible",
        same,
        if same {
            "rerun matches"
        } else {
            "rerun differs from the report"
        },
    ));

    match params.problem {
        Problem::Rmc => {
            let spec = params.matroid.as_ref().expect("rerun succeeded");
            let m = spec.build(ds)?;
            let inst = RmcInstance::new(&oracle, m.as_ref(), params.z)?;
            let independent = m.independent(&sol.centers);
            out.push(Verdict::from_bool(
                "feasibility",
                independent,
                if independent {
                    "centers independent"
                } else {
                    "centers dependent"
                },
            ));
            let rstar = if n > opts.rmc_max_n {
                Err(format!("n = {n} above the oracle cap {}", opts.rmc_max_n))
            } else {
                match brute_force_rmc_with_budget(&inst, RMC_ORACLE_BUDGET) {
                    Ok(s) => Ok(s.cost),
                    Err(Error::OracleBudgetExceeded { needed, .. }) => {
                        Err(format!("oracle needs {needed} subsets"))
                    }
                    Err(e) => return Err(e.into()),
                }
            };
            ratio_verdicts(&mut out, params, sol.cost, &rstar);
            let audited = if params.mode == Mode::Stream {
                run(ds, &report.instance.dataset, stream_file, params, true)?
            } else {
                rerun
            };
            let coreset = &audited.rmc.as_ref().expect("rmc rerun").coreset;
            let ep = coreset.eps_prime;
            match &rstar {
                Ok(r) => {
                    let r = *r;
                    let worst = max_proxy_distance(coreset, &oracle)?;
                    out.push(Verdict::from_bool(
                        "C1",
                        certify_c1(coreset, r, &oracle)?,
                        format!("max proxy distance {worst} vs eps' r* = {}", ep * r),
                    ));
                    let mut rng = ChaCha8Rng::seed_from_u64(params.seed.unwrap_or(0));
                    let mut c2 = true;
                    for _ in 0..C2_SAMPLES {
                        let mut order = all.clone();
                        order.shuffle(&mut rng);
                        let x = m.greedy(&order);
                        c2 &= certify_c2(coreset, &x, r, m.as_ref(), &oracle)?;
                    }
                    out.push(Verdict::from_bool(
                        "C2-sampled",
                        c2,
                        format!("{C2_SAMPLES} random bases transported within eps' r*"),
                    ));
                    match solve_rmcm_exact(
                        &coreset.members,
                        m.as_ref(),
                        sol.z,
                        &oracle,
                        EXACT_SOLVER_BUDGET,
                    ) {
                        Ok(best) => out.push(Verdict::from_bool(
                            "P1",
                            best.cost <= (1.0 + 2.0 * ep) * r,
                            format!(
                                "coreset optimum {} vs (1+2eps') r* = {}",
                                best.cost,
                                (1.0 + 2.0 * ep) * r
                            ),
                        )),
                        Err(Error::SolverBudgetExceeded { .. }) => out.push(Verdict::new(
                            "P1",
                            Status::Skipped,
                            "coreset too large for the exact solver",
                        )),
                        Err(e) => return Err(e.into()),
                    }
                    out.push(Verdict::from_bool(
                        "P2",
                        sol.cost <= sol.coreset_cost + ep * r,
                        format!(
                            "full cost {} vs coreset cost + eps' r* = {}",
                            sol.cost,
                            sol.coreset_cost + ep * r
                        ),
                    ));
                }
                Err(why) => {
                    for check in ["C1", "C2-sampled", "P1", "P2"] {
                        out.push(Verdict::new(check, Status::Skipped, why.clone()));
                    }
                }
            }
            if params.mode == Mode::Mr {
                l_invariance(&mut out, ds, report, &rstar, true)?;
            }
        }
        Problem::Rkc => {
            let inst = RkcInstance::new(&oracle, params.z)?;
            let w = inst.weights();
            let ok = is_feasible(&sol.centers, w);
            out.push(Verdict::from_bool(
                "feasibility",
                ok,
                format!("center weight {}", knapsack_weight(&sol.centers, w)),
            ));
            let rstar = if n > opts.rkc_max_n {
                Err(format!("n = {n} above the oracle cap {}", opts.rkc_max_n))
            } else {
                match brute_force_rkc_with_budget(&inst, RKC_ORACLE_BUDGET) {
                    Ok(s) => Ok(s.solution.cost),
                    Err(Error::OracleBudgetExceeded { needed, .. }) => {
                        Err(format!("oracle needs {needed} subsets"))
                    }
                    Err(e) => return Err(e.into()),
                }
            };
            ratio_verdicts(&mut out, params, sol.cost, &rstar);
            let trace = report.trace.as_ref();
            let records = trace.map(|t| t.records.as_slice()).unwrap_or_default();
            let stopped = records.last().is_some_and(|r| r.stopped || r.tau >= n);
            out.push(Verdict::from_bool(
                "termination",
                stopped,
                format!("{} iterations", records.len()),
            ));
            let cost_ok = records
                .iter()
                .all(|r| r.full_cost.is_some_and(|c| c <= 2.0 * r.r1 + r.r2));
            out.push(Verdict::from_bool(
                "lemma4-cost",
                cost_ok,
                "full cost <= 2 r1 + r2 at every iteration",
            ));
            match (&rstar, params.solver) {
                (Ok(r), SolverKind::Exact) => {
                    let ok = records.iter().all(|x| x.r2 <= r + 4.0 * x.r1);
                    out.push(Verdict::from_bool(
                        "lemma4-r2",
                        ok,
                        format!("r2 <= r* + 4 r1 at every iteration, r* = {r}"),
                    ));
                }
                (Ok(_), SolverKind::Heuristic) => out.push(Verdict::new(
                    "lemma4-r2",
                    Status::Skipped,
                    "needs an exact coreset solver",
                )),
                (Err(why), _) => out.push(Verdict::new("lemma4-r2", Status::Skipped, why.clone())),
            }
            if params.mode == Mode::Stream {
                let bound = (n as f64).log2().ceil() as usize + 1;
                let ok = report.stats.passes == records.len()
                    && (params.progression != crate::report::ProgressionKind::Double
                        || report.stats.passes <= bound);
                out.push(Verdict::from_bool(
                    "passes",
                    ok,
                    format!(
                        "{} passes, {} iterations",
                        report.stats.passes,
                        records.len()
                    ),
                ));
            }
            if params.mode == Mode::Mr {
                l_invariance(&mut out, ds, report, &rstar, false)?;
            }
        }
    }
    if params.mode == Mode::Stream && params.problem == Problem::Rmc {
        let ok = report.stats.passes == 1 && report.stats.stream_reads == n;
        out.push(Verdict::from_bool(
            "one-pass",
            ok,
            format!(
                "{} passes, {} reads",
                report.stats.passes, report.stats.stream_reads
            ),
        ));
    }
    Ok(out)
}

/// One verdict per partition count; `vs_seq` also compares `l = 1` with the
/// sequential run.
fn l_invariance(
    out: &mut Vec<Verdict>,
    ds: &Dataset,
    report: &RunReport,
    rstar: &Result<f64, String>,
    vs_seq: bool,
) -> Result<()> {
    let params = &report.instance.params;
    let label = &report.instance.dataset;
    for l in [1, 2, 4] {
        let check = format!("l-invariance[l={l}]");
        let p = RunParams {
            partitions: Some(l),
            ..params.clone()
        };
        let o = match run(ds, label, None, &p, false) {
            Ok(o) => o,
            Err(e) => {
                out.push(Verdict::new(check, Status::Fail, format!("{e:#}")));
                continue;
            }
        };
        let s = &o.report.solution;
        let mut ok = s.feasible;
        let mut detail = format!("cost {}", s.cost);
        if let (Ok(r), SolverKind::Exact) = (rstar, params.solver) {
            let bound = (1.0 + params.epsilon) * r;
            ok &= s.cost <= bound;
            detail += &format!(" vs (1+eps) r* = {bound}");
        }
        if vs_seq {
            ok &= o.report.stats.rounds == 2;
            if l == 1 {
                let seq = RunParams {
                    mode: Mode::Seq,
                    partitions: None,
                    ..params.clone()
                };
                let matches = run(ds, label, None, &seq, false)?.report.solution == *s;
                ok &= matches;
                detail += if matches {
                    "; equals sequential"
                } else {
                    "; differs from sequential"
                };
            }
        }
        out.push(Verdict::from_bool(check, ok, detail));
    }
    Ok(())
}

fn ratio_verdicts(
    out: &mut Vec<Verdict>,
    params: &RunParams,
    cost: f64,
    rstar: &Result<f64, String>,
) {
    match rstar {
        Ok(r) => {
            out.push(Verdict::from_bool(
                "optimality",
                cost >= *r,
                format!("cost {cost} vs r* = {r}"),
            ));
            let bound = (1.0 + params.epsilon) * r;
            match params.solver {
                SolverKind::Exact => out.push(Verdict::from_bool(
                    "ratio",
                    cost <= bound,
                    format!("cost {cost} vs (1+eps) r* = {bound}"),
                )),
                SolverKind::Heuristic => out.push(Verdict::new(
                    "ratio",
                    Status::Skipped,
                    format!("heuristic solver, no certified ratio (cost {cost}, r* = {r})"),
                )),
            }
        }
        Err(why) => {
            out.push(Verdict::new("optimality", Status::Skipped, why.clone()));
            out.push(Verdict::new("ratio", Status::Skipped, why.clone()));
        }
    }
}
