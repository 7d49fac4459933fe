//! Coreset-size trend on uniform grids and a small cross-mode comparison.

use anyhow::Result;
use robust_center::rmc::build_rmc_coreset;
use robust_center::{DistanceOracle, Gonzalez, RmcInstance, UniformMatroid};
use serde::{Deserialize, Serialize};

use crate::generate::{generate, GenSpec, Layout, WeightModel};
use crate::io::{dataset_from_records, MatroidSpec};
use crate::report::{CsvRow, Mode, Problem, RunParams, SolverKind, SCHEMA_VERSION};
use crate::run::run;

/// Allowed growth of `tau` per halving of eps' in dimension `d`.
pub fn growth_bound(dim: usize) -> f64 {
    (1u64 << dim) as f64 * 1.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendPoint {
    pub dim: usize,
    pub n: usize,
    pub k: usize,
    pub z: usize,
    pub eps_prime: f64,
    pub r_guess: f64,
    pub threshold: f64,
    pub tau: usize,
    pub coreset_size: usize,
    /// `tau` over the previous point's `tau`.
    pub growth: Option<f64>,
    pub growth_bound: f64,
    pub growth_ok: bool,
    /// `|T| <= k tau`.
    pub size_ok: bool,
}

/// Coresets of an `n`-point grid in `dim` dimensions under `Uniform(k)`,
/// halving eps' `halvings` times from `eps_start`.
pub fn coreset_trend(
    n: usize,
    dim: usize,
    k: usize,
    z: usize,
    eps_start: f64,
    halvings: usize,
) -> Result<Vec<TrendPoint>> {
    let spec = GenSpec {
        n,
        dim,
        layout: Layout::Grid,
        outliers: 0,
        displacement: 1.0,
        weights: WeightModel::None,
        categories: None,
        seed: 0,
    };
    let ds = dataset_from_records(&generate(&spec)?)?;
    let oracle = DistanceOracle::new(&ds);
    let m = UniformMatroid::new(n, k)?;
    let inst = RmcInstance::new(&oracle, &m, z)?;
    let bound = growth_bound(dim);
    let mut out: Vec<TrendPoint> = Vec::with_capacity(halvings + 1);
    let mut eps_prime = eps_start;
    for _ in 0..=halvings {
        let cs = build_rmc_coreset(&inst, eps_prime, &Gonzalez)?;
        let growth = out.last().map(|p| cs.tau as f64 / p.tau as f64);
        out.push(TrendPoint {
            dim,
            n,
            k,
            z,
            eps_prime,
            r_guess: cs.r_guess,
            threshold: cs.threshold,
            tau: cs.tau,
            coreset_size: cs.len(),
            growth,
            growth_bound: bound,
            growth_ok: growth.is_none_or(|g| g <= bound),
            size_ok: cs.len() <= k * cs.tau,
        });
        eps_prime /= 2.0;
    }
    Ok(out)
}

/// Every problem and mode on one seeded blob dataset with planted outliers.
pub fn mode_table(n: usize, seed: u64) -> Result<Vec<CsvRow>> {
    let spec = GenSpec {
        n,
        dim: 2,
        layout: Layout::Blobs {
            count: 3,
            spread: 1.0,
        },
        outliers: 3,
        displacement: 8.0,
        weights: WeightModel::Uniform { lo: 0.3, hi: 1.0 },
        categories: None,
        seed,
    };
    let ds = dataset_from_records(&generate(&spec)?)?;
    let label = format!("blobs(n={n},seed={seed})");
    let mut rows = Vec::new();
    for problem in [Problem::Rmc, Problem::Rkc] {
        for mode in [Mode::Seq, Mode::Mr, Mode::Stream] {
            let params = RunParams {
                problem,
                mode,
                z: 3,
                matroid: Some(MatroidSpec::Uniform { k: 3 }),
                solver: SolverKind::Heuristic,
                ..RunParams::default()
            };
            rows.push(run(&ds, &label, None, &params, false)?.report.csv_row());
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchReport {
    pub schema_version: u32,
    pub trend: Vec<TrendPoint>,
    pub modes: Vec<CsvRow>,
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub n: usize,
    pub dims: Vec<usize>,
    pub k: usize,
    pub z: usize,
    pub eps_start: f64,
    pub halvings: usize,
    /// Blob size for the mode table; 0 skips it.
    pub modes_n: usize,
    pub seed: u64,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            n: 1024,
            dims: vec![1, 2],
            k: 2,
            z: 2,
            eps_start: 0.8,
            halvings: 3,
            modes_n: 300,
            seed: 7,
        }
    }
}

pub fn bench(opts: &BenchOptions) -> Result<BenchReport> {
    let mut trend = Vec::new();
    for &d in &opts.dims {
        trend.extend(coreset_trend(
            opts.n,
            d,
            opts.k,
            opts.z,
            opts.eps_start,
            opts.halvings,
        )?);
    }
    let modes = if opts.modes_n > 0 {
        mode_table(opts.modes_n, opts.seed)?
    } else {
        Vec::new()
    };
    Ok(BenchReport {
        schema_version: SCHEMA_VERSION,
        trend,
        modes,
    })
}
