use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use robust_center_cli::bench::{bench, BenchOptions};
use robust_center_cli::generate::{generate, GenSpec, Layout, WeightModel};
use robust_center_cli::io::{load_dataset, write_points, MatroidSpec};
use robust_center_cli::report::{Mode, Problem, ProgressionKind, RunParams, RunReport, SolverKind};
use robust_center_cli::run::run;
use robust_center_cli::verify::{any_failed, verify, VerifyOptions};

#[derive(Parser)]
#[command(
    name = "robust-center",
    version,
    about = "Robust matroid and knapsack center clustering"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded synthetic dataset as JSON lines.
    Generate(GenerateArgs),
    /// Solve an instance and write a JSON report.
    Run(RunArgs),
    /// Check a report against brute-force oracles and certificates.
    Verify(VerifyArgs),
    /// Coreset-size trend on grids and a cross-mode table.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum LayoutKind {
    Grid,
    Blobs,
    Cube,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, value_enum, default_value = "blobs")]
    layout: LayoutKind,
    /// Number of blobs.
    #[arg(long, default_value_t = 3)]
    blobs: usize,
    /// Blob standard deviation per axis.
    #[arg(long, default_value_t = 1.0)]
    spread: f64,
    /// Cube side length.
    #[arg(long, default_value_t = 100.0)]
    side: f64,
    /// Planted outliers, appended after the inliers.
    #[arg(long, default_value_t = 0)]
    outliers: usize,
    /// Outlier gap in units of spread (blobs), side (cube) or spacing (grid).
    #[arg(long, default_value_t = 10.0)]
    displacement: f64,
    /// none, const:W or uniform:A:B.
    #[arg(long, default_value = "none")]
    weights: WeightModel,
    /// Draw a category in 0..C for every point.
    #[arg(long)]
    categories: Option<u32>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    /// JSON lines of points, or a `.json` distance matrix.
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, value_enum, default_value = "rmc")]
    problem: Problem,
    #[arg(long, value_enum, default_value = "seq")]
    mode: Mode,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    z: usize,
    /// Matroid description (JSON).
    #[arg(long, conflicts_with = "k")]
    matroid: Option<PathBuf>,
    /// Shorthand for a uniform matroid of rank K.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum, default_value = "exact")]
    solver: SolverKind,
    #[arg(long)]
    partitions: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    #[arg(long, value_enum, default_value = "double")]
    progression: ProgressionKind,
    #[arg(long, default_value_t = 0.5)]
    eta: f64,
    /// Shuffle the stream order with this seed.
    #[arg(long)]
    seed: Option<u64>,
    /// JSON report path; printed to stdout when absent.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Append a CSV summary row to this file.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    report: PathBuf,
    /// Write the report with its verdicts attached.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 30)]
    rmc_oracle_max_n: usize,
    #[arg(long, default_value_t = 20)]
    rkc_oracle_max_n: usize,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 1024)]
    n: usize,
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    dims: Vec<usize>,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 2)]
    z: usize,
    #[arg(long, default_value_t = 0.8)]
    eps_start: f64,
    #[arg(long, default_value_t = 3)]
    halvings: usize,
    /// Points in the cross-mode table; 0 skips it.
    #[arg(long, default_value_t = 300)]
    modes_n: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// JSON output; printed to stdout when absent.
    #[arg(long)]
    report: Option<PathBuf>,
    /// CSV of the trend curve.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Generate(a) => cmd_generate(a),
        Command::Run(a) => cmd_run(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

fn cmd_generate(a: GenerateArgs) -> Result<ExitCode> {
    let layout = match a.layout {
        LayoutKind::Grid => Layout::Grid,
        LayoutKind::Blobs => Layout::Blobs {
            count: a.blobs,
            spread: a.spread,
        },
        LayoutKind::Cube => Layout::Cube { side: a.side },
    };
    let spec = GenSpec {
        n: a.n,
        dim: a.dim,
        layout,
        outliers: a.outliers,
        displacement: a.displacement,
        weights: a.weights,
        categories: a.categories,
        seed: a.seed,
    };
    let points = generate(&spec)?;
    write_points(&a.out, &points)?;
    eprintln!("wrote {} points to {}", points.len(), a.out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_run(a: RunArgs) -> Result<ExitCode> {
    let ds = load_dataset(&a.dataset)?;
    let matroid = match (&a.matroid, a.k) {
        (Some(p), _) => Some(MatroidSpec::load(p)?),
        (None, Some(k)) => Some(MatroidSpec::Uniform { k }),
        (None, None) if a.problem == Problem::Rmc => {
            bail!("rmc needs --matroid FILE or --k K")
        }
        (None, None) => None,
    };
    let params = RunParams {
        problem: a.problem,
        mode: a.mode,
        epsilon: a.epsilon,
        z: a.z,
        matroid,
        solver: a.solver,
        partitions: a.partitions,
        delta: a.delta,
        progression: a.progression,
        eta: a.eta,
        seed: a.seed,
    };
    let label = a.dataset.display().to_string();
    let out = run(&ds, &label, Some(&a.dataset), &params, false)?;
    let report = out.report;
    emit_json(&report, a.report.as_deref())?;
    if let Some(csv) = &a.csv {
        report.append_csv(csv)?;
    }
    let s = &report.solution;
    eprintln!(
        "{} {}: cost {} with {} centers, |T| = {}, tau = {}",
        params.problem,
        params.mode,
        s.cost,
        s.centers.len(),
        s.coreset_size,
        s.tau
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(a: VerifyArgs) -> Result<ExitCode> {
    let ds = load_dataset(&a.dataset)?;
    let mut report = RunReport::read_json(&a.report)?;
    let opts = VerifyOptions {
        rmc_max_n: a.rmc_oracle_max_n,
        rkc_max_n: a.rkc_oracle_max_n,
    };
    let verdicts = verify(&ds, Some(&a.dataset), &report, &opts)?;
    for v in &verdicts {
        println!("{v}");
    }
    let failed = any_failed(&verdicts);
    if let Some(out) = &a.out {
        report.verification = Some(verdicts);
        report.write_json(out)?;
    }
    Ok(if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_bench(a: BenchArgs) -> Result<ExitCode> {
    let opts = BenchOptions {
        n: a.n,
        dims: a.dims,
        k: a.k,
        z: a.z,
        eps_start: a.eps_start,
        halvings: a.halvings,
        modes_n: a.modes_n,
        seed: a.seed,
    };
    let b = bench(&opts)?;
    eprintln!(
        "{:>3} {:>8} {:>6} {:>6} {:>8} {:>6}",
        "d", "eps'", "tau", "|T|", "growth", "ok"
    );
    for p in &b.trend {
        let g = p.growth.map_or("-".to_string(), |g| format!("{g:.3}"));
        eprintln!(
            "{:>3} {:>8.4} {:>6} {:>6} {:>8} {:>6}",
            p.dim,
            p.eps_prime,
            p.tau,
            p.coreset_size,
            g,
            p.growth_ok && p.size_ok
        );
    }
    if let Some(path) = &a.csv {
        let mut w = csv::Writer::from_path(path)?;
        for p in &b.trend {
            w.serialize(p)?;
        }
        w.flush()?;
    }
    emit_json(&b, a.report.as_deref())?;
    let ok = b.trend.iter().all(|p| p.growth_ok && p.size_ok);
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn emit_json<T: serde::Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match path {
        Some(p) => std::fs::write(p, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}
