//! Run reports: one JSON document per run plus a flat CSV row.

use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::BufWriter;
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use robust_center::bigdata::ResourceStats;
use robust_center::rkc::LoopTrace;
use robust_center::{MetricKind, PointId};
use serde::{Deserialize, Serialize};

use crate::io::MatroidSpec;

/// Bumped whenever a field changes meaning or disappears.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Rmc,
    Rkc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Seq,
    Mr,
    Stream,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Exact,
    Heuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ProgressionKind {
    Double,
    Pow,
}

macro_rules! display_as_value {
    ($($t:ty),*) => {$(
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let v = self.to_possible_value().expect("no skipped variants");
                f.write_str(v.get_name())
            }
        }
    )*};
}
display_as_value!(Problem, Mode, SolverKind, ProgressionKind);

/// Everything that determines a run's output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunParams {
    pub problem: Problem,
    pub mode: Mode,
    pub epsilon: f64,
    pub z: usize,
    /// Required for `rmc`; ignored for `rkc`.
    pub matroid: Option<MatroidSpec>,
    pub solver: SolverKind,
    /// `None` picks the default partition count.
    pub partitions: Option<usize>,
    pub delta: f64,
    pub progression: ProgressionKind,
    pub eta: f64,
    /// Shuffles the stream order; `None` streams in id order.
    pub seed: Option<u64>,
}

impl Default for RunParams {
    fn default() -> Self {
        RunParams {
            problem: Problem::Rmc,
            mode: Mode::Seq,
            epsilon: 0.5,
            z: 0,
            matroid: None,
            solver: SolverKind::Exact,
            partitions: None,
            delta: 0.5,
            progression: ProgressionKind::Double,
            eta: 0.5,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDescriptor {
    pub dataset: String,
    pub n: usize,
    pub metric: MetricKind,
    pub dim: Option<usize>,
    pub weighted: bool,
    /// Matroid rank for `rmc`.
    pub rank: Option<usize>,
    pub params: RunParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionSummary {
    pub centers: Vec<PointId>,
    /// Robust cost on the full dataset.
    pub cost: f64,
    pub z: u64,
    pub feasible: bool,
    /// Total knapsack weight of the centers (`rkc`).
    pub center_weight: Option<f64>,
    pub alpha: f64,
    /// Coreset size `|T|` (final iteration for `rkc`).
    pub coreset_size: usize,
    pub tau: usize,
    pub eps_prime: Option<f64>,
    /// Cost reported on the coreset.
    pub coreset_cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub status: Status,
    pub detail: String,
}

impl Verdict {
    pub fn new(check: impl Into<String>, status: Status, detail: impl Into<String>) -> Self {
        Verdict {
            check: check.into(),
            status,
            detail: detail.into(),
        }
    }

    pub fn from_bool(check: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        let status = if ok { Status::Pass } else { Status::Fail };
        Verdict::new(check, status, detail)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIPPED",
        };
        write!(f, "{s:<7} {:<24} {}", self.check, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub instance: InstanceDescriptor,
    pub mode: Mode,
    pub solution: SolutionSummary,
    pub stats: ResourceStats,
    pub trace: Option<LoopTrace>,
    pub verification: Option<Vec<Verdict>>,
    /// The only field that differs between identical runs.
    pub wall_time_ms: f64,
}

impl RunReport {
    pub fn write_json(&self, path: &Path) -> Result<()> {
        let file =
            File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        serde_json::to_writer_pretty(BufWriter::new(file), self)?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
        serde_json::from_reader(std::io::BufReader::new(file))
            .with_context(|| format!("{} is not a run report", path.display()))
    }

    pub fn csv_row(&self) -> CsvRow {
        let p = &self.instance.params;
        let s = &self.solution;
        CsvRow {
            schema_version: self.schema_version,
            dataset: self.instance.dataset.clone(),
            n: self.instance.n,
            problem: p.problem.to_string(),
            mode: self.mode.to_string(),
            solver: p.solver.to_string(),
            epsilon: p.epsilon,
            z: p.z,
            rank: self.instance.rank,
            centers: s
                .centers
                .iter()
                .map(|c| c.0.to_string())
                .collect::<Vec<_>>()
                .join(" "),
            cost: s.cost,
            feasible: s.feasible,
            coreset_size: s.coreset_size,
            tau: s.tau,
            eps_prime: s.eps_prime,
            iterations: self.trace.as_ref().map(LoopTrace::iterations),
            rounds: self.stats.rounds,
            passes: self.stats.passes,
            partitions: self.stats.partitions,
            max_local_memory_items: self.stats.max_local_memory_items,
            stream_reads: self.stats.stream_reads,
            distance_evals: self.stats.distance_evals,
            wall_time_ms: self.wall_time_ms,
        }
    }

    /// Appends the CSV row, writing the header when the file is new or empty.
    pub fn append_csv(&self, path: &Path) -> Result<()> {
        let fresh = std::fs::metadata(path)
            .map(|m| m.len() == 0)
            .unwrap_or(true);
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .with_context(|| format!("cannot open {}", path.display()))?;
        let mut w = csv::WriterBuilder::new()
            .has_headers(fresh)
            .from_writer(file);
        w.serialize(self.csv_row())?;
        w.flush()?;
        Ok(())
    }
}

/// Flat summary of a report; column order is the field order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub schema_version: u32,
    pub dataset: String,
    pub n: usize,
    pub problem: String,
    pub mode: String,
    pub solver: String,
    pub epsilon: f64,
    pub z: usize,
    pub rank: Option<usize>,
    /// Space-separated ids.
    pub centers: String,
    pub cost: f64,
    pub feasible: bool,
    pub coreset_size: usize,
    pub tau: usize,
    pub eps_prime: Option<f64>,
    pub iterations: Option<usize>,
    pub rounds: usize,
    pub passes: usize,
    pub partitions: usize,
    pub max_local_memory_items: usize,
    pub stream_reads: usize,
    pub distance_evals: usize,
    pub wall_time_ms: f64,
}
