//! Execution drivers for large inputs: a simulated MapReduce executor for
//! composable coresets and a streaming engine with pass accounting.

mod mapreduce;
mod scaling;
mod stream;
mod streaming;

pub use mapreduce::{
    default_partitions_rkc, default_partitions_rmc, mr_solve_rkc, mr_solve_rmc, PartitionPlan,
};
pub use scaling::{
    ladder_len, CellPayload, CellState, Guess, KnapsackPayload, NoPayload, ScalingSketch,
    SketchPayload, StreamCell,
};
pub use stream::{PointStream, SliceStream, StreamLedger};
pub use streaming::{
    stream_rmc_coreset, stream_scaling_kcenter, stream_solve_rkc, stream_solve_rmc,
};

/// Resource accounting shared by the MapReduce and streaming drivers.
///
/// Memory is counted in points held. `distance_evals` includes the final
/// full-data cost evaluation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ResourceStats {
    pub rounds: usize,
    pub passes: usize,
    /// Largest partition count used.
    pub partitions: usize,
    pub max_local_memory_items: usize,
    pub aggregate_memory_items: usize,
    pub stream_reads: usize,
    pub distance_evals: usize,
}
