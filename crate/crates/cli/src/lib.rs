//! Command-line front end: dataset generation, pipeline runs in sequential,
//! MapReduce and streaming modes, oracle verification and benchmarks.

pub mod bench;
pub mod generate;
pub mod io;
pub mod report;
pub mod run;
pub mod verify;
