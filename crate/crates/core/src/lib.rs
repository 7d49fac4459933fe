//! Coreset-based algorithms for robust center problems under matroid and
//! knapsack constraints, with simulated MapReduce and streaming drivers.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the command line
//! and reporting live in the companion CLI crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bigdata;
pub mod combinatorics;
pub mod error;
pub mod kcenter;
pub mod matroid;
pub mod metric;
pub mod rkc;
pub mod rmc;

pub use error::{Error, Result};
pub use kcenter::{gonzalez, CenterSet, Gonzalez, KCenter};
pub use matroid::{Matroid, PartitionMatroid, TransversalMatroid, UniformMatroid};
pub use metric::{Dataset, DistanceOracle, MatrixCheck, MetricKind, MultiplicityPoint, PointId};
pub use rkc::{Progression, RkcInstance, RkcmSolver};
pub use rmc::{RmcInstance, RmcmSolver, RobustSolution};
