//! Asymmetric-RAM cost accounting and write-efficient algorithms.
//!
//! Every algorithm in this crate runs against a [`CostMeter`]: slow-memory
//! reads cost 1, slow-memory writes cost `omega`, and fast-memory traffic is
//! tallied separately so that both the I/O cost `Q` and the work `W` can be
//! reported. Fast memory is a capacity-`M` budget enforced by
//! [`costmodel::FastArena`]; exceeding it is an error, never a silent spill.

pub mod apsp;
pub mod cli;
pub mod costmodel;
pub mod error;
pub mod fftsched;
pub mod graph;
pub mod heaps;
pub mod mst;
pub mod seqalign;
pub mod sssp;

pub use costmodel::{CostMeter, CostParams, FastArena, MeterSnapshot, SlowArray, Word, INF};
pub use error::{AramError, Result};
