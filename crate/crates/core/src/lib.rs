//! Uncoded placement optimization for coded multicast delivery under an
//! arbitrary file popularity.
//!
//! The crate solves the placement linear programs at three levels of
//! symmetry (full, per-type, per-type and per-file), evaluates the average
//! load in several independent ways, computes converse bounds, and simulates
//! the XOR delivery bit-exactly so achieved loads can be checked against the
//! optimizer.

pub mod bounds;
pub mod config;
pub mod error;
pub mod evaluator;
pub mod exec;
pub mod lp;
pub mod math;
pub mod optimizer;
pub mod partition;
pub mod popularity;
pub mod simulator;
pub mod sweep;

pub mod acceptance;

pub use error::{Error, Result};
pub use exec::Execution;
pub use partition::{DemandVector, FullPartition, Instance, Partition, SymmetricPartition, UniformPartition};
pub use popularity::{Popularity, PopularitySpec};
