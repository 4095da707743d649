//! Structured dynamic mode decomposition.

// `!(x > 0)` style checks are used on purpose so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dmd;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod models;
mod scalar;
pub mod signals;
pub mod snapshots;
pub mod systems;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use nalgebra;

pub use dmd::{ModelKind, ModelStructure};
pub use harness::ExperimentConfig;
pub use linalg::TruncationPolicy;
pub use models::{ContinuousModel, DiscreteModel, ModelBlocks, SavedModel};
pub use snapshots::SnapshotSet;

pub type DiscreteModelF64 = DiscreteModel<f64>;
pub type DiscreteModelF32 = DiscreteModel<f32>;
pub type ContinuousModelF64 = ContinuousModel<f64>;
pub type ContinuousModelF32 = ContinuousModel<f32>;
pub type SnapshotSetF64 = SnapshotSet<f64>;
pub type SnapshotSetF32 = SnapshotSet<f32>;
pub type ExperimentConfigF64 = ExperimentConfig<f64>;
pub type ExperimentConfigF32 = ExperimentConfig<f32>;
pub type FullOrderFitF64 = dmd::FullOrderFit<f64>;
pub type FullOrderFitF32 = dmd::FullOrderFit<f32>;
