//! Discrete and continuous structured models: simulation, Euler conversion,
//! error metrics and file persistence.

mod blocks;
mod convert;
mod metrics;
mod persist;
mod simulate;

pub use blocks::{ContinuousModel, DiscreteModel, ModelBlocks};
pub use convert::{continuous_to_discrete, discrete_to_continuous};
pub use metrics::{absolute_error_series, relative_output_error};
pub use persist::SavedModel;
pub use simulate::{simulate_discrete, Trajectory};
