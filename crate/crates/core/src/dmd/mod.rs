//! Structured regressors, least-squares fitting and projection onto reduced order.

mod fit;
mod modes;
mod regressor;
mod structure;

pub use fit::{fit_full, project, reduce, FullOrderFit};
pub use modes::{compute_dmd_modes, DmdModes};
pub use regressor::{assemble_gamma, assemble_omega, BlockLabel, RegressorBundle, RowBlock};
pub use structure::{ModelKind, ModelStructure};
