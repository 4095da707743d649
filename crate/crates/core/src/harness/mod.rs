//! Experiment runner behind the command-line tool.

mod config;
mod run;

pub use config::{ExperimentConfig, SignalSpec, SystemKind};
pub use run::{
    convert_model, run_svd_report, run_test, run_train, svd_report, test_model, train, write_outputs_csv,
    write_svd_csv, Conversion, ReferenceSystem, SvdReport, TestReport, TrainArtifacts, TrainOutcome, TrainReport,
};
