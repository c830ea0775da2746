//! Per-subject training-fraction sweeps and the expert-validation
//! retraining protocol, with run aggregation and reporting.
//!
//! Run `r` of a cell uses seed `base_seed + r`. The split uses that seed
//! directly; initialization, batch sampling and validation draw from
//! separate derived streams, so results do not depend on execution order.

mod report;
mod runner;
mod split;

pub use report::{aggregate_report, format_percent, read_results_csv, write_results_csv};
pub use runner::{
    derive_seed, retrain_single, run_fraction_sweep, run_retraining_experiment, run_single, select_validated,
    simulate_validation, train_split, ExperimentConfig, ExperimentResult, RetrainRun, RetrainStage, RunResult,
    Validation, ValidationBasis,
};
pub use split::{class_train_count, split_dataset, split_labels, Split, SplitConfig, TaskData};
