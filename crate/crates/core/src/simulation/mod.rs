//! Ground-truth replay of planned routes, uncontrolled background load,
//! evaluation metrics and the experiment harness.

mod control;
mod experiment;
mod metrics;
mod output;
mod replay;

pub use control::apply_control_factor;
pub use experiment::{
    run_experiment, Algorithm, ExperimentConfig, ExperimentOutcome, PredictorKind, Timings,
};
pub use metrics::{compute_metrics, end_to_end_minutes, utilisation, MetricsReport};
pub use output::{
    file_sha256, fmt9, rounded_metrics, sig9, write_json, write_paths_csv, write_penalties_csv,
    write_run_dir, RunConfig, RunCounts, RunManifest,
};
pub use replay::{replay_assignment, ReplayMode, ReplayResult, Route};
