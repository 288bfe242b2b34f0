//! Experiment configuration, execution, CSV output and built-in presets.

pub mod certify;
pub mod config;
pub mod output;
pub mod presets;
pub mod run;
pub mod sweep;

pub use certify::{certify, CertificateSpan};
pub use config::{ExperimentConfig, Monitors, Normalizer, NormalizerRule, ObjectiveSpec, OptimizerKind, OptimizerSpec};
pub use output::{save_sweep, save_trace, trace_to_string};
pub use presets::preset;
pub use run::{run_experiment, RunTrace, TraceRow, Violation};
pub use sweep::{sweep_gamma, SweepRow};

use crate::error::Result;

/// Runs a built-in preset.
pub fn repro(name: &str, tau: Option<usize>) -> Result<RunTrace> {
    run_experiment(&preset(name, tau)?)
}
