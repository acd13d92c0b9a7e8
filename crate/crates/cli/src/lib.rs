//! Spec files, presets and parameter sweeps for the `sim` binary.

pub mod error;
pub mod output;
pub mod run;
pub mod spec;

pub use error::CliError;
pub use run::{run_experiment, Cell, ResultTable};
pub use spec::{load_spec, resolve_text, ExperimentSpec, OutputFormat, Preset};
