//! Reproducible command-line experiments over the `bellctx` library.

pub mod config;
pub mod error;
pub mod run;

pub use config::{Command, ExperimentConfig, ModelSpec, OutputFormat, SweepQuantity};
pub use error::{CliError, CliResult};
pub use run::{run, Report, VERSION};
