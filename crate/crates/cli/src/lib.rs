//! Command-line front end: JSON run configs, the staged inverse pipeline and
//! its artifacts.

pub mod config;
pub mod error;
pub mod output;
pub mod pipeline;

pub use config::{GeometrySpec, RunConfig, WaveformSpec};
pub use error::CliError;
pub use pipeline::{run_pipeline, SolveOptions, Summary, Timings};
