//! Sweep runner, file formats and command-line interface on top of
//! [`kkent_core`].
//!
//! * [`config`] parses TOML run configurations.
//! * [`runner`] evaluates sweeps on a worker pool.
//! * [`output`] writes and reads the CSV and JSON formats.
//! * [`cache`] stores spectral decompositions on disk.
//! * [`app`] ties them together behind the `kkent` binary.

pub mod app;
pub mod cache;
pub mod config;
pub mod error;
pub mod output;
pub mod runner;

pub use config::{parse_config, parse_config_with_cap, Job, Mode, OutputFormat, RunConfig};
pub use error::{ConfigError, ExitStatus, KkentError};
pub use runner::{run_sweep, SweepRow};
