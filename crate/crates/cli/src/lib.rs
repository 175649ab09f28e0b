//! Experiment runner for `torus-spread`: JSON configs in; JSON records,
//! cloud files and SVG out.

pub mod cloudfile;
pub mod config;
pub mod output;
pub mod record;
pub mod run;
pub mod svg;
pub mod values;

pub use config::{Command, ExperimentConfig};
pub use record::ResultRecord;
pub use run::{run, RunError, RunOptions, RunOutcome};
