//! Config-driven pipeline around `cfgwc-core`: load, context, weights,
//! cluster, validate, export.

pub mod artifacts;
pub mod config;
pub mod pipeline;

pub use config::Config;
pub use pipeline::{compare, prepare, render_report, run, RunSummary};
