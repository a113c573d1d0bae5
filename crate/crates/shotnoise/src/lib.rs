//! Experiment runner for renewal shot noise under slowly varying tails.
//!
//! Each experiment simulates a pre-limit quantity with the samplers in
//! [`shotnoise_core`], compares it with its limit law or an exact sampler of
//! the limit, and produces an [`report::ExperimentReport`] plus CSV tables.

// `!(x > 0.0)` is the idiom here for rejecting NaN along with the bound.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod lspec;
pub mod oracle;
pub mod report;
pub mod runner;

pub use config::{Experiment, ExperimentConfig, Overrides, Tolerances};
pub use error::{AppError, Result};
pub use experiments::run;
pub use report::{ExperimentReport, RunOutput, SampleTable, TestRecord, Verdict};
