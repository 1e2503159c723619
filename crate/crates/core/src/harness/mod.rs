//! Instances, baselines, evaluation and metrics for simulations.

pub mod baselines;
pub mod dataset;
pub mod env;
pub mod instances;
pub mod metrics;
pub mod replicas;

pub use env::{Environment, Round};
pub use metrics::{progressive_validation, MetricsRecord, RunOutput, RunSummary};
