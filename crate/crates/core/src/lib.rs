//! Oracle-efficient contextual bandits.
//!
//! The main learner ([`bandit::Learner`]) re-solves a small feasibility
//! problem over a sparse distribution on policies at the end of each epoch,
//! and reaches the policy class only through an argmax oracle
//! ([`oracle::ArgmaxOracle`]). Around it sit:
//!
//! - [`estimator`]: inverse-propensity reward estimates and the empirical best policy;
//! - [`sampler`]: sparse weights, smoothed projection onto actions, sampling;
//! - [`optimizer`]: the coordinate-descent solver and its potential function;
//! - [`oracle`]: the oracle role, the cost-sensitive reduction, the probability table;
//! - [`cover`]: the fully online variant driven by online cost-sensitive learners;
//! - [`harness`]: instance generators, baselines, progressive validation and metrics.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

pub mod bandit;
pub mod config;
pub mod cover;
pub mod error;
pub mod estimator;
pub mod harness;
pub mod optimizer;
pub mod oracle;
pub mod policies;
pub mod sampler;
pub mod schedule;
pub mod types;

pub use config::AlgoConfig;
pub use error::{Error, Result};
pub use schedule::EpochSchedule;
pub use types::{ActionId, Context, History, InteractionRecord, PolicyClass, PolicyId};
