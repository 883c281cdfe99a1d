//! Multi-connectivity channel assignment.
//!
//! Tenants compete for the channels offered by a handful of base stations.
//! A tenant holding a set of channels achieves the epsilon-outage capacity
//! of the selection-combined links ([`radio::rho`]). The crate provides the
//! scenario generator, eleven allocation algorithms (randomized baselines,
//! deferred acceptance variants, top trading cycles and a combinatorial
//! auction with an exact winner determination solver), evaluation metrics
//! and a seeded Monte Carlo harness.

pub mod alloc;
pub mod assignment;
pub mod channel_set;
pub mod error;
pub mod harness;
pub mod ilp;
pub mod metrics;
pub mod radio;
pub mod rng;
pub mod scenario;
pub mod valuation;

pub use alloc::{allocate, Algorithm, AllocParams};
pub use assignment::Assignment;
pub use channel_set::ChannelSet;
pub use error::{Error, Result};
pub use metrics::{evaluate, MetricRecord, Metrics};
pub use radio::{rho, RadioParams};
pub use scenario::{generate, GeneratorConfig, OutageCase, Scenario};
pub use valuation::{utility, Context, UtilityParams};
