//! Monte Carlo harness.
//!
//! A [`RunConfig`] names the scenario count, base seed and the subsets of
//! cases, contexts and algorithms to sweep. [`run`] writes a manifest, then
//! streams one [`MetricRecord`] per (scenario, case, context, algorithm) to
//! `records.csv`, and finishes with aggregates and plot-ready tables.
//! [`simulate`] does the same sweep in memory.

mod engine;
mod export;

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::alloc::{Algorithm, AllocParams};
use crate::error::{Error, Result};
use crate::scenario::{GeneratorConfig, OutageCase};
use crate::valuation::Context;

pub use engine::{run, scenario_records, simulate, Fault, RunManifest, RunSummary, SimOutput};
pub use export::{
    aggregate_dir, export_plot_data, read_records, write_aggregates, write_records,
    AGGREGATES_FILE, FAULTS_FILE, MANIFEST_FILE, PLOT_DIR, RECORDS_FILE, SCATTER_FILE,
};

pub use crate::metrics::MetricRecord;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n_scenarios: u64,
    pub base_seed: u64,
    pub cases: Vec<OutageCase>,
    pub contexts: Vec<Context>,
    pub algorithms: Vec<Algorithm>,
    /// Repetitions averaged per scenario for R, SR1 and SR2.
    pub stochastic_reps: u32,
    pub generator: GeneratorConfig,
    pub alloc: AllocParams,
    /// 0 uses every available core.
    pub workers: usize,
    /// When false every wall time is written as 0, making the record file
    /// byte-reproducible.
    pub record_timing: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n_scenarios: 1000,
            base_seed: 1,
            cases: OutageCase::ALL.to_vec(),
            contexts: Context::ALL.to_vec(),
            algorithms: Algorithm::ALL.to_vec(),
            stochastic_reps: 10,
            generator: GeneratorConfig::default(),
            alloc: AllocParams::default(),
            workers: 0,
            record_timing: true,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_scenarios == 0 {
            return Err(Error::Config("n_scenarios must be at least 1".into()));
        }
        if self.stochastic_reps == 0 {
            return Err(Error::Config("stochastic_reps must be at least 1".into()));
        }
        fn distinct<T: Ord + Copy>(what: &str, items: &[T]) -> Result<()> {
            if items.is_empty() {
                return Err(Error::Config(format!("{what} must not be empty")));
            }
            if items.iter().collect::<BTreeSet<_>>().len() != items.len() {
                return Err(Error::Config(format!("{what} contains duplicates")));
            }
            Ok(())
        }
        distinct("cases", &self.cases)?;
        distinct("contexts", &self.contexts)?;
        distinct("algorithms", &self.algorithms)?;
        self.generator.validate()?;
        self.alloc.auction.validate()?;
        Ok(())
    }

    /// Loads a TOML or JSON config. A JSON run manifest is accepted too, in
    /// which case its config snapshot is returned.
    pub fn from_path(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        let is_toml = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("toml"));
        if is_toml {
            return Ok(toml::from_str(&text)?);
        }
        let value: serde_json::Value = serde_json::from_str(&text)?;
        if value.get("rng_scheme").is_some() {
            let manifest: RunManifest = serde_json::from_value(value)?;
            return Ok(manifest.config);
        }
        Ok(serde_json::from_value(value)?)
    }

    /// Number of records a fault-free run produces.
    pub fn expected_records(&self) -> u64 {
        self.n_scenarios * (self.cases.len() * self.contexts.len() * self.algorithms.len()) as u64
    }

    /// Seed of the scenario with the given index.
    pub fn scenario_seed(&self, index: u64) -> u64 {
        self.base_seed ^ index
    }
}
