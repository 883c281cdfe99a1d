use std::collections::BTreeMap;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::export::{self, FAULTS_FILE, MANIFEST_FILE, RECORDS_FILE};
use super::RunConfig;
use crate::alloc::{allocate, Algorithm};
use crate::error::{Error, Result};
use crate::metrics::{evaluate, MetricRecord, Metrics};
use crate::rng::{self, RNG_SCHEME};
use crate::scenario::{generate, OutageCase};
use crate::valuation::Context;

/// Scenarios handed to the worker pool between two flushes of the record file.
const CHUNK_SCENARIOS: u64 = 64;

/// A failed task. Context and algorithm are empty when scenario generation
/// itself failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fault {
    pub scenario_seed: u64,
    pub case: OutageCase,
    pub context: Option<Context>,
    pub algorithm: Option<Algorithm>,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct SimOutput {
    pub records: Vec<MetricRecord>,
    pub faults: Vec<Fault>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub code_version: String,
    pub rng_scheme: String,
    pub config: RunConfig,
    /// Records per "case/context/algorithm" group; expected counts until the
    /// run finishes, then the counts actually written.
    pub group_counts: BTreeMap<String, u64>,
    pub finished: bool,
    pub faults: u64,
}

impl RunManifest {
    fn new(config: &RunConfig) -> RunManifest {
        let mut group_counts = BTreeMap::new();
        for &case in &config.cases {
            for &ctx in &config.contexts {
                for &alg in &config.algorithms {
                    group_counts.insert(group_label(case, ctx, alg), config.n_scenarios);
                }
            }
        }
        RunManifest {
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            rng_scheme: RNG_SCHEME.to_string(),
            config: config.clone(),
            group_counts,
            finished: false,
            faults: 0,
        }
    }

    fn write(&self, dir: &Path) -> Result<()> {
        fs::write(
            dir.join(MANIFEST_FILE),
            serde_json::to_string_pretty(self)? + "\n",
        )?;
        Ok(())
    }
}

fn group_label(case: OutageCase, ctx: Context, alg: Algorithm) -> String {
    format!("{case}/{ctx}/{alg}")
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub records: u64,
    pub faults: u64,
    pub plot_files: Vec<PathBuf>,
}

fn panic_message(payload: &(dyn std::any::Any + Send)) -> String {
    payload
        .downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| payload.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "panic".into())
}

/// One record per (context, algorithm) for scenario `index` under `case`,
/// in config order.
pub fn scenario_records(
    config: &RunConfig,
    index: u64,
    case: OutageCase,
) -> Vec<Result<MetricRecord, Fault>> {
    let seed = config.scenario_seed(index);
    let fault = |ctx, alg, message: String| Fault {
        scenario_seed: seed,
        case,
        context: ctx,
        algorithm: alg,
        message,
    };
    let scenario = match generate(&config.generator.with_case(case), seed) {
        Ok(s) => s,
        Err(e) => return vec![Err(fault(None, None, e.to_string()))],
    };
    let mut out = Vec::with_capacity(config.contexts.len() * config.algorithms.len());
    for &ctx in &config.contexts {
        for &alg in &config.algorithms {
            let reps = if alg.is_stochastic() {
                config.stochastic_reps
            } else {
                1
            };
            let mut samples = Vec::with_capacity(reps as usize);
            let mut elapsed = 0.0;
            let mut failure = None;
            for rep in 0..reps {
                let mut stream = rng::stream(&[
                    config.base_seed,
                    index,
                    case.index(),
                    ctx.index(),
                    alg.index(),
                    u64::from(rep),
                ]);
                let start = Instant::now();
                let result = panic::catch_unwind(AssertUnwindSafe(|| {
                    allocate(alg, &scenario, ctx, &config.alloc, &mut stream)
                }));
                elapsed += start.elapsed().as_secs_f64();
                let metrics = match result {
                    Ok(Ok(a)) => evaluate(&scenario, &a),
                    Ok(Err(e)) => Err(e),
                    Err(p) => Err(Error::Domain(format!(
                        "allocator panicked: {}",
                        panic_message(&*p)
                    ))),
                };
                match metrics {
                    Ok(m) => samples.push(m),
                    Err(e) => {
                        failure = Some(e.to_string());
                        break;
                    }
                }
            }
            let record = match failure {
                Some(msg) => Err(fault(Some(ctx), Some(alg), msg)),
                None => Metrics::mean(&samples)
                    .map(|m| {
                        let wall = if config.record_timing {
                            elapsed / f64::from(reps)
                        } else {
                            0.0
                        };
                        m.into_record(seed, case, ctx, alg, wall)
                    })
                    .map_err(|e| fault(Some(ctx), Some(alg), e.to_string())),
            };
            out.push(record);
        }
    }
    out
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}

/// Runs scenarios `[lo, hi)` on the pool; results come back in
/// (index, case, context, algorithm) order whatever the thread count.
fn sweep(
    config: &RunConfig,
    pool: &rayon::ThreadPool,
    lo: u64,
    hi: u64,
) -> Vec<Result<MetricRecord, Fault>> {
    let tasks: Vec<(u64, OutageCase)> = (lo..hi)
        .flat_map(|i| config.cases.iter().map(move |&c| (i, c)))
        .collect();
    pool.install(|| {
        tasks
            .par_iter()
            .map(|&(i, case)| scenario_records(config, i, case))
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

/// The whole sweep in memory.
pub fn simulate(config: &RunConfig) -> Result<SimOutput> {
    config.validate()?;
    let pool = pool(config.workers)?;
    let mut out = SimOutput::default();
    for r in sweep(config, &pool, 0, config.n_scenarios) {
        match r {
            Ok(rec) => out.records.push(rec),
            Err(f) => out.faults.push(f),
        }
    }
    Ok(out)
}

/// The sweep with persistence: manifest first, records streamed in
/// deterministic order, then faults, aggregates and plot data.
pub fn run(config: &RunConfig, out_dir: &Path) -> Result<RunSummary> {
    config.validate()?;
    fs::create_dir_all(out_dir)?;
    let mut manifest = RunManifest::new(config);
    manifest.write(out_dir)?;

    let pool = pool(config.workers)?;
    let mut writer = csv::Writer::from_path(out_dir.join(RECORDS_FILE))?;
    let mut faults = Vec::new();
    let mut counts: BTreeMap<String, u64> = manifest
        .group_counts
        .keys()
        .map(|k| (k.clone(), 0))
        .collect();
    let mut written = 0u64;
    let mut lo = 0;
    while lo < config.n_scenarios {
        let hi = (lo + CHUNK_SCENARIOS).min(config.n_scenarios);
        for r in sweep(config, &pool, lo, hi) {
            match r {
                Ok(rec) => {
                    writer.serialize(&rec)?;
                    *counts
                        .entry(group_label(rec.case, rec.context, rec.algorithm))
                        .or_default() += 1;
                    written += 1;
                }
                Err(f) => faults.push(f),
            }
        }
        writer.flush()?;
        lo = hi;
    }
    drop(writer);
    export::write_faults(&faults, &out_dir.join(FAULTS_FILE))?;

    manifest.group_counts = counts;
    manifest.finished = true;
    manifest.faults = faults.len() as u64;
    manifest.write(out_dir)?;

    let plot_files = if written > 0 {
        export::aggregate_dir(out_dir)?
    } else {
        Vec::new()
    };
    Ok(RunSummary {
        out_dir: out_dir.to_path_buf(),
        records: written,
        faults: faults.len() as u64,
        plot_files,
    })
}
