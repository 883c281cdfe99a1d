use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context as _, Result};
use clap::{Args, Parser, Subcommand};

use chanalloc::alloc::auction::{build_wdp, solve_feca, solve_wdp, BidMatrix, WdpSolution};
use chanalloc::harness::{self, RunConfig, FAULTS_FILE, RECORDS_FILE};
use chanalloc::{generate, Algorithm, ChannelSet, Context, OutageCase};

/// Exit status of a run that finished but logged allocator faults.
const EXIT_FAULTS: u8 = 2;

#[derive(Parser)]
#[command(
    name = "chanalloc",
    version,
    about = "Multi-connectivity channel allocation simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo sweep writing records, aggregates and plot data.
    Run(RunArgs),
    /// Recompute aggregates and plot data from a run directory.
    Aggregate {
        #[arg(long = "in", value_name = "DIR")]
        input: PathBuf,
    },
    /// Print the JSON document of one generated scenario.
    DumpScenario {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "I")]
        case: OutageCase,
        /// Config file whose generator section is used.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Solve the winner determination problem of a bid matrix CSV.
    SolveWdp {
        #[arg(long, value_name = "FILE.csv")]
        bids: PathBuf,
        /// Minimum value per bidder id (comma-separated), solved with the
        /// relaxation loop.
        #[arg(long, value_delimiter = ',')]
        min_values: Option<Vec<f64>>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML or JSON config, or the manifest of an earlier run.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scenarios: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    cases: Option<Vec<OutageCase>>,
    #[arg(long, value_delimiter = ',')]
    contexts: Option<Vec<Context>>,
    #[arg(long, value_delimiter = ',')]
    algorithms: Option<Vec<Algorithm>>,
    #[arg(long)]
    reps: Option<u32>,
    #[arg(long)]
    workers: Option<usize>,
    /// Write zero wall times so the record file is byte-reproducible.
    #[arg(long)]
    no_timing: bool,
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => {
                RunConfig::from_path(p).with_context(|| format!("loading {}", p.display()))?
            }
            None => RunConfig::default(),
        };
        if let Some(n) = self.scenarios {
            c.n_scenarios = n;
        }
        if let Some(s) = self.seed {
            c.base_seed = s;
        }
        if let Some(v) = &self.cases {
            c.cases = v.clone();
        }
        if let Some(v) = &self.contexts {
            c.contexts = v.clone();
        }
        if let Some(v) = &self.algorithms {
            c.algorithms = v.clone();
        }
        if let Some(r) = self.reps {
            c.stochastic_reps = r;
        }
        if let Some(w) = self.workers {
            c.workers = w;
        }
        if self.no_timing {
            c.record_timing = false;
        }
        c.validate()?;
        Ok(c)
    }
}

fn cmd_run(args: &RunArgs) -> Result<ExitCode> {
    let config = args.config()?;
    eprintln!(
        "running {} scenarios x {} cases x {} contexts x {} algorithms",
        config.n_scenarios,
        config.cases.len(),
        config.contexts.len(),
        config.algorithms.len()
    );
    let summary = harness::run(&config, &args.out)?;
    println!(
        "{} records written to {}",
        summary.records,
        args.out.join(RECORDS_FILE).display()
    );
    println!(
        "{} plot files under {}",
        summary.plot_files.len(),
        args.out.join(harness::PLOT_DIR).display()
    );
    if summary.faults > 0 {
        eprintln!(
            "{} faults, see {}",
            summary.faults,
            args.out.join(FAULTS_FILE).display()
        );
        return Ok(ExitCode::from(EXIT_FAULTS));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_dump_scenario(seed: u64, case: OutageCase, config: Option<&Path>) -> Result<()> {
    let generator = match config {
        Some(p) => RunConfig::from_path(p)?.generator,
        None => Default::default(),
    };
    let scenario = generate(&generator.with_case(case), seed)?;
    emit(&(scenario.to_json()? + "\n"))
}

/// Writes to stdout, treating a closed pipe as success.
fn emit(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn one_based(set: ChannelSet) -> Vec<usize> {
    set.iter().map(|c| c + 1).collect()
}

fn join(items: &[usize]) -> String {
    if items.is_empty() {
        return "none".into();
    }
    items
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn cmd_solve_wdp(path: &Path, min_values: Option<&[f64]>, json: bool) -> Result<()> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let matrix =
        BidMatrix::read_csv(file).with_context(|| format!("reading {}", path.display()))?;
    let solution: WdpSolution = match min_values {
        Some(mins) => solve_feca(&matrix, mins)?,
        None => match solve_wdp(&build_wdp(&matrix, None), &matrix)? {
            Some(s) => s,
            None => bail!("winner determination problem is infeasible"),
        },
    };
    let mut covered = ChannelSet::EMPTY;
    for &b in &solution.accepted {
        covered = covered.union(matrix.bids[b].bundle);
    }
    let unassigned: Vec<usize> = (0..matrix.n_channels)
        .filter(|&c| !covered.contains(c))
        .map(|c| c + 1)
        .collect();
    let accepted: Vec<usize> = solution.accepted.iter().map(|b| b + 1).collect();

    if json {
        let bids: Vec<_> = solution
            .accepted
            .iter()
            .map(|&b| {
                let bid = &matrix.bids[b];
                serde_json::json!({
                    "bid": b + 1,
                    "bidder": bid.bidder,
                    "channels": one_based(bid.bundle),
                    "value": bid.value,
                })
            })
            .collect();
        let doc = serde_json::json!({
            "objective": solution.objective,
            "accepted": accepted,
            "unassigned_channels": unassigned,
            "winning_bids": bids,
            "nodes_explored": solution.nodes_explored,
        });
        return emit(&(serde_json::to_string_pretty(&doc)? + "\n"));
    }
    let mut text = format!(
        "objective: {}\naccepted bids: {}\n",
        solution.objective,
        join(&accepted)
    );
    for &b in &solution.accepted {
        let bid = &matrix.bids[b];
        text += &format!(
            "  bid {}: bidder {} gets channels {} (value {})\n",
            b + 1,
            bid.bidder,
            join(&one_based(bid.bundle)),
            bid.value
        );
    }
    text += &format!("unassigned channels: {}\n", join(&unassigned));
    emit(&text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Aggregate { input } => harness::aggregate_dir(input)
            .map(|files| {
                println!(
                    "{} plot files written under {}",
                    files.len(),
                    input.join(harness::PLOT_DIR).display()
                );
                ExitCode::SUCCESS
            })
            .map_err(Into::into),
        Command::DumpScenario { seed, case, config } => {
            cmd_dump_scenario(*seed, *case, config.as_deref()).map(|_| ExitCode::SUCCESS)
        }
        Command::SolveWdp {
            bids,
            min_values,
            json,
        } => cmd_solve_wdp(bids, min_values.as_deref(), *json).map(|_| ExitCode::SUCCESS),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
