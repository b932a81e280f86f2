//! Command-line interface.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use msd_core::diffusion::{select_seeds, simulate, DiffusionConfig};
use msd_core::graph::EdgeListOptions;
use msd_core::msd::{detect, ClustererChoice, DetectOptions, LogBase, Solver};
use msd_core::rng::stream;

use crate::error::CliError;
use crate::experiment::{self, ExperimentConfig};
use crate::io::{self, DetectionReport, Snapshot};

#[derive(Debug, Parser)]
#[command(
    name = "msd",
    version,
    about = "Locate multiple diffusion sources from an infection snapshot"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct EdgeListArgs {
    /// Whitespace-separated edge list, one `u v` pair per line
    pub edge_list: PathBuf,
    /// Column delimiter instead of whitespace
    #[arg(long)]
    pub delimiter: Option<char>,
    /// Lines starting with this prefix are skipped
    #[arg(long, default_value = "#")]
    pub comment: String,
}

impl EdgeListArgs {
    fn options(&self) -> EdgeListOptions {
        EdgeListOptions {
            comment_prefix: self.comment.clone(),
            delimiter: self.delimiter,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ClustererArg {
    Link,
    Louvain,
    Eigen,
}

impl From<ClustererArg> for ClustererChoice {
    fn from(c: ClustererArg) -> Self {
        match c {
            ClustererArg::Link => ClustererChoice::Link,
            ClustererArg::Louvain => ClustererChoice::Louvain,
            ClustererArg::Eigen => ClustererChoice::Eigen,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SolverArg {
    Closed,
    Iterative,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LogBaseArg {
    E,
    #[value(name = "2")]
    Two,
    #[value(name = "10")]
    Ten,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print node count, edge count, average degree and density as JSON
    Stats {
        #[command(flatten)]
        input: EdgeListArgs,
    },
    /// Spread an infection from random seeds and write the snapshot as JSON
    Simulate {
        #[command(flatten)]
        input: EdgeListArgs,
        /// Number of seeds
        #[arg(short, long)]
        k: usize,
        /// Per-contact infection probability
        #[arg(short, long, default_value_t = 0.2)]
        p: f64,
        /// Stop once the infected share exceeds this fraction
        #[arg(long, default_value_t = 0.10)]
        fraction: f64,
        /// Round cap (default 10 x nodes)
        #[arg(long)]
        max_steps: Option<usize>,
        #[arg(long, env = "MSD_SEED", default_value_t = 0)]
        seed: u64,
        /// Write here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Detect sources from a snapshot and write a JSON report
    Detect {
        #[command(flatten)]
        input: EdgeListArgs,
        /// Snapshot JSON with an `infected` label list
        snapshot: PathBuf,
        #[arg(long, value_enum, default_value = "link")]
        clusterer: ClustererArg,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// Link clusters with fewer edges become noise
        #[arg(long, default_value_t = 3)]
        min_cluster_size: usize,
        #[arg(long, value_enum, default_value = "closed")]
        solver: SolverArg,
        /// Logarithm base of the infected-node age
        #[arg(long, value_enum, default_value = "e")]
        log_base: LogBaseArg,
        /// Seed of the Louvain visit order
        #[arg(long, env = "MSD_SEED", default_value_t = 0)]
        seed: u64,
        /// Write the community assignment as CSV
        #[arg(long)]
        dump_clusters: Option<PathBuf>,
        /// Write here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a batch comparison described by a JSON config
    Experiment {
        config: PathBuf,
        /// Worker threads (default: all cores)
        #[arg(long)]
        threads: Option<usize>,
        /// Do not print the summary table
        #[arg(short, long)]
        quiet: bool,
    },
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => io::write_text(path, text),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Stats { input } => {
            let (g, _) = io::read_graph(&input.edge_list, &input.options())?;
            let report = io::stats_report(&g).map_err(CliError::Parameter)?;
            emit(None, &io::to_json(&report))
        }
        Command::Simulate {
            input,
            k,
            p,
            fraction,
            max_steps,
            seed,
            output,
        } => {
            let (g, _) = io::read_graph(&input.edge_list, &input.options())?;
            let cfg = DiffusionConfig {
                infection_prob: p,
                target_fraction: fraction,
                max_steps,
                seed,
            };
            cfg.validate().map_err(CliError::Parameter)?;
            let seeds =
                select_seeds(&g, k, &mut stream(seed, &[0])).map_err(CliError::Parameter)?;
            let outcome = simulate(&g, &seeds, &cfg).map_err(CliError::Parameter)?;
            if !outcome.hit_target {
                eprintln!(
                    "warning: stopped after {} rounds with {} of {} nodes infected, below the target",
                    outcome.steps,
                    outcome.infected.len(),
                    g.n_nodes()
                );
            }
            emit(
                output.as_deref(),
                &io::to_json(&Snapshot::from_outcome(&g, &outcome)),
            )
        }
        Command::Detect {
            input,
            snapshot,
            clusterer,
            alpha,
            min_cluster_size,
            solver,
            log_base,
            seed,
            dump_clusters,
            output,
        } => {
            let (g, _) = io::read_graph(&input.edge_list, &input.options())?;
            let snap = io::read_snapshot(&snapshot)?;
            let infected = snap.infected_in(&g, &snapshot)?;
            let options = DetectOptions {
                clusterer: clusterer.into(),
                alpha,
                min_cluster_size,
                solver: match solver {
                    SolverArg::Closed => Solver::ClosedForm,
                    SolverArg::Iterative => Solver::Iterative,
                },
                log_base: match log_base {
                    LogBaseArg::E => LogBase::Natural,
                    LogBaseArg::Two => LogBase::Two,
                    LogBaseArg::Ten => LogBase::Ten,
                },
                seed,
                ..DetectOptions::default()
            };
            let detection = detect(&g, &infected, &options).map_err(CliError::Detect)?;
            if let Some(path) = dump_clusters {
                let file = std::fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
                io::write_cluster_dump(file, &detection)
                    .map_err(|source| CliError::Csv { path, source })?;
            }
            let report = DetectionReport::new(&g, &detection, options.clusterer.name(), alpha);
            emit(output.as_deref(), &io::to_json(&report))
        }
        Command::Experiment {
            config,
            threads,
            quiet,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(seed) = seed_override()? {
                cfg.master_seed = seed;
            }
            let methods = cfg.validate()?;
            let networks = experiment::load_networks(&cfg)?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.unwrap_or(0))
                .build()
                .map_err(|e| CliError::Config(vec![format!("threads: {e}")]))?;
            let outcome = pool.install(|| experiment::run_experiment(&cfg, &methods, &networks));
            experiment::write_outputs(&cfg, &outcome)?;
            for f in &outcome.failures {
                eprintln!(
                    "failed: network={} K={} replicate={} method={} {}",
                    f.network,
                    f.k,
                    f.replicate,
                    f.method.as_deref().unwrap_or("*"),
                    f.message
                );
            }
            if outcome.resampled > 0 {
                eprintln!(
                    "resampled {} spreads that missed the target",
                    outcome.resampled
                );
            }
            if !quiet {
                emit(None, &experiment::format_summary(&outcome.summary))?;
            }
            let completed = outcome.rows.len();
            if completed < outcome.requested {
                return Err(CliError::Incomplete {
                    failed: outcome.requested - completed,
                    total: outcome.requested,
                });
            }
            Ok(())
        }
    }
}

fn seed_override() -> Result<Option<u64>, CliError> {
    match std::env::var("MSD_SEED") {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| {
            CliError::Config(vec![format!("MSD_SEED: {v:?} is not an unsigned integer")])
        }),
        Err(_) => Ok(None),
    }
}
