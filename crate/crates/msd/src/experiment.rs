//! Monte-Carlo comparison of clusterers: simulate spreads from random seed
//! sets, detect, and score against the true seeds.
//!
//! Randomness is split per task. For replicate `r` of source count `K` on
//! network `n` (positions in the config), attempt `a` draws its seeds from
//! stream `[n, K, r, a]` under the master seed and its spread from
//! `[n, K, r, a, 0]`; method `m` seeds the Louvain visit order from
//! `[n, K, r, a, 1 + m]`. Results do not depend on thread count or
//! scheduling.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use msd_core::diffusion::{select_seeds, simulate, DiffusionConfig, InfectionOutcome};
use msd_core::eval::{error_distance, f1_score, summarize, ReplicateRow, SummaryRow};
use msd_core::graph::EdgeListOptions;
use msd_core::msd::{detect, ClustererChoice, DetectOptions};
use msd_core::rng::{derive_seed, stream};
use msd_core::Graph;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::io;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    pub name: String,
    pub edge_list_path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub networks: Vec<NetworkSpec>,
    pub k_values: Vec<usize>,
    pub replicates: usize,
    pub infection_prob: f64,
    pub target_fraction: f64,
    pub methods: Vec<String>,
    pub alpha: f64,
    pub min_cluster_size: usize,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    /// Spreads tried per replicate before it is recorded as failed.
    pub max_attempts: usize,
    /// When false, `runtime_ms` is written as 0 so reruns are byte-identical.
    pub record_runtime: bool,
    /// Appends an `error_distance` column to the replicate CSV.
    pub error_distance: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            networks: Vec::new(),
            k_values: vec![1, 3, 5],
            replicates: 200,
            infection_prob: 0.2,
            target_fraction: 0.10,
            methods: ClustererChoice::ALL
                .iter()
                .map(|c| c.name().to_string())
                .collect(),
            alpha: 0.5,
            min_cluster_size: 3,
            master_seed: 0,
            output_dir: PathBuf::from("results"),
            max_attempts: 20,
            record_runtime: true,
            error_distance: false,
        }
    }
}

impl ExperimentConfig {
    /// Reads a JSON config. Relative paths inside it are resolved against the
    /// config file's directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = io::read_text(path)?;
        let mut cfg: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Config(vec![e.to_string()]))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for net in &mut cfg.networks {
            net.edge_list_path = base.join(&net.edge_list_path);
        }
        cfg.output_dir = base.join(&cfg.output_dir);
        Ok(cfg)
    }

    /// Every problem with the config, or the parsed method list.
    pub fn validate(&self) -> Result<Vec<ClustererChoice>, CliError> {
        let mut problems = Vec::new();
        if self.networks.is_empty() {
            problems.push("networks: at least one network is required".to_string());
        }
        let mut names = BTreeSet::new();
        for net in &self.networks {
            if !names.insert(net.name.as_str()) {
                problems.push(format!("networks: duplicate name {:?}", net.name));
            }
            if !net.edge_list_path.is_file() {
                problems.push(format!(
                    "networks.{}: edge list {} not found",
                    net.name,
                    net.edge_list_path.display()
                ));
            }
        }
        if self.k_values.is_empty() || self.k_values.contains(&0) {
            problems.push("k_values: need at least one value, all positive".to_string());
        }
        if self.replicates == 0 {
            problems.push("replicates: must be at least 1".to_string());
        }
        if !(0.0..=1.0).contains(&self.infection_prob) {
            problems.push(format!(
                "infection_prob: {} outside [0, 1]",
                self.infection_prob
            ));
        }
        if !(self.target_fraction > 0.0 && self.target_fraction <= 1.0) {
            problems.push(format!(
                "target_fraction: {} outside (0, 1]",
                self.target_fraction
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            problems.push(format!("alpha: {} outside (0, 1)", self.alpha));
        }
        if self.min_cluster_size == 0 {
            problems.push("min_cluster_size: must be at least 1".to_string());
        }
        if self.max_attempts == 0 {
            problems.push("max_attempts: must be at least 1".to_string());
        }
        let mut methods = Vec::new();
        if self.methods.is_empty() {
            problems.push("methods: at least one method is required".to_string());
        }
        for m in &self.methods {
            match m.parse::<ClustererChoice>() {
                Ok(c) if methods.contains(&c) => problems.push(format!("methods: duplicate {m:?}")),
                Ok(c) => methods.push(c),
                Err(e) => problems.push(format!("methods: {e}")),
            }
        }
        if problems.is_empty() {
            Ok(methods)
        } else {
            Err(CliError::Config(problems))
        }
    }
}

/// A replicate or a (replicate, method) evaluation that produced no row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub network: String,
    pub k: usize,
    pub replicate: usize,
    /// `None` when the spread itself failed, which fails every method.
    pub method: Option<String>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    /// Ordered by network, K, replicate, then method.
    pub rows: Vec<ReplicateRow>,
    pub summary: Vec<SummaryRow>,
    /// Spreads rerun because they missed the target fraction.
    pub resampled: usize,
    pub failures: Vec<Failure>,
    /// Evaluations requested: networks × K values × replicates × methods.
    pub requested: usize,
}

struct Task<'a> {
    net: usize,
    name: &'a str,
    graph: &'a Graph,
    k: usize,
    replicate: usize,
}

struct TaskResult {
    rows: Vec<ReplicateRow>,
    resampled: usize,
    failures: Vec<Failure>,
}

/// Draws seeds and spreads until the target is reached; returns the outcome,
/// the attempt index, which is also the number of missed attempts.
fn spread(cfg: &ExperimentConfig, task: &Task) -> Result<(InfectionOutcome, u64, usize), String> {
    for attempt in 0..cfg.max_attempts as u64 {
        let path = [
            task.net as u64,
            task.k as u64,
            task.replicate as u64,
            attempt,
        ];
        let seeds = select_seeds(task.graph, task.k, &mut stream(cfg.master_seed, &path))
            .map_err(|e| e.to_string())?;
        let diffusion = DiffusionConfig {
            infection_prob: cfg.infection_prob,
            target_fraction: cfg.target_fraction,
            max_steps: None,
            seed: derive_seed(cfg.master_seed, &[path[0], path[1], path[2], path[3], 0]),
        };
        let outcome = simulate(task.graph, &seeds, &diffusion).map_err(|e| e.to_string())?;
        if outcome.hit_target {
            return Ok((outcome, attempt, attempt as usize));
        }
    }
    Err(format!(
        "target fraction not reached in {} attempts",
        cfg.max_attempts
    ))
}

fn run_task(cfg: &ExperimentConfig, methods: &[ClustererChoice], task: &Task) -> TaskResult {
    let failure = |method: Option<&str>, message: String| Failure {
        network: task.name.to_string(),
        k: task.k,
        replicate: task.replicate,
        method: method.map(str::to_string),
        message,
    };
    let (outcome, attempt, resampled) = match spread(cfg, task) {
        Ok(found) => found,
        Err(message) => {
            return TaskResult {
                rows: Vec::new(),
                resampled: cfg.max_attempts,
                failures: vec![failure(None, message)],
            }
        }
    };

    let mut result = TaskResult {
        rows: Vec::new(),
        resampled,
        failures: Vec::new(),
    };
    for (m, &method) in methods.iter().enumerate() {
        let path = [
            task.net as u64,
            task.k as u64,
            task.replicate as u64,
            attempt,
            1 + m as u64,
        ];
        let options = DetectOptions {
            clusterer: method,
            alpha: cfg.alpha,
            min_cluster_size: cfg.min_cluster_size,
            seed: derive_seed(cfg.master_seed, &path),
            ..DetectOptions::default()
        };
        let start = Instant::now();
        let detection = detect(task.graph, &outcome.infected, &options);
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        let detection = match detection {
            Ok(d) => d,
            Err(e) => {
                result
                    .failures
                    .push(failure(Some(method.name()), e.to_string()));
                continue;
            }
        };
        let detected = &detection.result.detected_sources;
        let score = match f1_score(detected, &outcome.seeds) {
            Ok(s) => s,
            Err(e) => {
                result
                    .failures
                    .push(failure(Some(method.name()), e.to_string()));
                continue;
            }
        };
        result.rows.push(ReplicateRow {
            network: task.name.to_string(),
            method: method.name().to_string(),
            k: task.k,
            replicate: task.replicate,
            f1: score.f1,
            precision: score.precision,
            recall: score.recall,
            k_detected: detection.result.k_detected,
            runtime_ms: if cfg.record_runtime { elapsed } else { 0.0 },
            error_distance: if cfg.error_distance {
                error_distance(task.graph, detected, &outcome.seeds)
            } else {
                None
            },
        });
    }
    result
}

/// Runs every (network, K, replicate) task on the current rayon pool and
/// aggregates in task order.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    methods: &[ClustererChoice],
    networks: &[(String, Graph)],
) -> ExperimentOutcome {
    let mut tasks = Vec::new();
    for (net, (name, graph)) in networks.iter().enumerate() {
        for &k in &cfg.k_values {
            for replicate in 0..cfg.replicates {
                tasks.push(Task {
                    net,
                    name,
                    graph,
                    k,
                    replicate,
                });
            }
        }
    }
    let results: Vec<TaskResult> = tasks
        .par_iter()
        .map(|t| run_task(cfg, methods, t))
        .collect();

    let mut outcome = ExperimentOutcome {
        rows: Vec::new(),
        summary: Vec::new(),
        resampled: 0,
        failures: Vec::new(),
        requested: tasks.len() * methods.len(),
    };
    for r in results {
        outcome.rows.extend(r.rows);
        outcome.resampled += r.resampled;
        outcome.failures.extend(r.failures);
    }
    // summary cells follow config order: network, method, K
    let mut ordered = outcome.rows.clone();
    ordered.sort_by_key(|r| {
        let net = networks.iter().position(|(n, _)| *n == r.network);
        let method = methods.iter().position(|m| m.name() == r.method);
        let k = cfg.k_values.iter().position(|&k| k == r.k);
        (net, method, k, r.replicate)
    });
    outcome.summary = summarize(&ordered);
    outcome
}

/// Loads every network named in the config.
pub fn load_networks(cfg: &ExperimentConfig) -> Result<Vec<(String, Graph)>, CliError> {
    cfg.networks
        .iter()
        .map(|net| {
            let (g, _) = io::read_graph(&net.edge_list_path, &EdgeListOptions::default())?;
            Ok((net.name.clone(), g))
        })
        .collect()
}

pub fn write_replicates<W: Write>(
    out: W,
    rows: &[ReplicateRow],
    with_distance: bool,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![
        "network",
        "method",
        "K",
        "replicate",
        "f1",
        "precision",
        "recall",
        "k_detected",
        "runtime_ms",
    ];
    if with_distance {
        header.push("error_distance");
    }
    w.write_record(&header)?;
    for r in rows {
        let mut record = vec![
            r.network.clone(),
            r.method.clone(),
            r.k.to_string(),
            r.replicate.to_string(),
            r.f1.to_string(),
            r.precision.to_string(),
            r.recall.to_string(),
            r.k_detected.to_string(),
            r.runtime_ms.to_string(),
        ];
        if with_distance {
            record.push(r.error_distance.map_or_else(String::new, |d| d.to_string()));
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary<W: Write>(out: W, summary: &[SummaryRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "network",
        "method",
        "K",
        "n",
        "f1_mean",
        "f1_sd",
        "k_detected_mean",
        "runtime_ms_mean",
    ])?;
    for s in summary {
        w.write_record([
            s.network.clone(),
            s.method.clone(),
            s.k.to_string(),
            s.n.to_string(),
            s.f1_mean.to_string(),
            s.f1_sd.to_string(),
            s.k_detected_mean.to_string(),
            s.runtime_ms_mean.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct RunReport<'a> {
    requested: usize,
    completed: usize,
    resampled: usize,
    failures: &'a [Failure],
}

/// Writes `replicates.csv`, `summary.csv` and `report.json` into the output
/// directory, creating it if needed.
pub fn write_outputs(cfg: &ExperimentConfig, outcome: &ExperimentOutcome) -> Result<(), CliError> {
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let csv_file = |name: &str, write: &dyn Fn(std::fs::File) -> csv::Result<()>| {
        let path = dir.join(name);
        let file = std::fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
        write(file).map_err(|source| CliError::Csv { path, source })
    };
    csv_file("replicates.csv", &|f| {
        write_replicates(f, &outcome.rows, cfg.error_distance)
    })?;
    csv_file("summary.csv", &|f| write_summary(f, &outcome.summary))?;
    let report = RunReport {
        requested: outcome.requested,
        completed: outcome.rows.len(),
        resampled: outcome.resampled,
        failures: &outcome.failures,
    };
    io::write_text(&dir.join("report.json"), &io::to_json(&report))
}

/// Plain-text summary table.
pub fn format_summary(summary: &[SummaryRow]) -> String {
    let mut out = format!(
        "{:<16} {:<8} {:>3} {:>5} {:>8} {:>8} {:>9} {:>11}\n",
        "network", "method", "K", "n", "f1_mean", "f1_sd", "k_det", "runtime_ms"
    );
    for s in summary {
        out.push_str(&format!(
            "{:<16} {:<8} {:>3} {:>5} {:>8.4} {:>8.4} {:>9.2} {:>11.3}\n",
            s.network, s.method, s.k, s.n, s.f1_mean, s.f1_sd, s.k_detected_mean, s.runtime_ms_mean
        ));
    }
    out
}
