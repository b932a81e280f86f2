//! On-disk formats: edge lists, infection snapshots, detection reports,
//! cluster dumps and graph statistics.

use std::fs;
use std::io::Write;
use std::path::Path;

use msd_core::clustering::Assignment;
use msd_core::diffusion::InfectionOutcome;
use msd_core::graph::{parse_edge_list, stats, EdgeListOptions, LoadReport};
use msd_core::msd::Detection;
use msd_core::Graph;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn read_graph(path: &Path, options: &EdgeListOptions) -> Result<(Graph, LoadReport), CliError> {
    let text = read_text(path)?;
    parse_edge_list(&text, options).map_err(|source| CliError::EdgeList {
        path: path.to_path_buf(),
        source,
    })
}

/// Observed infection state. Nodes are referred to by their edge-list labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Snapshot {
    #[serde(default)]
    pub seeds: Vec<String>,
    pub infected: Vec<String>,
    #[serde(default)]
    pub steps: usize,
    #[serde(default)]
    pub hit_target: bool,
}

impl Snapshot {
    pub fn from_outcome(g: &Graph, outcome: &InfectionOutcome) -> Self {
        let names = |nodes: &[usize]| nodes.iter().map(|&v| g.label(v).to_string()).collect();
        Snapshot {
            seeds: names(&outcome.seeds),
            infected: names(&outcome.infected),
            steps: outcome.steps,
            hit_target: outcome.hit_target,
        }
    }

    /// Infected node indices in `g`, sorted and deduplicated.
    pub fn infected_in(&self, g: &Graph, path: &Path) -> Result<Vec<usize>, CliError> {
        let mut nodes = g
            .indices_of(&self.infected)
            .map_err(|e| CliError::Snapshot {
                path: path.to_path_buf(),
                message: e.to_string(),
            })?;
        nodes.sort_unstable();
        nodes.dedup();
        Ok(nodes)
    }
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot, CliError> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Snapshot {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable value");
    text.push('\n');
    text
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub k_detected: usize,
    pub per_cluster_source: Vec<String>,
    pub detected_sources: Vec<String>,
    pub scores: Vec<f64>,
    pub clusterer: String,
    pub alpha: f64,
}

impl DetectionReport {
    pub fn new(g: &Graph, detection: &Detection, clusterer: &str, alpha: f64) -> Self {
        let names = |nodes: &[usize]| nodes.iter().map(|&v| g.label(v).to_string()).collect();
        let r = &detection.result;
        DetectionReport {
            k_detected: r.k_detected,
            per_cluster_source: names(&r.per_cluster_source),
            detected_sources: names(&r.detected_sources),
            scores: r.scores.clone(),
            clusterer: clusterer.to_string(),
            alpha,
        }
    }
}

/// Writes the community assignment of the infected subnetwork as CSV:
/// `edge_src,edge_dst,cluster` (noise is 0) for edge clusterings and
/// `node,cluster` for node clusterings. Without an assignment every infected
/// node is written as its own community.
pub fn write_cluster_dump<W: Write>(out: W, detection: &Detection) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let g_i = detection.ext.infected_subnetwork();
    let label = |local: usize| g_i.graph().label(local);
    match &detection.assignment {
        Some(Assignment::Edges(a)) => {
            w.write_record(["edge_src", "edge_dst", "cluster"])?;
            for (&(u, v), c) in g_i.edge_list().iter().zip(&a.labels) {
                w.write_record([label(u), label(v), &c.to_string()])?;
            }
        }
        Some(Assignment::Nodes(a)) => {
            w.write_record(["node", "cluster"])?;
            for (local, c) in a.labels.iter().enumerate() {
                w.write_record([label(local), &c.to_string()])?;
            }
        }
        None => {
            w.write_record(["node", "cluster"])?;
            for local in 0..g_i.n_nodes() {
                w.write_record([label(local), &(local + 1).to_string()])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub nodes: usize,
    pub edges: usize,
    pub avg_degree: f64,
    pub density: f64,
}

pub fn stats_report(g: &Graph) -> Result<StatsReport, msd_core::Error> {
    let s = stats(g)?;
    Ok(StatsReport {
        nodes: s.n_nodes,
        edges: s.n_edges,
        avg_degree: s.avg_degree,
        density: s.density,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use msd_core::msd::{detect, DetectOptions};

    #[test]
    fn snapshot_round_trip() {
        let snap = Snapshot {
            seeds: vec!["a".into()],
            infected: vec!["a".into(), "b".into()],
            steps: 3,
            hit_target: true,
        };
        let back: Snapshot = serde_json::from_str(&to_json(&snap)).unwrap();
        assert_eq!(back, snap);
        let minimal: Snapshot = serde_json::from_str(r#"{"infected":["x"]}"#).unwrap();
        assert!(minimal.seeds.is_empty() && !minimal.hit_target);
        assert!(serde_json::from_str::<Snapshot>(r#"{"infected":["x"],"extra":1}"#).is_err());
    }

    #[test]
    fn edge_dump_marks_noise() {
        // a triangle plus a pendant edge that stays noise
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4)]);
        let d = detect(&g, &[0, 1, 2, 3], &DetectOptions::default()).unwrap();
        let mut buf = Vec::new();
        write_cluster_dump(&mut buf, &d).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "edge_src,edge_dst,cluster\n0,1,1\n0,2,1\n1,2,1\n2,3,0\n"
        );
    }

    #[test]
    fn stats_of_single_edge() {
        let s = stats_report(&Graph::from_edges(2, &[(0, 1)])).unwrap();
        assert_eq!(
            (s.nodes, s.edges, s.avg_degree, s.density),
            (2, 1, 1.0, 0.5)
        );
    }
}
