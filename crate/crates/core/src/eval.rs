//! Set-based scoring of detected sources and replicate aggregation.

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn distinct(nodes: &[NodeId]) -> Vec<NodeId> {
    let mut v = nodes.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Precision, recall and F1 of `detected` against `truth`, as sets.
pub fn f1_score(detected: &[NodeId], truth: &[NodeId]) -> Result<EvalResult> {
    let truth = distinct(truth);
    if truth.is_empty() {
        return Err(Error::EmptyTruth);
    }
    let detected = distinct(detected);
    let hits = detected
        .iter()
        .filter(|v| truth.binary_search(v).is_ok())
        .count() as f64;
    let recall = hits / truth.len() as f64;
    let precision = if detected.is_empty() {
        0.0
    } else {
        hits / detected.len() as f64
    };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(EvalResult {
        precision,
        recall,
        f1,
    })
}

/// Mean hop distance from each detected node to its nearest true source.
/// `None` if `detected` is empty or some detected node cannot reach any
/// source.
pub fn error_distance(g: &Graph, detected: &[NodeId], truth: &[NodeId]) -> Option<f64> {
    if detected.is_empty() {
        return None;
    }
    let mut dist = vec![usize::MAX; g.n_nodes()];
    let mut queue = VecDeque::new();
    for &s in truth {
        if dist[s] != 0 {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &u in g.neighbors(v) {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    let mut total = 0usize;
    for &d in detected {
        if dist[d] == usize::MAX {
            return None;
        }
        total += dist[d];
    }
    Some(total as f64 / detected.len() as f64)
}

/// One (network, method, K, replicate) evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateRow {
    pub network: String,
    pub method: String,
    pub k: usize,
    pub replicate: usize,
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
    pub k_detected: usize,
    pub runtime_ms: f64,
    pub error_distance: Option<f64>,
}

/// Aggregate of the replicates of one (network, method, K) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub network: String,
    pub method: String,
    pub k: usize,
    pub n: usize,
    pub f1_mean: f64,
    /// Sample standard deviation; zero for a single replicate.
    pub f1_sd: f64,
    pub k_detected_mean: f64,
    pub runtime_ms_mean: f64,
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn sample_sd(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let mu = mean(values);
    let ss: f64 = values.iter().map(|v| (v - mu) * (v - mu)).sum();
    libm::sqrt(ss / (values.len() - 1) as f64)
}

/// Groups rows by (network, method, K) in order of first appearance; rows
/// within a cell are aggregated in the order given.
pub fn summarize(rows: &[ReplicateRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(&str, &str, usize)> = Vec::new();
    for r in rows {
        let key = (r.network.as_str(), r.method.as_str(), r.k);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(network, method, k)| {
            let cell: Vec<&ReplicateRow> = rows
                .iter()
                .filter(|r| r.network == network && r.method == method && r.k == k)
                .collect();
            let f1: Vec<f64> = cell.iter().map(|r| r.f1).collect();
            let kd: Vec<f64> = cell.iter().map(|r| r.k_detected as f64).collect();
            let rt: Vec<f64> = cell.iter().map(|r| r.runtime_ms).collect();
            SummaryRow {
                network: network.into(),
                method: method.into(),
                k,
                n: cell.len(),
                f1_mean: mean(&f1),
                f1_sd: sample_sd(&f1),
                k_detected_mean: mean(&kd),
                runtime_ms_mean: mean(&rt),
            }
        })
        .collect()
}
