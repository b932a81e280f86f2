//! Community-based label propagation with node ages.
//!
//! Infected nodes carry a prominence age `(I/O)(1 + log O)` into every
//! community they touch; boundary nodes carry an exoneration label that is
//! larger the younger the node is. Labels are smoothed over the extended
//! infected network until they reach the fixed point
//! `L* = (1 - α)(I - αA)^{-1} L0`, rows are normalized, and the top infected
//! node of each community column is reported as that community's source.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::str::FromStr;

use crate::clustering::{
    membership, Assignment, Clusterer, LeadingEigenvector, LinkCommunities, Louvain,
    MembershipMatrix,
};
use crate::error::{Error, Result, Stage};
use crate::graph::{
    extended_network, normalized_adjacency, ExtendedNetwork, Graph, NodeId, NormalizedAdjacency,
};

/// Base of the logarithm in the infected-node age.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum LogBase {
    #[default]
    Natural,
    Two,
    Ten,
}

impl LogBase {
    fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => libm::log(x),
            LogBase::Two => libm::log2(x),
            LogBase::Ten => libm::log10(x),
        }
    }
}

/// Node ages. `infected[r]` belongs to label-matrix row `r`; `boundary[j]`
/// to row `n_infected + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct AgeVector {
    pub infected: Vec<f64>,
    pub boundary: Vec<f64>,
}

/// Prominence ages of infected nodes and mean infected-neighbor degree of
/// boundary nodes.
pub fn compute_ages(g: &Graph, ext: &ExtendedNetwork, base: LogBase) -> Result<AgeVector> {
    let n_inf = ext.n_infected();
    let net = ext.graph();
    let infected_degree: Vec<usize> = (0..ext.len())
        .map(|r| net.neighbors(r).iter().filter(|&&u| u < n_inf).count())
        .collect();

    let mut infected = Vec::with_capacity(n_inf);
    for (r, &i_u) in infected_degree.iter().enumerate().take(n_inf) {
        let node = ext.node_at(r);
        let o_u = g.degree(node);
        if o_u == 0 {
            return Err(Error::IsolatedInfected(g.label(node).into()));
        }
        let o = o_u as f64;
        infected.push(i_u as f64 / o * (1.0 + base.log(o)));
    }

    let boundary = (n_inf..ext.len())
        .map(|r| {
            let mut count = 0usize;
            let mut sum = 0usize;
            for &u in net.neighbors(r).iter().filter(|&&u| u < n_inf) {
                count += 1;
                sum += infected_degree[u];
            }
            debug_assert!(count > 0, "boundary node without infected neighbor");
            sum as f64 / count as f64
        })
        .collect();
    Ok(AgeVector { infected, boundary })
}

/// Row-major `N_EI × (K + 1)` label matrix. The last column holds the
/// exoneration label of boundary nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl LabelMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        LabelMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = LabelMatrix::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            m.row_mut(r).copy_from_slice(row);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Number of community columns.
    pub fn k(&self) -> usize {
        self.cols.saturating_sub(1)
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn row_mut(&mut self, row: usize) -> &mut [f64] {
        &mut self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs_diff(&self, other: &LabelMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `‖L − (αAL + (1−α)L0)‖∞`.
    pub fn fixed_point_residual(
        &self,
        adj: &NormalizedAdjacency,
        l0: &LabelMatrix,
        alpha: f64,
    ) -> f64 {
        let mut al = vec![0.0; self.data.len()];
        adj.apply(&self.data, self.cols, &mut al);
        self.data
            .iter()
            .zip(&al)
            .zip(&l0.data)
            .map(|((l, a), z)| (l - (alpha * a + (1.0 - alpha) * z)).abs())
            .fold(0.0, f64::max)
    }

    /// Each row with a positive sum divided by that sum; other rows unchanged.
    pub fn row_normalized(&self) -> LabelMatrix {
        let mut out = self.clone();
        for r in 0..out.rows {
            let row = out.row_mut(r);
            let sum: f64 = row.iter().sum();
            if sum > 0.0 {
                row.iter_mut().for_each(|x| *x /= sum);
            }
        }
        out
    }
}

/// Initial labels from ages and community membership.
pub fn init_labels(
    ext: &ExtendedNetwork,
    ages: &AgeVector,
    membership: &MembershipMatrix,
) -> Result<LabelMatrix> {
    let k = membership.k();
    if k == 0 {
        return Err(Error::NoCommunities);
    }
    let n_inf = ext.n_infected();
    if membership.rows() != n_inf {
        return Err(Error::DimensionMismatch {
            expected: n_inf,
            found: membership.rows(),
        });
    }
    if ages.infected.len() != n_inf || ages.boundary.len() != ext.n_boundary() {
        return Err(Error::DimensionMismatch {
            expected: ext.len(),
            found: ages.infected.len() + ages.boundary.len(),
        });
    }
    let mut l0 = LabelMatrix::zeros(ext.len(), k + 1);
    for r in 0..n_inf {
        for c in 0..k {
            if membership.get(r, c) {
                l0.set(r, c, ages.infected[r]);
            }
        }
    }
    if let Some(oldest) = ages.boundary.iter().copied().reduce(f64::max) {
        for (j, &age) in ages.boundary.iter().enumerate() {
            l0.set(n_inf + j, k, oldest - age);
        }
    }
    Ok(l0)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "alpha {alpha} outside (0, 1)"
        )))
    }
}

fn check_dims(adj: &NormalizedAdjacency, l0: &LabelMatrix) -> Result<()> {
    if adj.n() != l0.rows() {
        return Err(Error::DimensionMismatch {
            expected: adj.n(),
            found: l0.rows(),
        });
    }
    Ok(())
}

/// Outcome of [`propagate_iterative`].
#[derive(Debug, Clone, PartialEq)]
pub struct Propagated {
    pub labels: LabelMatrix,
    pub iterations: usize,
    /// Max-abs change of the last step.
    pub last_change: f64,
}

/// Iterates `L ← αAL + (1−α)L0` from `L0` until the max-abs change drops
/// below `tol`.
pub fn propagate_iterative(
    adj: &NormalizedAdjacency,
    l0: &LabelMatrix,
    alpha: f64,
    tol: f64,
    max_iter: usize,
) -> Result<Propagated> {
    propagate_iterative_traced(adj, l0, alpha, tol, max_iter, |_, _| {})
}

/// [`propagate_iterative`] reporting `(iteration, change)` after each step.
pub fn propagate_iterative_traced<F: FnMut(usize, f64)>(
    adj: &NormalizedAdjacency,
    l0: &LabelMatrix,
    alpha: f64,
    tol: f64,
    max_iter: usize,
    mut trace: F,
) -> Result<Propagated> {
    check_alpha(alpha)?;
    check_dims(adj, l0)?;
    let cols = l0.cols();
    let mut current = l0.clone();
    let mut next = LabelMatrix::zeros(l0.rows(), cols);
    let mut change = f64::INFINITY;
    for iteration in 1..=max_iter {
        adj.apply(&current.data, cols, &mut next.data);
        change = 0.0;
        for ((x, z), old) in next.data.iter_mut().zip(&l0.data).zip(&current.data) {
            *x = alpha * *x + (1.0 - alpha) * z;
            change = f64::max(change, (*x - old).abs());
        }
        core::mem::swap(&mut current, &mut next);
        trace(iteration, change);
        if change < tol {
            return Ok(Propagated {
                labels: current,
                iterations: iteration,
                last_change: change,
            });
        }
    }
    Err(Error::NotConverged {
        iterations: max_iter,
        residual: change,
    })
}

/// Residual tolerance of the closed-form solve, relative to `max(1, ‖rhs‖∞)`.
pub const SOLVE_TOL: f64 = 1e-12;

/// Solves `(I − αA) x = (1 − α) b` column by column with conjugate gradients.
/// `I − αA` is symmetric positive definite because the spectrum of `A` lies
/// in `[−1, 1]`.
pub fn propagate_closed_form(
    adj: &NormalizedAdjacency,
    l0: &LabelMatrix,
    alpha: f64,
) -> Result<LabelMatrix> {
    check_alpha(alpha)?;
    check_dims(adj, l0)?;
    let n = l0.rows();
    let mut out = LabelMatrix::zeros(n, l0.cols());
    let apply = |x: &[f64], y: &mut [f64]| {
        adj.apply(x, 1, y);
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = xi - alpha * *yi;
        }
    };
    let norm_inf = |v: &[f64]| v.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();

    let mut x = vec![0.0; n];
    let mut r = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut q = vec![0.0; n];
    for c in 0..l0.cols() {
        let rhs: Vec<f64> = (0..n).map(|i| (1.0 - alpha) * l0.get(i, c)).collect();
        let tol = SOLVE_TOL * norm_inf(&rhs).max(1.0);
        x.copy_from_slice(&rhs);
        apply(&x, &mut q);
        for i in 0..n {
            r[i] = rhs[i] - q[i];
        }
        p.copy_from_slice(&r);
        let mut rr = dot(&r, &r);
        let mut iterations = 0;
        while norm_inf(&r) >= tol && iterations < 10 * n + 100 {
            apply(&p, &mut q);
            let step = rr / dot(&p, &q);
            for i in 0..n {
                x[i] += step * p[i];
                r[i] -= step * q[i];
            }
            let rr_next = dot(&r, &r);
            for i in 0..n {
                p[i] = r[i] + (rr_next / rr) * p[i];
            }
            rr = rr_next;
            iterations += 1;
        }
        // recompute to guard against drift in the recursive residual
        apply(&x, &mut q);
        let residual = rhs
            .iter()
            .zip(&q)
            .map(|(b, ax)| (b - ax).abs())
            .fold(0.0, f64::max);
        if residual >= tol {
            return Err(Error::SolverResidual { residual });
        }
        for (i, &xi) in x.iter().enumerate() {
            out.set(i, c, xi);
        }
    }
    Ok(out)
}

/// Sources chosen per community column.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    /// `S_k` for every non-degenerate community column, in column order.
    pub per_cluster_source: Vec<NodeId>,
    /// 1-based community of each entry of `per_cluster_source`.
    pub clusters: Vec<usize>,
    /// Row-normalized score of each `S_k`.
    pub scores: Vec<f64>,
    /// Distinct sources, sorted.
    pub detected_sources: Vec<NodeId>,
    /// Number of communities `K`.
    pub k_detected: usize,
}

/// Row-normalizes `l_star` and takes the best infected row of each community
/// column; ties go to the smallest node index. Columns that are zero on every
/// infected row are skipped.
pub fn identify_sources(l_star: &LabelMatrix, ext: &ExtendedNetwork) -> Result<DetectionResult> {
    if l_star.rows() != ext.len() {
        return Err(Error::DimensionMismatch {
            expected: ext.len(),
            found: l_star.rows(),
        });
    }
    let scores = l_star.row_normalized();
    let k = l_star.k();
    let mut result = DetectionResult {
        per_cluster_source: Vec::new(),
        clusters: Vec::new(),
        scores: Vec::new(),
        detected_sources: Vec::new(),
        k_detected: k,
    };
    for c in 0..k {
        let mut best: Option<(usize, f64)> = None;
        for r in 0..ext.n_infected() {
            let s = scores.get(r, c);
            // rows follow node index order, so strict ">" keeps the smallest index
            if s > 0.0 && best.is_none_or(|(_, b)| s > b) {
                best = Some((r, s));
            }
        }
        if let Some((r, s)) = best {
            result.per_cluster_source.push(ext.node_at(r));
            result.clusters.push(c + 1);
            result.scores.push(s);
        }
    }
    if result.per_cluster_source.is_empty() {
        return Err(Error::NoIdentifiableSources);
    }
    result.detected_sources = result.per_cluster_source.clone();
    result.detected_sources.sort_unstable();
    result.detected_sources.dedup();
    Ok(result)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ClustererChoice {
    #[default]
    Link,
    Louvain,
    Eigen,
}

impl ClustererChoice {
    pub const ALL: [ClustererChoice; 3] = [
        ClustererChoice::Link,
        ClustererChoice::Louvain,
        ClustererChoice::Eigen,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClustererChoice::Link => LinkCommunities::NAME,
            ClustererChoice::Louvain => Louvain::NAME,
            ClustererChoice::Eigen => LeadingEigenvector::NAME,
        }
    }
}

impl FromStr for ClustererChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "link" => Ok(ClustererChoice::Link),
            "louvain" => Ok(ClustererChoice::Louvain),
            "eigen" => Ok(ClustererChoice::Eigen),
            other => Err(Error::InvalidParameter(format!(
                "unknown clusterer {other:?} (expected link, louvain or eigen)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Solver {
    /// Linear solve, falling back to iteration if the residual is not met.
    #[default]
    ClosedForm,
    Iterative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectOptions {
    pub clusterer: ClustererChoice,
    pub alpha: f64,
    /// Stopping change for iterative propagation.
    pub tol: f64,
    pub max_iter: usize,
    pub min_cluster_size: usize,
    pub solver: Solver,
    pub log_base: LogBase,
    /// Seed of the Louvain visit order.
    pub seed: u64,
}

impl Default for DetectOptions {
    fn default() -> Self {
        DetectOptions {
            clusterer: ClustererChoice::Link,
            alpha: 0.5,
            tol: 1e-10,
            max_iter: 10_000,
            min_cluster_size: 3,
            solver: Solver::ClosedForm,
            log_base: LogBase::Natural,
            seed: 0,
        }
    }
}

/// Everything produced by one detection run.
#[derive(Debug, Clone)]
pub struct Detection {
    pub ext: ExtendedNetwork,
    /// `None` when the infected nodes share no edge and clustering is skipped.
    pub assignment: Option<Assignment>,
    pub result: DetectionResult,
}

/// Runs the full pipeline with the clusterer selected in `options`. An edge
/// clustering that leaves every edge as noise is retried with
/// `min_cluster_size = 1`.
pub fn detect(g: &Graph, infected: &[NodeId], options: &DetectOptions) -> Result<Detection> {
    match options.clusterer {
        ClustererChoice::Link => {
            let link = LinkCommunities {
                min_cluster_size: options.min_cluster_size,
            };
            match detect_with(g, infected, &link, options) {
                Err(Error::Stage {
                    stage: Stage::Clustering,
                    source,
                }) if matches!(*source, Error::AllEdgesNoise) => {
                    let relaxed = LinkCommunities {
                        min_cluster_size: 1,
                    };
                    detect_with(g, infected, &relaxed, options)
                }
                other => other,
            }
        }
        ClustererChoice::Louvain => {
            detect_with(g, infected, &Louvain { seed: options.seed }, options)
        }
        ClustererChoice::Eigen => detect_with(g, infected, &LeadingEigenvector, options),
    }
}

/// Runs the full pipeline with any clusterer.
///
/// When the infected nodes share no edge there is nothing to cluster: each
/// infected node is its own community and its own only candidate.
pub fn detect_with(
    g: &Graph,
    infected: &[NodeId],
    clusterer: &dyn Clusterer,
    options: &DetectOptions,
) -> Result<Detection> {
    let ext = extended_network(g, infected).map_err(|e| e.at(Stage::ExtendedNetwork))?;
    let g_i = ext.infected_subnetwork();
    if g_i.n_edges() == 0 {
        let nodes = ext.infected().to_vec();
        let result = DetectionResult {
            clusters: (1..=nodes.len()).collect(),
            scores: vec![1.0; nodes.len()],
            k_detected: nodes.len(),
            detected_sources: nodes.clone(),
            per_cluster_source: nodes,
        };
        return Ok(Detection {
            ext,
            assignment: None,
            result,
        });
    }

    let assignment = clusterer
        .cluster(g_i)
        .map_err(|e| e.at(Stage::Clustering))?;
    let b = membership(g_i, &assignment).map_err(|e| e.at(Stage::Membership))?;
    let ages = compute_ages(g, &ext, options.log_base).map_err(|e| e.at(Stage::Ages))?;
    let l0 = init_labels(&ext, &ages, &b).map_err(|e| e.at(Stage::Labels))?;
    let adj = normalized_adjacency(ext.graph());
    let iterate = || {
        propagate_iterative(&adj, &l0, options.alpha, options.tol, options.max_iter)
            .map(|p| p.labels)
    };
    let l_star = match options.solver {
        Solver::ClosedForm => {
            propagate_closed_form(&adj, &l0, options.alpha).or_else(|e| match e {
                Error::SolverResidual { .. } => iterate(),
                other => Err(other),
            })
        }
        Solver::Iterative => iterate(),
    }
    .map_err(|e| e.at(Stage::Propagation))?;
    let result = identify_sources(&l_star, &ext).map_err(|e| e.at(Stage::Identification))?;
    Ok(Detection {
        ext,
        assignment: Some(assignment),
        result,
    })
}
