//! Undirected simple graphs, snapshot subnetworks and the normalized adjacency.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt::Write as _;

use crate::error::{Error, Result};

/// Dense node index into a [`Graph`].
pub type NodeId = usize;

/// Undirected simple graph with stable string labels mapped to dense indices.
///
/// Neighbor lists are sorted, symmetric and free of self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    labels: Vec<String>,
    index: BTreeMap<String, NodeId>,
    adjacency: Vec<Vec<NodeId>>,
    n_edges: usize,
}

/// What was discarded while building a [`Graph`] from raw pairs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadReport {
    /// Pairs read, self-loops excluded, before symmetrization.
    pub raw_edges: usize,
    pub self_loops_dropped: usize,
    /// Repeated or reciprocal pairs folded into an existing undirected edge.
    pub duplicates_collapsed: usize,
}

/// Orders labels numerically when both parse as integers, integers first,
/// and lexicographically otherwise.
pub fn label_order(a: &str, b: &str) -> Ordering {
    match (a.parse::<i64>(), b.parse::<i64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

impl Graph {
    /// Builds a graph from labeled pairs. Reciprocal and repeated pairs
    /// collapse to one undirected edge; self-loops are dropped but their node
    /// is kept.
    pub fn from_labeled_edges<I, S>(pairs: I) -> (Graph, LoadReport)
    where
        I: IntoIterator<Item = (S, S)>,
        S: AsRef<str>,
    {
        let mut raw: Vec<(String, String)> = Vec::new();
        let mut seen: BTreeMap<String, ()> = BTreeMap::new();
        let mut report = LoadReport::default();
        for (a, b) in pairs {
            let (a, b) = (a.as_ref(), b.as_ref());
            seen.entry(a.to_string()).or_default();
            seen.entry(b.to_string()).or_default();
            if a == b {
                report.self_loops_dropped += 1;
            } else {
                report.raw_edges += 1;
                raw.push((a.to_string(), b.to_string()));
            }
        }
        let mut labels: Vec<String> = seen.into_keys().collect();
        labels.sort_by(|a, b| label_order(a, b));
        let index: BTreeMap<String, NodeId> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        let edges: Vec<(NodeId, NodeId)> = raw.iter().map(|(a, b)| (index[a], index[b])).collect();
        let graph = Graph::with_labels(labels, index, &edges);
        report.duplicates_collapsed = report.raw_edges - graph.n_edges;
        (graph, report)
    }

    /// Builds a graph on nodes `0..n` labeled by their index.
    ///
    /// Panics if an endpoint is out of range.
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId)]) -> Graph {
        let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        for &(a, b) in edges {
            assert!(a < n && b < n, "edge ({a}, {b}) out of range for {n} nodes");
        }
        Graph::with_labels(labels, index, edges)
    }

    fn with_labels(
        labels: Vec<String>,
        index: BTreeMap<String, NodeId>,
        edges: &[(NodeId, NodeId)],
    ) -> Graph {
        let mut adjacency = vec![Vec::new(); labels.len()];
        for &(a, b) in edges {
            if a != b {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
        let mut twice = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            twice += list.len();
        }
        Graph {
            labels,
            index,
            adjacency,
            n_edges: twice / 2,
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.labels.len()
    }

    pub fn n_edges(&self) -> usize {
        self.n_edges
    }

    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.adjacency[node].len()
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn label(&self, node: NodeId) -> &str {
        &self.labels[node]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    /// Resolves labels to indices; the first unknown label is reported.
    pub fn indices_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<NodeId>> {
        labels
            .iter()
            .map(|l| {
                self.index_of(l.as_ref())
                    .ok_or_else(|| Error::UnknownNode(l.as_ref().to_string()))
            })
            .collect()
    }

    /// Undirected edges `(a, b)` with `a < b`, sorted lexicographically.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(a, list)| list.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
    }

    /// Edge-list text that loads back into an equal graph. Isolated nodes are
    /// written as self-loop lines so that they survive the round trip.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (a, list) in self.adjacency.iter().enumerate() {
            if list.is_empty() {
                let _ = writeln!(out, "{} {}", self.labels[a], self.labels[a]);
            }
        }
        for (a, b) in self.edges() {
            let _ = writeln!(out, "{} {}", self.labels[a], self.labels[b]);
        }
        out
    }

    fn check(&self, node: NodeId) -> Result<()> {
        if node < self.n_nodes() {
            Ok(())
        } else {
            Err(Error::UnknownNode(format!("#{node}")))
        }
    }
}

/// Options for [`parse_edge_list`].
#[derive(Debug, Clone)]
pub struct EdgeListOptions {
    pub comment_prefix: String,
    /// `None` splits on any whitespace.
    pub delimiter: Option<char>,
}

impl Default for EdgeListOptions {
    fn default() -> Self {
        EdgeListOptions {
            comment_prefix: "#".into(),
            delimiter: None,
        }
    }
}

/// Parses a two-column edge list. Blank lines and comment lines are skipped.
pub fn parse_edge_list(text: &str, options: &EdgeListOptions) -> Result<(Graph, LoadReport)> {
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty()
            || (!options.comment_prefix.is_empty() && trimmed.starts_with(&options.comment_prefix))
        {
            continue;
        }
        let tokens: Vec<&str> = match options.delimiter {
            None => trimmed.split_whitespace().collect(),
            Some(d) => trimmed.split(d).map(str::trim).collect(),
        };
        if tokens.len() != 2 || tokens.iter().any(|t| t.is_empty()) {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("expected 2 node labels, found {}", tokens.len()),
            });
        }
        pairs.push((tokens[0], tokens[1]));
    }
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(Graph::from_labeled_edges(pairs))
}

/// Induced subgraph with its own dense indexing.
///
/// Local index `i` corresponds to parent node `nodes()[i]`; edges are listed
/// once each, sorted by local endpoint indices.
#[derive(Debug, Clone)]
pub struct Subgraph {
    nodes: Vec<NodeId>,
    lookup: Vec<(NodeId, usize)>,
    graph: Graph,
    edges: Vec<(usize, usize)>,
}

impl Subgraph {
    fn in_order(g: &Graph, order: Vec<NodeId>) -> Subgraph {
        let mut lookup: Vec<(NodeId, usize)> =
            order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        lookup.sort_unstable();
        let local = |v: NodeId| {
            lookup
                .binary_search_by_key(&v, |&(p, _)| p)
                .ok()
                .map(|i| lookup[i].1)
        };
        let labels: Vec<String> = order.iter().map(|&v| g.labels[v].clone()).collect();
        let index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        let mut adjacency = Vec::with_capacity(order.len());
        let mut twice = 0;
        for &v in &order {
            let mut list: Vec<usize> = g.adjacency[v].iter().filter_map(|&u| local(u)).collect();
            list.sort_unstable();
            twice += list.len();
            adjacency.push(list);
        }
        let graph = Graph {
            labels,
            index,
            adjacency,
            n_edges: twice / 2,
        };
        let edges = graph.edges().collect();
        Subgraph {
            nodes: order,
            lookup,
            graph,
            edges,
        }
    }

    /// Parent node ids by local index.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Indexed edges `e_m = (e_m1, e_m2)` in local indices.
    pub fn edge_list(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn parent(&self, local: usize) -> NodeId {
        self.nodes[local]
    }

    pub fn local(&self, parent: NodeId) -> Option<usize> {
        self.lookup
            .binary_search_by_key(&parent, |&(p, _)| p)
            .ok()
            .map(|i| self.lookup[i].1)
    }
}

fn sorted_members(g: &Graph, set: &[NodeId]) -> Result<Vec<NodeId>> {
    let mut out = set.to_vec();
    out.sort_unstable();
    out.dedup();
    for &v in &out {
        g.check(v)?;
    }
    Ok(out)
}

/// Subgraph induced by `keep`, ordered by parent index.
pub fn induced_subgraph(g: &Graph, keep: &[NodeId]) -> Result<Subgraph> {
    Ok(Subgraph::in_order(g, sorted_members(g, keep)?))
}

/// Uninfected nodes with at least one infected neighbor, sorted.
pub fn boundary_nodes(g: &Graph, infected: &[NodeId]) -> Result<Vec<NodeId>> {
    let infected = sorted_members(g, infected)?;
    let mut mask = vec![false; g.n_nodes()];
    for &v in &infected {
        mask[v] = true;
    }
    let mut boundary = vec![false; g.n_nodes()];
    for &v in &infected {
        for &u in g.neighbors(v) {
            if !mask[u] {
                boundary[u] = true;
            }
        }
    }
    Ok((0..g.n_nodes()).filter(|&v| boundary[v]).collect())
}

/// Infected nodes plus their uninfected boundary, with label-matrix row order:
/// infected nodes first in index order, then boundary nodes in index order.
#[derive(Debug, Clone)]
pub struct ExtendedNetwork {
    n_infected: usize,
    network: Subgraph,
    infected: Subgraph,
}

impl ExtendedNetwork {
    pub fn n_infected(&self) -> usize {
        self.n_infected
    }

    pub fn n_boundary(&self) -> usize {
        self.network.n_nodes() - self.n_infected
    }

    /// Number of rows `N_EI`.
    pub fn len(&self) -> usize {
        self.network.n_nodes()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_infected_row(&self, row: usize) -> bool {
        row < self.n_infected
    }

    pub fn infected(&self) -> &[NodeId] {
        &self.network.nodes()[..self.n_infected]
    }

    pub fn boundary(&self) -> &[NodeId] {
        &self.network.nodes()[self.n_infected..]
    }

    /// Parent node of a label-matrix row.
    pub fn node_at(&self, row: usize) -> NodeId {
        self.network.parent(row)
    }

    pub fn row_of(&self, node: NodeId) -> Option<usize> {
        self.network.local(node)
    }

    /// `G_EI` in row indices.
    pub fn graph(&self) -> &Graph {
        self.network.graph()
    }

    pub fn network(&self) -> &Subgraph {
        &self.network
    }

    /// `G_I`; its local indices coincide with the infected rows.
    pub fn infected_subnetwork(&self) -> &Subgraph {
        &self.infected
    }
}

/// Builds `G_EI` from an infection snapshot.
pub fn extended_network(g: &Graph, infected: &[NodeId]) -> Result<ExtendedNetwork> {
    let infected = sorted_members(g, infected)?;
    if infected.is_empty() {
        return Err(Error::EmptyInfection);
    }
    let boundary = boundary_nodes(g, &infected)?;
    let n_infected = infected.len();
    let infected_sub = Subgraph::in_order(g, infected.clone());
    let mut order = infected;
    order.extend(boundary);
    Ok(ExtendedNetwork {
        n_infected,
        network: Subgraph::in_order(g, order),
        infected: infected_sub,
    })
}

/// `D^{-1/2} W D^{-1/2}` in compressed sparse rows. Isolated nodes have
/// empty rows.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedAdjacency {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

pub fn normalized_adjacency(g: &Graph) -> NormalizedAdjacency {
    let inv_sqrt: Vec<f64> = (0..g.n_nodes())
        .map(|v| match g.degree(v) {
            0 => 0.0,
            d => 1.0 / libm::sqrt(d as f64),
        })
        .collect();
    let mut row_ptr = Vec::with_capacity(g.n_nodes() + 1);
    let mut cols = Vec::with_capacity(2 * g.n_edges());
    let mut vals = Vec::with_capacity(2 * g.n_edges());
    row_ptr.push(0);
    for v in 0..g.n_nodes() {
        for &u in g.neighbors(v) {
            cols.push(u);
            vals.push(inv_sqrt[v] * inv_sqrt[u]);
        }
        row_ptr.push(cols.len());
    }
    NormalizedAdjacency {
        row_ptr,
        cols,
        vals,
    }
}

impl NormalizedAdjacency {
    pub fn n(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[span.clone()].binary_search(&j) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => 0.0,
        }
    }

    /// `out = A x` for a row-major `n × cols` matrix `x`.
    pub fn apply(&self, x: &[f64], cols: usize, out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n() * cols);
        debug_assert_eq!(out.len(), x.len());
        for i in 0..self.n() {
            let dst = &mut out[i * cols..(i + 1) * cols];
            dst.fill(0.0);
            for (j, a) in self.row(i) {
                for (d, s) in dst.iter_mut().zip(&x[j * cols..(j + 1) * cols]) {
                    *d += a * s;
                }
            }
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        let mut dense = vec![vec![0.0; n]; n];
        for (i, row) in dense.iter_mut().enumerate() {
            for (j, a) in self.row(i) {
                row[j] = a;
            }
        }
        dense
    }
}

/// Summary statistics in the convention of the survey-network tables:
/// `avg_degree = 2M/N` and `density = M/(N(N-1))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphStats {
    pub n_nodes: usize,
    pub n_edges: usize,
    pub avg_degree: f64,
    pub density: f64,
}

pub fn stats(g: &Graph) -> Result<GraphStats> {
    stats_from_counts(g.n_nodes(), g.n_edges())
}

pub fn stats_from_counts(n_nodes: usize, n_edges: usize) -> Result<GraphStats> {
    if n_nodes < 2 {
        return Err(Error::DensityUndefined { nodes: n_nodes });
    }
    let (n, m) = (n_nodes as f64, n_edges as f64);
    Ok(GraphStats {
        n_nodes,
        n_edges,
        avg_degree: 2.0 * m / n,
        density: m / (n * (n - 1.0)),
    })
}
