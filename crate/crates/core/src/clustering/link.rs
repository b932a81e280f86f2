//! Link communities: single-linkage clustering of edges under the Jaccard
//! similarity of the non-shared endpoints' inclusive neighborhoods, cut at
//! the level of maximum partition density.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{density_term, Assignment, Clusterer, EdgeClusterAssignment};
use crate::error::{Error, Result};
use crate::graph::{Graph, Subgraph};

/// Exact Jaccard ratio `shared / union`.
#[derive(Debug, Clone, Copy)]
pub struct Similarity {
    pub shared: u32,
    pub union: u32,
}

impl Similarity {
    pub fn value(self) -> f64 {
        self.shared as f64 / self.union as f64
    }
}

impl PartialEq for Similarity {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Similarity {}

impl PartialOrd for Similarity {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Similarity {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.shared as u64 * other.union as u64).cmp(&(other.shared as u64 * self.union as u64))
    }
}

/// `|n+(a) ∩ n+(b)| / |n+(a) ∪ n+(b)|` with `n+(x) = {x} ∪ adj(x)`.
fn inclusive_jaccard(g: &Graph, a: usize, b: usize) -> Similarity {
    let (na, nb) = (g.neighbors(a), g.neighbors(b));
    let (mut i, mut j, mut common) = (0, 0, 0u32);
    while i < na.len() && j < nb.len() {
        match na[i].cmp(&nb[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    // a ∈ n+(b) and b ∈ n+(a) exactly when a and b are adjacent
    if g.has_edge(a, b) {
        common += 2;
    }
    let union = (na.len() + 1 + nb.len() + 1) as u32 - common;
    Similarity {
        shared: common,
        union,
    }
}

fn keystone(e1: (usize, usize), e2: (usize, usize)) -> Option<(usize, usize)> {
    let (a1, b1) = e1;
    let (a2, b2) = e2;
    let shared = [a1 == a2, a1 == b2, b1 == a2, b1 == b2];
    match shared.iter().filter(|&&s| s).count() {
        1 => Some(if a1 == a2 {
            (b1, b2)
        } else if a1 == b2 {
            (b1, a2)
        } else if b1 == a2 {
            (a1, b2)
        } else {
            (a1, a2)
        }),
        _ => None,
    }
}

/// Similarity of two edges of `infected` that share exactly one endpoint.
pub fn edge_similarity(infected: &Subgraph, m1: usize, m2: usize) -> Result<f64> {
    let edges = infected.edge_list();
    if m1 == m2 || m1 >= edges.len() || m2 >= edges.len() {
        return Err(Error::NotAdjacentEdges(m1, m2));
    }
    let (a, b) = keystone(edges[m1], edges[m2]).ok_or(Error::NotAdjacentEdges(m1, m2))?;
    Ok(inclusive_jaccard(infected.graph(), a, b).value())
}

/// One cut of the dendrogram: the partition after merging every adjacent edge
/// pair with similarity at least `threshold`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkLevel {
    /// `None` for the all-singletons level.
    pub threshold: Option<Similarity>,
    pub n_clusters: usize,
    pub density: f64,
}

/// Single-linkage dendrogram over the edges of `G_I`.
#[derive(Debug, Clone)]
pub struct LinkDendrogram {
    n_edges: usize,
    /// Adjacent edge pairs by decreasing similarity, ties by edge indices.
    pairs: Vec<(Similarity, usize, usize)>,
    /// Pairs consumed when each level is reached.
    consumed: Vec<usize>,
    levels: Vec<LinkLevel>,
    best: usize,
}

const DENSITY_TIE: f64 = 1e-12;

struct Forest {
    parent: Vec<usize>,
    edges: Vec<usize>,
    nodes: Vec<Vec<usize>>,
}

impl Forest {
    fn new(edge_list: &[(usize, usize)]) -> Self {
        Forest {
            parent: (0..edge_list.len()).collect(),
            edges: vec![1; edge_list.len()],
            nodes: edge_list.iter().map(|&(u, v)| vec![u, v]).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the clusters of `a` and `b`; returns the change in the summed
    /// density terms, or `None` when already joined.
    fn union(&mut self, a: usize, b: usize) -> Option<f64> {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        // keep the smaller edge index as root
        let (root, child) = if ra < rb { (ra, rb) } else { (rb, ra) };
        let before = density_term(self.edges[root], self.nodes[root].len())
            + density_term(self.edges[child], self.nodes[child].len());
        let child_nodes = core::mem::take(&mut self.nodes[child]);
        let merged = merge_sorted(&self.nodes[root], &child_nodes);
        self.nodes[root] = merged;
        self.edges[root] += self.edges[child];
        self.parent[child] = root;
        let after = density_term(self.edges[root], self.nodes[root].len());
        Some(after - before)
    }
}

fn merge_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Builds the dendrogram and evaluates the partition density of every level.
pub fn link_dendrogram(infected: &Subgraph) -> Result<LinkDendrogram> {
    let edge_list = infected.edge_list();
    let m = edge_list.len();
    if m == 0 {
        return Err(Error::NoInfectedEdges);
    }
    let g = infected.graph();

    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); g.n_nodes()];
    for (idx, &(u, v)) in edge_list.iter().enumerate() {
        incident[u].push(idx);
        incident[v].push(idx);
    }
    let mut pairs = Vec::new();
    for (k, edges) in incident.iter().enumerate() {
        for (x, &e1) in edges.iter().enumerate() {
            for &e2 in &edges[x + 1..] {
                let other = |(u, v): (usize, usize)| if u == k { v } else { u };
                let sim = inclusive_jaccard(g, other(edge_list[e1]), other(edge_list[e2]));
                pairs.push((sim, e1.min(e2), e1.max(e2)));
            }
        }
    }
    pairs.sort_by(|x, y| y.0.cmp(&x.0).then((x.1, x.2).cmp(&(y.1, y.2))));

    let mut forest = Forest::new(edge_list);
    let mut levels = vec![LinkLevel {
        threshold: None,
        n_clusters: m,
        density: 0.0,
    }];
    let mut consumed = vec![0];
    let mut n_clusters = m;
    let mut sum = 0.0;
    let mut i = 0;
    while i < pairs.len() {
        let sim = pairs[i].0;
        while i < pairs.len() && pairs[i].0 == sim {
            if let Some(delta) = forest.union(pairs[i].1, pairs[i].2) {
                sum += delta;
                n_clusters -= 1;
            }
            i += 1;
        }
        levels.push(LinkLevel {
            threshold: Some(sim),
            n_clusters,
            density: 2.0 * sum / m as f64,
        });
        consumed.push(i);
    }

    let mut best = 0;
    for (idx, level) in levels.iter().enumerate().skip(1) {
        let top = levels[best];
        let better = level.density > top.density + DENSITY_TIE;
        let tie_fewer =
            (level.density - top.density).abs() <= DENSITY_TIE && level.n_clusters < top.n_clusters;
        if better || tie_fewer {
            best = idx;
        }
    }

    Ok(LinkDendrogram {
        n_edges: m,
        pairs,
        consumed,
        levels,
        best,
    })
}

impl LinkDendrogram {
    pub fn levels(&self) -> &[LinkLevel] {
        &self.levels
    }

    /// Index of the level with maximum partition density, ties resolved
    /// towards fewer clusters.
    pub fn best_level(&self) -> usize {
        self.best
    }

    pub fn best(&self) -> LinkLevel {
        self.levels[self.best]
    }

    /// Cluster id per edge at `level`: the smallest edge index in its cluster.
    pub fn partition(&self, level: usize) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.n_edges).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(_, a, b) in &self.pairs[..self.consumed[level]] {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        (0..self.n_edges).map(|e| find(&mut parent, e)).collect()
    }
}

/// Edge communities of `G_I` at the maximum-density cut. Clusters with fewer
/// than `min_cluster_size` edges become noise (label 0); the rest are
/// numbered `1..=k` by decreasing size, ties by smallest edge index.
pub fn link_communities(
    infected: &Subgraph,
    min_cluster_size: usize,
) -> Result<EdgeClusterAssignment> {
    let dendrogram = link_dendrogram(infected)?;
    let roots = dendrogram.partition(dendrogram.best_level());
    let m = roots.len();
    let mut size = vec![0usize; m];
    for &r in &roots {
        size[r] += 1;
    }
    let floor = min_cluster_size.max(1);
    let mut retained: Vec<usize> = (0..m)
        .filter(|&r| size[r] > 0 && size[r] >= floor)
        .collect();
    if retained.is_empty() {
        return Err(Error::AllEdgesNoise);
    }
    retained.sort_by(|&a, &b| size[b].cmp(&size[a]).then(a.cmp(&b)));
    let mut label_of_root = vec![0usize; m];
    for (k, &r) in retained.iter().enumerate() {
        label_of_root[r] = k + 1;
    }
    Ok(EdgeClusterAssignment {
        labels: roots.iter().map(|&r| label_of_root[r]).collect(),
        k: retained.len(),
        method: LinkCommunities::NAME,
    })
}

/// Default edge clusterer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinkCommunities {
    pub min_cluster_size: usize,
}

impl LinkCommunities {
    pub const NAME: &'static str = "link";
}

impl Default for LinkCommunities {
    fn default() -> Self {
        LinkCommunities {
            min_cluster_size: 3,
        }
    }
}

impl Clusterer for LinkCommunities {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn cluster(&self, infected: &Subgraph) -> Result<Assignment> {
        link_communities(infected, self.min_cluster_size).map(Assignment::Edges)
    }
}
