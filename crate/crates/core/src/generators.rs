//! Small graph constructors for tests, examples and synthetic experiments.
//! Nodes are labeled by index.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::graph::{Graph, NodeId};

/// Star with center `0` and leaves `1..=leaves`.
pub fn star(leaves: usize) -> Graph {
    let edges: Vec<_> = (1..=leaves).map(|l| (0, l)).collect();
    Graph::from_edges(leaves + 1, &edges)
}

/// `rows × cols` lattice; node `r * cols + c`.
pub fn grid(rows: usize, cols: usize) -> Graph {
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                edges.push((v, v + 1));
            }
            if r + 1 < rows {
                edges.push((v, v + cols));
            }
        }
    }
    Graph::from_edges(rows * cols, &edges)
}

pub fn complete(n: usize) -> Graph {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            edges.push((a, b));
        }
    }
    Graph::from_edges(n, &edges)
}

/// Two `size`-cliques, nodes `0..size` and `size..2*size`, joined by the edge
/// `(size - 1, size)`.
pub fn clique_pair(size: usize) -> Graph {
    let mut edges = Vec::new();
    for offset in [0, size] {
        for a in 0..size {
            for b in a + 1..size {
                edges.push((offset + a, offset + b));
            }
        }
    }
    edges.push((size - 1, size));
    Graph::from_edges(2 * size, &edges)
}

pub fn erdos_renyi<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(p) {
                edges.push((a, b));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

/// Parameters of [`friendship_network`].
#[derive(Debug, Clone, Copy)]
pub struct FriendshipParams {
    pub nodes: usize,
    /// Number of equally sized groups (grades, classes).
    pub groups: usize,
    pub avg_degree: f64,
    /// Share of non-closure ties drawn inside a group.
    pub within_group: f64,
    /// Share of ties created by closing an open triad.
    pub closure: f64,
}

impl Default for FriendshipParams {
    fn default() -> Self {
        FriendshipParams {
            nodes: 1000,
            groups: 6,
            avg_degree: 10.0,
            within_group: 0.8,
            closure: 0.3,
        }
    }
}

/// School-style friendship graph: group-assortative random ties plus triadic
/// closure, grown until `avg_degree * nodes / 2` edges exist.
pub fn friendship_network<R: Rng + ?Sized>(params: &FriendshipParams, rng: &mut R) -> Graph {
    let n = params.nodes;
    let groups = params.groups.max(1);
    let target = libm::round(params.avg_degree * n as f64 / 2.0) as usize;
    let max_edges = n * n.saturating_sub(1) / 2;
    let target = target.min(max_edges);
    let group_of = |v: NodeId| v * groups / n;
    let group_span = |g: usize| (g * n).div_ceil(groups)..((g + 1) * n).div_ceil(groups);

    let mut adjacency: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    let mut edges: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
    while edges.len() < target {
        let (a, b) = if rng.random_bool(params.closure) {
            let v = rng.random_range(0..n);
            if adjacency[v].len() < 2 {
                continue;
            }
            let i = rng.random_range(0..adjacency[v].len());
            let j = rng.random_range(0..adjacency[v].len());
            (adjacency[v][i], adjacency[v][j])
        } else if rng.random_bool(params.within_group) {
            let a = rng.random_range(0..n);
            let span = group_span(group_of(a));
            (a, rng.random_range(span))
        } else {
            (rng.random_range(0..n), rng.random_range(0..n))
        };
        if a == b {
            continue;
        }
        let key = (a.min(b), a.max(b));
        if edges.insert(key) {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
    }
    let edges: Vec<_> = edges.into_iter().collect();
    Graph::from_edges(n, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn shapes() {
        assert_eq!(star(4).n_edges(), 4);
        assert_eq!(grid(3, 4).n_edges(), 3 * 3 + 2 * 4);
        assert_eq!(complete(5).n_edges(), 10);
        assert_eq!(clique_pair(5).n_edges(), 21);
    }

    #[test]
    fn friendship_hits_edge_target() {
        let g = friendship_network(&FriendshipParams::default(), &mut stream(5, &[]));
        assert_eq!(g.n_nodes(), 1000);
        assert_eq!(g.n_edges(), 5000);
    }
}
