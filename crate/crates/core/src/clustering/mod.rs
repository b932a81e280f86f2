//! Community structure of the infected subnetwork.
//!
//! The detection pipeline accepts any [`Clusterer`]. Edge clusterers may give
//! a node several communities (mixed membership); node clusterers give each
//! node exactly one.

mod eigen;
mod link;
mod louvain;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

pub use eigen::{leading_eigenvector, symmetric_eigen, LeadingEigenvector};
pub use link::{
    edge_similarity, link_communities, link_dendrogram, LinkCommunities, LinkDendrogram, LinkLevel,
    Similarity,
};
pub use louvain::{louvain, modularity, Louvain};

use crate::error::{Error, Result};
use crate::graph::Subgraph;

/// Per-edge community labels: `0` is noise, retained clusters are `1..=k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeClusterAssignment {
    pub labels: Vec<usize>,
    pub k: usize,
    pub method: &'static str,
}

impl EdgeClusterAssignment {
    pub fn noise_edges(&self) -> usize {
        self.labels.iter().filter(|&&l| l == 0).count()
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            if l > 0 {
                sizes[l - 1] += 1;
            }
        }
        sizes
    }
}

/// Per-node community labels in `1..=k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeClusterAssignment {
    pub labels: Vec<usize>,
    pub k: usize,
    pub method: &'static str,
}

impl NodeClusterAssignment {
    /// Renumbers arbitrary community ids to `1..=k` in order of first
    /// appearance.
    pub(crate) fn from_raw(raw: &[usize], method: &'static str) -> Self {
        let mut map = vec![0usize; raw.iter().copied().max().map_or(0, |m| m + 1)];
        let mut k = 0;
        let labels = raw
            .iter()
            .map(|&c| {
                if map[c] == 0 {
                    k += 1;
                    map[c] = k;
                }
                map[c]
            })
            .collect();
        NodeClusterAssignment { labels, k, method }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Assignment {
    Edges(EdgeClusterAssignment),
    Nodes(NodeClusterAssignment),
}

impl Assignment {
    pub fn k(&self) -> usize {
        match self {
            Assignment::Edges(a) => a.k,
            Assignment::Nodes(a) => a.k,
        }
    }

    pub fn method(&self) -> &'static str {
        match self {
            Assignment::Edges(a) => a.method,
            Assignment::Nodes(a) => a.method,
        }
    }
}

/// Community detection on the infected subnetwork `G_I`.
pub trait Clusterer {
    fn name(&self) -> &'static str;
    fn cluster(&self, infected: &Subgraph) -> Result<Assignment>;
}

/// Binary node-by-community matrix `B`, `B[i][k] = 1` iff infected node `i`
/// belongs to community `k + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipMatrix {
    rows: usize,
    k: usize,
    data: Vec<bool>,
}

impl MembershipMatrix {
    pub fn new(rows: usize, k: usize) -> Self {
        MembershipMatrix {
            rows,
            k,
            data: vec![false; rows * k],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `cluster` is zero-based.
    pub fn get(&self, row: usize, cluster: usize) -> bool {
        self.data[row * self.k + cluster]
    }

    pub fn set(&mut self, row: usize, cluster: usize) {
        self.data[row * self.k + cluster] = true;
    }

    pub fn row(&self, row: usize) -> &[bool] {
        &self.data[row * self.k..(row + 1) * self.k]
    }

    pub fn row_sum(&self, row: usize) -> usize {
        self.row(row).iter().filter(|&&b| b).count()
    }

    /// Every infected node in a single community.
    pub fn single(rows: usize) -> Self {
        MembershipMatrix {
            rows,
            k: 1,
            data: vec![true; rows],
        }
    }
}

/// Node memberships induced by an assignment over `infected`'s nodes or edges.
/// Nodes touching only noise edges get an empty row.
pub fn membership(infected: &Subgraph, assignment: &Assignment) -> Result<MembershipMatrix> {
    match assignment {
        Assignment::Edges(a) => {
            if a.labels.len() != infected.n_edges() {
                return Err(Error::DimensionMismatch {
                    expected: infected.n_edges(),
                    found: a.labels.len(),
                });
            }
            let mut b = MembershipMatrix::new(infected.n_nodes(), a.k);
            for (&(u, v), &label) in infected.edge_list().iter().zip(&a.labels) {
                if label > a.k {
                    return Err(Error::InvalidParameter(format!(
                        "edge label {label} exceeds cluster count {}",
                        a.k
                    )));
                }
                if label > 0 {
                    b.set(u, label - 1);
                    b.set(v, label - 1);
                }
            }
            Ok(b)
        }
        Assignment::Nodes(a) => {
            if a.labels.len() != infected.n_nodes() {
                return Err(Error::DimensionMismatch {
                    expected: infected.n_nodes(),
                    found: a.labels.len(),
                });
            }
            let mut b = MembershipMatrix::new(infected.n_nodes(), a.k);
            for (i, &label) in a.labels.iter().enumerate() {
                if label == 0 || label > a.k {
                    return Err(Error::InvalidParameter(format!(
                        "node label {label} outside 1..={}",
                        a.k
                    )));
                }
                b.set(i, label - 1);
            }
            Ok(b)
        }
    }
}

/// Contribution of one edge cluster with `m` edges over `n` nodes.
pub(crate) fn density_term(m: usize, n: usize) -> f64 {
    if n <= 2 {
        return 0.0;
    }
    let (m, n) = (m as f64, n as f64);
    m * (m - (n - 1.0)) / ((n - 2.0) * (n - 1.0))
}

/// Partition density of the retained clusters of an edge assignment; noise
/// edges and clusters spanning two nodes contribute nothing.
pub fn partition_density(infected: &Subgraph, assignment: &EdgeClusterAssignment) -> f64 {
    let total = infected.n_edges();
    if total == 0 {
        return 0.0;
    }
    let mut nodes: Vec<Vec<usize>> = vec![Vec::new(); assignment.k];
    let mut edges = vec![0usize; assignment.k];
    for (&(u, v), &label) in infected.edge_list().iter().zip(&assignment.labels) {
        if label > 0 {
            edges[label - 1] += 1;
            nodes[label - 1].push(u);
            nodes[label - 1].push(v);
        }
    }
    let sum: f64 = nodes
        .iter_mut()
        .zip(&edges)
        .map(|(ns, &m)| {
            ns.sort_unstable();
            ns.dedup();
            density_term(m, ns.len())
        })
        .sum();
    2.0 * sum / total as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{induced_subgraph, Graph};

    fn whole(g: &Graph) -> Subgraph {
        let all: Vec<usize> = (0..g.n_nodes()).collect();
        induced_subgraph(g, &all).unwrap()
    }

    #[test]
    fn node_membership_is_one_hot() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]);
        let sub = whole(&g);
        let a = Assignment::Nodes(NodeClusterAssignment {
            labels: vec![1, 1, 2],
            k: 2,
            method: "test",
        });
        let b = membership(&sub, &a).unwrap();
        for i in 0..3 {
            assert_eq!(b.row_sum(i), 1);
        }
        assert!(b.get(2, 1));
    }

    #[test]
    fn edge_membership_mixes() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]);
        let sub = whole(&g);
        let a = Assignment::Edges(EdgeClusterAssignment {
            labels: vec![1, 2],
            k: 2,
            method: "test",
        });
        let b = membership(&sub, &a).unwrap();
        assert_eq!(b.row(1), &[true, true]);
        assert_eq!(b.row(0), &[true, false]);
    }

    #[test]
    fn noise_only_node_has_empty_row() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
        let sub = whole(&g);
        let a = Assignment::Edges(EdgeClusterAssignment {
            labels: vec![1, 1, 0],
            k: 1,
            method: "test",
        });
        let b = membership(&sub, &a).unwrap();
        assert_eq!(b.row_sum(3), 0);
        assert_eq!(b.row_sum(2), 1);
    }

    #[test]
    fn membership_dimension_mismatch() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]);
        let a = Assignment::Edges(EdgeClusterAssignment {
            labels: vec![1],
            k: 1,
            method: "test",
        });
        assert!(matches!(
            membership(&whole(&g), &a),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 1
            })
        ));
    }

    #[test]
    fn partition_density_cases() {
        let tri = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]);
        let one = EdgeClusterAssignment {
            labels: vec![1, 1, 1],
            k: 1,
            method: "test",
        };
        assert!((partition_density(&whole(&tri), &one) - 1.0).abs() < 1e-15);

        let singles = EdgeClusterAssignment {
            labels: vec![1, 2, 3],
            k: 3,
            method: "test",
        };
        assert_eq!(partition_density(&whole(&tri), &singles), 0.0);

        let two = Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        let sub = whole(&two);
        // edge order: (0,1),(0,2),(1,2),(3,4),(3,5),(4,5)
        let split = EdgeClusterAssignment {
            labels: vec![1, 1, 1, 2, 2, 2],
            k: 2,
            method: "test",
        };
        assert!((partition_density(&sub, &split) - 1.0).abs() < 1e-15);
    }
}
