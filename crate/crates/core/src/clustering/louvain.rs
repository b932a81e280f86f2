//! Louvain modularity optimization (local moves, then aggregation).

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use super::{Assignment, Clusterer, NodeClusterAssignment};
use crate::error::{Error, Result};
use crate::graph::{Graph, Subgraph};
use crate::rng::StreamRng;

/// Minimum modularity gain for a move to be accepted.
const MIN_GAIN: f64 = 1e-9;
const MAX_PASSES: usize = 1000;

/// Newman-Girvan modularity of a node labeling.
pub fn modularity(g: &Graph, labels: &[usize]) -> f64 {
    let m = g.n_edges() as f64;
    if m == 0.0 {
        return 0.0;
    }
    let k = labels.iter().copied().max().map_or(0, |x| x + 1);
    let mut internal = vec![0.0; k];
    let mut degree = vec![0.0; k];
    for v in 0..g.n_nodes() {
        degree[labels[v]] += g.degree(v) as f64;
    }
    for (a, b) in g.edges() {
        if labels[a] == labels[b] {
            internal[labels[a]] += 1.0;
        }
    }
    internal
        .iter()
        .zip(&degree)
        .map(|(l, d)| l / m - (d / (2.0 * m)) * (d / (2.0 * m)))
        .sum()
}

/// Weighted graph at one aggregation level. `self_weight[i]` is the weight of
/// edges internal to super-node `i`.
struct Level {
    adjacency: Vec<Vec<(usize, f64)>>,
    self_weight: Vec<f64>,
}

impl Level {
    fn from_graph(g: &Graph) -> Self {
        Level {
            adjacency: (0..g.n_nodes())
                .map(|v| g.neighbors(v).iter().map(|&u| (u, 1.0)).collect())
                .collect(),
            self_weight: vec![0.0; g.n_nodes()],
        }
    }

    fn n(&self) -> usize {
        self.adjacency.len()
    }

    fn strength(&self, i: usize) -> f64 {
        self.adjacency[i].iter().map(|&(_, w)| w).sum::<f64>() + 2.0 * self.self_weight[i]
    }

    /// One round of local moves. Returns dense community ids and whether any
    /// node moved.
    fn local_moves<R: Rng + ?Sized>(&self, rng: &mut R) -> (Vec<usize>, bool) {
        let n = self.n();
        let strength: Vec<f64> = (0..n).map(|i| self.strength(i)).collect();
        let two_m: f64 = strength.iter().sum();
        let m = two_m / 2.0;
        let mut community: Vec<usize> = (0..n).collect();
        let mut total = strength.clone();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);

        let mut weight_to = vec![0.0; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut moved_any = false;
        for _ in 0..MAX_PASSES {
            let mut moved = false;
            for &i in &order {
                let own = community[i];
                total[own] -= strength[i];
                for &(j, w) in &self.adjacency[i] {
                    let c = community[j];
                    if weight_to[c] == 0.0 {
                        touched.push(c);
                    }
                    weight_to[c] += w;
                }
                let gain = |c: usize, w: f64| w - total[c] * strength[i] / two_m;
                let mut best = own;
                let mut best_gain = gain(own, weight_to[own]);
                for &c in &touched {
                    let g = gain(c, weight_to[c]);
                    if (g - best_gain) / m > MIN_GAIN {
                        best = c;
                        best_gain = g;
                    }
                }
                for &c in &touched {
                    weight_to[c] = 0.0;
                }
                touched.clear();
                total[best] += strength[i];
                if best != own {
                    community[i] = best;
                    moved = true;
                    moved_any = true;
                }
            }
            if !moved {
                break;
            }
        }

        let mut dense = vec![usize::MAX; n];
        let mut next = 0;
        for c in community.iter_mut() {
            if dense[*c] == usize::MAX {
                dense[*c] = next;
                next += 1;
            }
            *c = dense[*c];
        }
        (community, moved_any)
    }

    fn aggregate(&self, community: &[usize]) -> Level {
        let k = community.iter().copied().max().map_or(0, |c| c + 1);
        let mut self_weight = vec![0.0; k];
        let mut weights: Vec<Vec<(usize, f64)>> = vec![Vec::new(); k];
        for i in 0..self.n() {
            let ci = community[i];
            self_weight[ci] += self.self_weight[i];
            for &(j, w) in &self.adjacency[i] {
                let cj = community[j];
                if ci == cj {
                    // each internal edge is seen from both ends
                    self_weight[ci] += w / 2.0;
                } else {
                    weights[ci].push((cj, w));
                }
            }
        }
        for list in &mut weights {
            list.sort_by_key(|&(c, _)| c);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(list.len());
            for &(c, w) in list.iter() {
                match merged.last_mut() {
                    Some((last, acc)) if *last == c => *acc += w,
                    _ => merged.push((c, w)),
                }
            }
            *list = merged;
        }
        Level {
            adjacency: weights,
            self_weight,
        }
    }
}

/// Louvain communities of `g`; the visit order of each level is shuffled with
/// `rng`.
pub fn louvain<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> Result<NodeClusterAssignment> {
    if g.n_edges() == 0 {
        return Err(Error::EdgelessGraph);
    }
    let mut level = Level::from_graph(g);
    let mut node_community: Vec<usize> = (0..g.n_nodes()).collect();
    loop {
        let (community, moved) = level.local_moves(rng);
        if !moved {
            break;
        }
        for c in node_community.iter_mut() {
            *c = community[*c];
        }
        level = level.aggregate(&community);
    }
    Ok(NodeClusterAssignment::from_raw(
        &node_community,
        Louvain::NAME,
    ))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Louvain {
    pub seed: u64,
}

impl Louvain {
    pub const NAME: &'static str = "louvain";
}

impl Clusterer for Louvain {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn cluster(&self, infected: &Subgraph) -> Result<Assignment> {
        let mut rng = StreamRng::seed_from_u64(self.seed);
        louvain(infected.graph(), &mut rng).map(Assignment::Nodes)
    }
}
