#![allow(dead_code)]

use msd_core::Graph;
use proptest::prelude::*;
use std::collections::VecDeque;

/// Random simple graph on `nodes` with up to `max_edges` raw pairs.
pub fn arb_graph(
    nodes: std::ops::RangeInclusive<usize>,
    max_edges: usize,
) -> impl Strategy<Value = Graph> {
    nodes.prop_flat_map(move |n| {
        prop::collection::vec((0..n, 0..n), 0..=max_edges)
            .prop_map(move |pairs| Graph::from_edges(n, &pairs))
    })
}

/// Graph plus a connected infected set grown by BFS from a non-isolated node.
pub fn arb_snapshot(
    nodes: std::ops::RangeInclusive<usize>,
    max_edges: usize,
) -> impl Strategy<Value = (Graph, Vec<usize>)> {
    (arb_graph(nodes, max_edges), any::<u64>(), 1usize..40).prop_filter_map(
        "graph has no edges",
        |(g, pick, size)| {
            let candidates: Vec<usize> = (0..g.n_nodes()).filter(|&v| g.degree(v) > 0).collect();
            if candidates.is_empty() {
                return None;
            }
            let start = candidates[(pick % candidates.len() as u64) as usize];
            let infected = bfs_prefix(&g, start, size);
            Some((g, infected))
        },
    )
}

/// First `size` nodes in BFS order from `start`, sorted.
pub fn bfs_prefix(g: &Graph, start: usize, size: usize) -> Vec<usize> {
    let mut seen = vec![false; g.n_nodes()];
    let mut out = Vec::new();
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(v) = queue.pop_front() {
        if out.len() == size {
            break;
        }
        out.push(v);
        for &u in g.neighbors(v) {
            if !seen[u] {
                seen[u] = true;
                queue.push_back(u);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Hop distances from `sources`, `usize::MAX` if unreachable, moving only
/// through nodes with `allowed[v]`.
pub fn bfs_distances(g: &Graph, sources: &[usize], allowed: &[bool]) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.n_nodes()];
    let mut queue = VecDeque::new();
    for &s in sources {
        dist[s] = 0;
        queue.push_back(s);
    }
    while let Some(v) = queue.pop_front() {
        for &u in g.neighbors(v) {
            if allowed[u] && dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Solves the dense system `a x = b` by Gaussian elimination with partial
/// pivoting.
#[allow(clippy::needless_range_loop)]
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}
