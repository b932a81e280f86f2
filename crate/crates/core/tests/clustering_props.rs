mod common;

use std::collections::BTreeSet;

use common::arb_graph;
use msd_core::clustering::{
    leading_eigenvector, link_communities, link_dendrogram, louvain, membership, modularity,
    partition_density, Assignment,
};
use msd_core::graph::{induced_subgraph, Subgraph};
use msd_core::rng::stream;
use msd_core::{Error, Graph};
use proptest::prelude::*;

fn whole(g: &Graph) -> Subgraph {
    let all: Vec<usize> = (0..g.n_nodes()).collect();
    induced_subgraph(g, &all).unwrap()
}

/// Retained clusters as sets of edges, with node labels passed through `name`.
fn labeled_clusters(
    sub: &Subgraph,
    labels: &[usize],
    name: impl Fn(&str) -> String,
) -> BTreeSet<BTreeSet<(String, String)>> {
    let k = labels.iter().copied().max().unwrap_or(0);
    (1..=k)
        .map(|c| {
            sub.edge_list()
                .iter()
                .zip(labels)
                .filter(|&(_, &l)| l == c)
                .map(|(&(a, b), _)| {
                    let (x, y) = (name(sub.graph().label(a)), name(sub.graph().label(b)));
                    if x < y {
                        (x, y)
                    } else {
                        (y, x)
                    }
                })
                .collect()
        })
        .collect()
}

/// A graph and a copy whose nodes are renamed by `perm` and whose edges are
/// given in reverse order, optionally with flipped endpoints.
fn arb_relabeled() -> impl Strategy<Value = (Graph, Graph, Vec<usize>)> {
    arb_graph(3..=20, 50)
        .prop_filter("needs edges", |g| g.n_edges() > 0)
        .prop_flat_map(|g| {
            let n = g.n_nodes();
            (
                Just(g),
                Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
                any::<bool>(),
            )
        })
        .prop_map(|(g, perm, flip)| {
            let original = Graph::from_labeled_edges(
                g.edges().map(|(a, b)| (format!("v{a}"), format!("v{b}"))),
            )
            .0;
            let mut pairs: Vec<(String, String)> = g
                .edges()
                .map(|(a, b)| {
                    let (x, y) = (format!("v{}", perm[a]), format!("v{}", perm[b]));
                    if flip {
                        (y, x)
                    } else {
                        (x, y)
                    }
                })
                .collect();
            pairs.reverse();
            let relabeled = Graph::from_labeled_edges(pairs).0;
            (original, relabeled, perm)
        })
}

proptest! {
    #[test]
    fn best_cut_dominates_every_level(g in arb_graph(2..=25, 70)) {
        prop_assume!(g.n_edges() > 0);
        let sub = whole(&g);
        let d = link_dendrogram(&sub).unwrap();
        let best = d.best().density;
        for level in d.levels() {
            prop_assert!(level.density <= best + 1e-12);
        }
        prop_assert_eq!(d.levels().first().unwrap().n_clusters, g.n_edges());
        prop_assert!(d.levels().windows(2).all(|w| w[0].n_clusters >= w[1].n_clusters));
    }

    #[test]
    fn small_clusters_carry_no_density(g in arb_graph(2..=25, 70)) {
        prop_assume!(g.n_edges() > 0);
        let sub = whole(&g);
        let best = link_dendrogram(&sub).unwrap().best().density;
        match link_communities(&sub, 3) {
            Ok(a) => {
                prop_assert!((partition_density(&sub, &a) - best).abs() < 1e-9);
                prop_assert!(a.cluster_sizes().iter().all(|&s| s >= 3));
                prop_assert!(a.cluster_sizes().windows(2).all(|w| w[0] >= w[1]));
                prop_assert_eq!(a.cluster_sizes().iter().sum::<usize>() + a.noise_edges(), g.n_edges());
            }
            Err(Error::AllEdgesNoise) => prop_assert_eq!(best, 0.0),
            Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
        }
    }

    #[test]
    fn clusters_do_not_depend_on_input_order((a, b, perm) in arb_relabeled()) {
        let (sa, sb) = (whole(&a), whole(&b));
        let (ra, rb) = (link_communities(&sa, 1).unwrap(), link_communities(&sb, 1).unwrap());
        prop_assert_eq!(ra.k, rb.k);
        let unperm = |label: &str| {
            let p: usize = label[1..].parse().unwrap();
            format!("v{}", perm.iter().position(|&x| x == p).unwrap())
        };
        prop_assert_eq!(
            labeled_clusters(&sa, &ra.labels, str::to_string),
            labeled_clusters(&sb, &rb.labels, unperm)
        );
    }

    #[test]
    fn edge_membership_shape(g in arb_graph(2..=25, 70)) {
        prop_assume!(g.n_edges() > 0);
        let sub = whole(&g);
        let a = link_communities(&sub, 1).unwrap();
        let b = membership(&sub, &Assignment::Edges(a.clone())).unwrap();
        for c in 0..a.k {
            let members = (0..sub.n_nodes()).filter(|&v| b.get(v, c)).count();
            prop_assert!(members >= 2);
        }
        for v in 0..sub.n_nodes() {
            let touched: BTreeSet<usize> = sub
                .edge_list()
                .iter()
                .zip(&a.labels)
                .filter(|(&(x, y), _)| x == v || y == v)
                .map(|(_, &l)| l)
                .collect();
            prop_assert_eq!(b.row_sum(v), touched.len());
            prop_assert!(b.row_sum(v) <= sub.graph().degree(v));
        }
    }

    #[test]
    fn louvain_improves_on_singletons(g in arb_graph(2..=40, 120), seed in any::<u64>()) {
        prop_assume!(g.n_edges() > 0);
        let a = louvain(&g, &mut stream(seed, &[])).unwrap();
        let zero_based: Vec<usize> = a.labels.iter().map(|l| l - 1).collect();
        let singletons: Vec<usize> = (0..g.n_nodes()).collect();
        prop_assert!(modularity(&g, &zero_based) >= modularity(&g, &singletons) - 1e-12);
        let used: BTreeSet<usize> = a.labels.iter().copied().collect();
        prop_assert_eq!(used, (1..=a.k).collect::<BTreeSet<_>>());
        let b = membership(&whole(&g), &Assignment::Nodes(a)).unwrap();
        prop_assert!((0..g.n_nodes()).all(|v| b.row_sum(v) == 1));
    }

    #[test]
    fn eigen_split_never_loses_modularity(g in arb_graph(2..=30, 90)) {
        prop_assume!(g.n_edges() > 0);
        let a = leading_eigenvector(&g).unwrap();
        let zero_based: Vec<usize> = a.labels.iter().map(|l| l - 1).collect();
        prop_assert!(modularity(&g, &zero_based) >= -1e-12);
        // every community is connected
        for c in 1..=a.k {
            let nodes: Vec<usize> = (0..g.n_nodes()).filter(|&v| a.labels[v] == c).collect();
            let allowed: Vec<bool> = (0..g.n_nodes()).map(|v| a.labels[v] == c).collect();
            let dist = common::bfs_distances(&g, &nodes[..1], &allowed);
            prop_assert!(nodes.iter().all(|&v| dist[v] != usize::MAX));
        }
    }
}
