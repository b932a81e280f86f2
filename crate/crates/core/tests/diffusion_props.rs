mod common;

use common::{arb_graph, bfs_distances};
use msd_core::diffusion::{select_seeds, simulate, simulate_observed, DiffusionConfig};
use msd_core::rng::stream;
use msd_core::Graph;
use proptest::prelude::*;

fn seeded(g: &Graph, k: usize, seed: u64) -> Option<Vec<usize>> {
    select_seeds(g, k, &mut stream(seed, &[0])).ok()
}

proptest! {
    #[test]
    fn spread_is_monotone_and_reachable(
        g in arb_graph(2..=60, 150),
        k in 1usize..4,
        p in 0.0f64..=1.0,
        target in 0.05f64..=1.0,
        seed in any::<u64>(),
    ) {
        let Some(seeds) = seeded(&g, k, seed) else { return Ok(()) };
        let cfg = DiffusionConfig { infection_prob: p, target_fraction: target, max_steps: None, seed };
        let mut previous: Vec<usize> = seeds.clone();
        let mut rounds = 0;
        let out = simulate_observed(&g, &seeds, &cfg, |round, order| {
            rounds = round;
            assert!(order.len() >= previous.len());
            assert_eq!(&order[..previous.len()], &previous[..]);
            previous = order.to_vec();
        })
        .unwrap();
        prop_assert_eq!(rounds, out.steps);
        for s in &out.seeds {
            prop_assert!(out.infected.binary_search(s).is_ok());
        }
        let mut allowed = vec![false; g.n_nodes()];
        for &v in &out.infected {
            allowed[v] = true;
        }
        let dist = bfs_distances(&g, &out.seeds, &allowed);
        for &v in &out.infected {
            prop_assert!(dist[v] <= out.steps);
        }
        let over = out.infected.len() as f64 / g.n_nodes() as f64 > target;
        prop_assert_eq!(out.hit_target, over);
    }

    #[test]
    fn fixed_seed_is_deterministic(g in arb_graph(2..=60, 150), seed in any::<u64>()) {
        let Some(seeds) = seeded(&g, 2, seed) else { return Ok(()) };
        prop_assert_eq!(seeded(&g, 2, seed), Some(seeds.clone()));
        let cfg = DiffusionConfig { infection_prob: 0.4, target_fraction: 0.5, max_steps: None, seed };
        prop_assert_eq!(simulate(&g, &seeds, &cfg).unwrap(), simulate(&g, &seeds, &cfg).unwrap());
    }

    #[test]
    fn certain_spread_fills_the_hop_ball(g in arb_graph(2..=60, 150), t in 1usize..6, seed in any::<u64>()) {
        let Some(seeds) = seeded(&g, 1, seed) else { return Ok(()) };
        let cfg = DiffusionConfig { infection_prob: 1.0, target_fraction: 1.0, max_steps: Some(t), seed };
        let out = simulate(&g, &seeds, &cfg).unwrap();
        let dist = bfs_distances(&g, &seeds, &vec![true; g.n_nodes()]);
        let ball: Vec<usize> = (0..g.n_nodes()).filter(|&v| dist[v] <= t).collect();
        prop_assert_eq!(out.infected, ball);
    }
}
