//! Discrete-time susceptible-infected spread from a set of seeds.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::rng::StreamRng;
use rand::SeedableRng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionConfig {
    /// Per-contact, per-round infection probability.
    pub infection_prob: f64,
    /// Stop once the infected share strictly exceeds this fraction.
    pub target_fraction: f64,
    /// Round cap; `None` means `10 * N`.
    pub max_steps: Option<usize>,
    pub seed: u64,
}

impl Default for DiffusionConfig {
    fn default() -> Self {
        DiffusionConfig {
            infection_prob: 0.2,
            target_fraction: 0.10,
            max_steps: None,
            seed: 0,
        }
    }
}

impl DiffusionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.infection_prob) {
            return Err(Error::InvalidParameter(format!(
                "infection_prob {} outside [0, 1]",
                self.infection_prob
            )));
        }
        if !(self.target_fraction > 0.0 && self.target_fraction <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "target_fraction {} outside (0, 1]",
                self.target_fraction
            )));
        }
        if self.max_steps == Some(0) {
            return Err(Error::InvalidParameter(
                "max_steps must be at least 1".into(),
            ));
        }
        Ok(())
    }

    fn step_cap(&self, n: usize) -> usize {
        self.max_steps.unwrap_or(10 * n).max(1)
    }
}

/// Result of one simulated spread.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfectionOutcome {
    /// True sources, sorted.
    pub seeds: Vec<NodeId>,
    /// Infected nodes, sorted.
    pub infected: Vec<NodeId>,
    /// Rounds executed.
    pub steps: usize,
    /// Whether the infected share exceeded the target fraction.
    pub hit_target: bool,
}

/// Samples `k` distinct non-isolated nodes uniformly without replacement.
/// The result is sorted.
pub fn select_seeds<R: Rng + ?Sized>(g: &Graph, k: usize, rng: &mut R) -> Result<Vec<NodeId>> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "seed count must be at least 1".into(),
        ));
    }
    let candidates: Vec<NodeId> = (0..g.n_nodes()).filter(|&v| g.degree(v) > 0).collect();
    if k > candidates.len() {
        return Err(Error::NotEnoughCandidates {
            requested: k,
            available: candidates.len(),
        });
    }
    let mut seeds: Vec<NodeId> = index::sample(rng, candidates.len(), k)
        .into_iter()
        .map(|i| candidates[i])
        .collect();
    seeds.sort_unstable();
    Ok(seeds)
}

/// Runs the spread with the generator seeded from `cfg.seed`.
pub fn simulate(g: &Graph, seeds: &[NodeId], cfg: &DiffusionConfig) -> Result<InfectionOutcome> {
    simulate_observed(g, seeds, cfg, |_, _| {})
}

/// Like [`simulate`], calling `observe(round, infected_in_order)` after every
/// round. Infected nodes are listed in order of infection.
pub fn simulate_observed<F>(
    g: &Graph,
    seeds: &[NodeId],
    cfg: &DiffusionConfig,
    mut observe: F,
) -> Result<InfectionOutcome>
where
    F: FnMut(usize, &[NodeId]),
{
    cfg.validate()?;
    if seeds.is_empty() {
        return Err(Error::InvalidParameter("seed set is empty".into()));
    }
    let n = g.n_nodes();
    let mut seeds = seeds.to_vec();
    seeds.sort_unstable();
    seeds.dedup();
    if let Some(&bad) = seeds.iter().find(|&&s| s >= n) {
        return Err(Error::UnknownNode(format!("#{bad}")));
    }

    let mut rng = StreamRng::seed_from_u64(cfg.seed);
    let mut infected = vec![false; n];
    let mut order: Vec<NodeId> = seeds.clone();
    for &s in &seeds {
        infected[s] = true;
    }

    let over_target = |count: usize| count as f64 / n as f64 > cfg.target_fraction;
    let cap = cfg.step_cap(n);
    let mut steps = 0;
    let mut hit_target = over_target(order.len());
    let mut newly = Vec::new();
    while !hit_target && steps < cap {
        let mut exposed = false;
        for &v in &order {
            for &u in g.neighbors(v) {
                if !infected[u] {
                    exposed = true;
                    if rng.random_bool(cfg.infection_prob) {
                        infected[u] = true;
                        newly.push(u);
                    }
                }
            }
        }
        // trials above only look at nodes infected before this round
        if !exposed {
            break;
        }
        steps += 1;
        order.append(&mut newly);
        observe(steps, &order);
        if over_target(order.len()) {
            hit_target = true;
            break;
        }
    }

    let mut infected_sorted = order;
    infected_sorted.sort_unstable();
    Ok(InfectionOutcome {
        seeds,
        infected: infected_sorted,
        steps,
        hit_target,
    })
}
