//! Degree-preserving null model and Z-scores.
//!
//! Control graphs come from double edge swaps: edges `(a,b)` and `(c,d)`
//! become `(a,d)` and `(c,b)` whenever that keeps the graph simple. Every
//! node keeps its degree exactly, so the degree sequence is the conserved
//! characteristic of the null class.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::census::{census, CensusError, GraphletCounts, PatternId};
use crate::graph::Graph;

/// Per-pattern mean and population standard deviation of induced counts
/// over null-model replicates.
#[derive(Debug, Clone, PartialEq)]
pub struct NullStats {
    pub mean: [f64; 8],
    pub std: [f64; 8],
    /// Number of replicates (T).
    pub replicates: usize,
    /// Attempted swaps per replicate (Q).
    pub swaps_per_replicate: usize,
}

impl NullStats {
    pub fn mean_of(&self, p: PatternId) -> f64 {
        self.mean[p.index()]
    }

    pub fn std_of(&self, p: PatternId) -> f64 {
        self.std[p.index()]
    }
}

/// Z-score vector in [`PatternId::ALL`] order. Finite by construction: the
/// σ = 0 cases are resolved by the capping policy in [`zscores`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZScores {
    pub z: [f64; 8],
}

/// Replicate count, swap budget and σ=0 cap for one labelling run.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NullConfig {
    /// Replicates (T). The reference protocol uses 500; the desk-scale
    /// profile uses 50.
    pub replicates: usize,
    /// Attempted swaps per replicate as a multiple of m.
    pub swaps_factor: usize,
    /// |z| assigned when σ = 0 but the observed count differs from the mean.
    pub cap: f64,
    pub base_seed: u64,
}

impl NullConfig {
    pub const DEFAULT_REPLICATES: usize = 500;
    pub const DESK_REPLICATES: usize = 50;
    pub const DEFAULT_SWAPS_FACTOR: usize = 10;
    pub const DEFAULT_CAP: f64 = 1e6;

    pub fn reference(base_seed: u64) -> Self {
        NullConfig {
            replicates: Self::DEFAULT_REPLICATES,
            swaps_factor: Self::DEFAULT_SWAPS_FACTOR,
            cap: Self::DEFAULT_CAP,
            base_seed,
        }
    }

    /// Small-T profile for desk-scale datasets and tests.
    pub fn desk(base_seed: u64) -> Self {
        NullConfig {
            replicates: Self::DESK_REPLICATES,
            ..Self::reference(base_seed)
        }
    }
}

/// Outcome of [`double_edge_swap`]: the randomized graph plus how many of
/// the attempted swaps were skipped to keep the graph simple.
#[derive(Debug, Clone)]
pub struct SwapOutcome {
    pub graph: Graph,
    pub skipped: usize,
}

/// Perform `q` attempted double edge swaps. Each attempt picks two distinct
/// edges uniformly, orients each end uniformly, and applies
/// `(a,b),(c,d) → (a,d),(c,b)` iff the result stays simple; otherwise the
/// attempt is skipped and counted. The degree sequence is preserved exactly.
pub fn double_edge_swap(g: &Graph, q: usize, rng_seed: u64) -> SwapOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut edges: Vec<(usize, usize)> = g.edges().collect();
    let mut skipped = 0usize;
    if edges.len() < 2 {
        return SwapOutcome {
            graph: g.clone(),
            skipped: q,
        };
    }
    let mut present: std::collections::HashSet<(usize, usize)> = edges.iter().copied().collect();

    for _ in 0..q {
        let i = rng.gen_range(0..edges.len());
        let mut j = rng.gen_range(0..edges.len() - 1);
        if j >= i {
            j += 1;
        }
        let (mut a, mut b) = edges[i];
        let (mut c, mut d) = edges[j];
        if rng.gen_bool(0.5) {
            std::mem::swap(&mut a, &mut b);
        }
        if rng.gen_bool(0.5) {
            std::mem::swap(&mut c, &mut d);
        }
        // proposed replacements: (a,d) and (c,b)
        if a == d || c == b {
            skipped += 1;
            continue;
        }
        let e1 = (a.min(d), a.max(d));
        let e2 = (c.min(b), c.max(b));
        if e1 == e2 || present.contains(&e1) || present.contains(&e2) {
            skipped += 1;
            continue;
        }
        present.remove(&edges[i]);
        present.remove(&edges[j]);
        present.insert(e1);
        present.insert(e2);
        edges[i] = e1;
        edges[j] = e2;
    }

    let graph = Graph::from_edges(&edges, Some(g.n())).expect("swaps preserve validity");
    SwapOutcome { graph, skipped }
}

/// Census statistics over `t` null replicates of `g`. Replicate `i` uses
/// seed `base_seed + i`, so the result is bit-deterministic for fixed
/// inputs no matter how the replicates are scheduled.
pub fn sample_null(
    g: &Graph,
    t: usize,
    q: usize,
    base_seed: u64,
) -> Result<NullStats, CensusError> {
    assert!(t >= 1, "at least one replicate required");
    let per_replicate: Vec<GraphletCounts> = (0..t)
        .into_par_iter()
        .map(|i| {
            let replica = double_edge_swap(g, q, base_seed.wrapping_add(i as u64)).graph;
            census(&replica)
        })
        .collect::<Result<_, _>>()?;

    let mut mean = [0.0f64; 8];
    for counts in &per_replicate {
        for (k, c) in counts.as_array().iter().enumerate() {
            mean[k] += *c as f64;
        }
    }
    for v in &mut mean {
        *v /= t as f64;
    }
    let mut var = [0.0f64; 8];
    for counts in &per_replicate {
        for (k, c) in counts.as_array().iter().enumerate() {
            let d = *c as f64 - mean[k];
            var[k] += d * d;
        }
    }
    let mut std = [0.0f64; 8];
    for k in 0..8 {
        std[k] = (var[k] / t as f64).sqrt(); // population std
    }
    Ok(NullStats {
        mean,
        std,
        replicates: t,
        swaps_per_replicate: q,
    })
}

/// Z-scores of observed counts against null statistics:
/// `z = (C − μ)/σ`, with the σ = 0 policy: `z = 0` when `C = μ`, otherwise
/// `z = sign(C − μ)·cap`.
pub fn zscores(counts: &GraphletCounts, stats: &NullStats, cap: f64) -> ZScores {
    assert!(cap > 0.0, "cap must be positive");
    let mut z = [0.0f64; 8];
    for (k, &c) in counts.as_array().iter().enumerate() {
        let diff = c as f64 - stats.mean[k];
        z[k] = if stats.std[k] > 0.0 {
            diff / stats.std[k]
        } else if diff == 0.0 {
            0.0
        } else {
            diff.signum() * cap
        };
    }
    ZScores { z }
}

/// Convenience composition used by labelling: census, null sampling and
/// Z-scores with `q = swaps_factor · m`.
pub fn zscores_for_graph(g: &Graph, cfg: &NullConfig) -> Result<(GraphletCounts, ZScores), CensusError> {
    let counts = census(g)?;
    let q = cfg.swaps_factor * g.m();
    let stats = sample_null(g, cfg.replicates, q, cfg.base_seed)?;
    Ok((counts, zscores(&counts, &stats, cfg.cap)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::PatternId;

    fn triangle() -> Graph {
        Graph::from_edges(&[(0, 1), (1, 2), (2, 0)], None).unwrap()
    }

    #[test]
    fn zero_swaps_is_identity() {
        let g = Graph::from_edges(&[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)], None).unwrap();
        let out = double_edge_swap(&g, 0, 1);
        assert_eq!(out.graph, g);
        assert_eq!(out.skipped, 0);
    }

    #[test]
    fn swaps_preserve_degree_sequence() {
        for seed in 0..10u64 {
            let g = Graph::from_edges(
                &[
                    (0, 1),
                    (1, 2),
                    (2, 3),
                    (3, 4),
                    (4, 0),
                    (0, 2),
                    (1, 3),
                    (2, 4),
                ],
                None,
            )
            .unwrap();
            let out = double_edge_swap(&g, 200, seed);
            assert_eq!(
                out.graph.degree_sequence(),
                g.degree_sequence(),
                "seed {seed}"
            );
            out.graph.validate().unwrap();
        }
    }

    #[test]
    fn triangle_is_a_fixed_point() {
        // degrees (2,2,2) on 3 nodes have a unique simple realization
        let out = double_edge_swap(&triangle(), 100, 9);
        assert_eq!(out.graph, triangle());
    }

    #[test]
    fn single_replicate_has_zero_std() {
        let g = Graph::from_edges(&[(0, 1), (1, 2), (2, 3)], None).unwrap();
        let stats = sample_null(&g, 1, 10, 3).unwrap();
        assert_eq!(stats.std, [0.0; 8]);
    }

    #[test]
    fn triangle_null_is_degenerate() {
        let stats = sample_null(&triangle(), 20, 30, 5).unwrap();
        assert_eq!(stats.mean_of(PatternId::Tri), 1.0);
        assert_eq!(stats.std_of(PatternId::Tri), 0.0);
    }

    #[test]
    fn sample_null_reproducible() {
        let g = Graph::from_edges(&[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)], None).unwrap();
        let a = sample_null(&g, 50, 10 * g.m(), 77).unwrap();
        let b = sample_null(&g, 50, 10 * g.m(), 77).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zscore_policy() {
        let mut counts = GraphletCounts::default();
        counts.set(PatternId::P3, 5);
        let stats = NullStats {
            mean: [5.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            std: [0.0; 8],
            replicates: 1,
            swaps_per_replicate: 0,
        };
        let z = zscores(&counts, &stats, 1e6);
        assert_eq!(z.z[0], 0.0); // C = mean

        let mut c2 = GraphletCounts::default();
        c2.set(PatternId::P3, 10);
        let z2 = zscores(&c2, &stats, 1e6);
        assert_eq!(z2.z[0], 1e6); // std=0, C=mean+5 -> cap

        let stats3 = NullStats {
            mean: [4.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            std: [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            replicates: 2,
            swaps_per_replicate: 0,
        };
        let z3 = zscores(&counts, &stats3, 1e6);
        assert_eq!(z3.z[0], 1.0); // C = mean + std
    }
}
