//! Property tests for the structural invariants: graph canonicalization,
//! round-trips, census–oracle equality, conservation, degree preservation,
//! and profile normalization.

use proptest::prelude::*;

use motifsp::census::{census, check_conservation, oracle_census};
use motifsp::graph::Graph;
use motifsp::nullmodel::{double_edge_swap, zscores_for_graph, NullConfig, ZScores};
use motifsp::sp::normalize;

/// Arbitrary edge list over up to `max_n` nodes; may contain self-loops
/// and duplicates on purpose.
fn raw_edges(max_n: usize) -> impl Strategy<Value = Vec<(usize, usize)>> {
    prop::collection::vec((0..max_n, 0..max_n), 0..80)
}

proptest! {
    #[test]
    fn construction_always_canonical(edges in raw_edges(20)) {
        let g = Graph::from_edges(&edges, None).unwrap();
        prop_assert!(g.validate().is_ok());
    }

    #[test]
    fn edge_list_round_trip(edges in raw_edges(24)) {
        let g = Graph::from_edges(&edges, None).unwrap();
        let mut text = Vec::new();
        g.write_edge_list(&mut text).unwrap();
        let back = Graph::read_edge_list(text.as_slice()).unwrap();
        // identity holds whenever the last node has an edge; reading an
        // edge list cannot see trailing isolated nodes
        if g.n() == 0 || g.degree(g.n() - 1) > 0 {
            prop_assert_eq!(g, back);
        } else {
            prop_assert!(back.n() <= g.n());
            let mut again = Vec::new();
            back.write_edge_list(&mut again).unwrap();
            prop_assert_eq!(text, again);
        }
    }

    #[test]
    fn rewiring_keeps_graphs_simple(edges in raw_edges(16), p in 0.0f64..=1.0, seed in 0u64..1000) {
        let g = Graph::from_edges(&edges, Some(16)).unwrap();
        let rewired = g.rewire_fraction(p, seed).unwrap();
        prop_assert!(rewired.validate().is_ok());
        prop_assert!(rewired.m() <= g.m());
        prop_assert_eq!(rewired.n(), g.n());
    }

    #[test]
    fn fast_census_equals_oracle(edges in raw_edges(18)) {
        let g = Graph::from_edges(&edges, None).unwrap();
        prop_assert_eq!(census(&g).unwrap(), oracle_census(&g));
        prop_assert!(check_conservation(&g).unwrap());
    }

    #[test]
    fn swaps_preserve_degrees(edges in raw_edges(14), q in 0usize..200, seed in 0u64..500) {
        let g = Graph::from_edges(&edges, Some(14)).unwrap();
        let out = double_edge_swap(&g, q, seed);
        prop_assert_eq!(out.graph.degree_sequence(), g.degree_sequence());
        prop_assert!(out.graph.validate().is_ok());
    }

    #[test]
    fn normalization_is_scale_invariant(
        z in prop::array::uniform8(-50.0f64..50.0),
        lambda in 0.001f64..100.0,
    ) {
        let base = normalize(&ZScores { z });
        let scaled = normalize(&ZScores { z: z.map(|v| v * lambda) });
        for k in 0..8 {
            prop_assert!((base.s[k] - scaled.s[k]).abs() < 1e-9);
        }
        prop_assert!(base.check_invariants(1e-9));
    }
}

/// Erdős–Rényi graphs are typical members of their own null class, so
/// their Z-scores should hover around zero on average.
#[test]
fn er_zscores_center_near_zero() {
    use motifsp::generators::{generate, GeneratorFamily, GeneratorSpec, Params};

    let draws = 50;
    let mut sums = [0.0f64; 8];
    for i in 0..draws {
        let mut params = Params::new();
        params.set_int("n", 24);
        params.set_real("p", 0.18);
        let spec = GeneratorSpec {
            family: GeneratorFamily::ErdosRenyi,
            params,
            seed: 9000 + i,
        };
        let g = generate(&spec).unwrap();
        let cfg = NullConfig {
            replicates: 40,
            swaps_factor: 10,
            cap: 1e6,
            base_seed: 100 + i,
        };
        let (_counts, z) = zscores_for_graph(&g, &cfg).unwrap();
        for k in 0..8 {
            sums[k] += z.z[k];
        }
    }
    for (k, sum) in sums.iter().enumerate() {
        let mean = sum / draws as f64;
        assert!(
            mean.abs() < 0.5,
            "pattern {k}: mean z over {draws} ER draws is {mean}"
        );
    }
}
