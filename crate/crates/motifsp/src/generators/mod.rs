//! The 23 synthetic graph generators behind a uniform registry.
//!
//! Eleven families are non-deterministic (the graph depends on the seed),
//! twelve are deterministic constructions that may be perturbed by the
//! single-edge rewiring procedure (`rewire_p`, 0.25 in sampled specs) to
//! introduce variability while keeping their structure recognizable.
//!
//! [`sample_spec`] draws in-regime parameters for a family — the regimes
//! mirror how the training corpus is laid out (Erdős–Rényi phases,
//! small-world rewiring ranges, duplication-divergence self-averaging
//! regimes, and so on). [`generate`] is bit-deterministic for a fixed spec.

mod deterministic;
mod nondeterministic;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError};

#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error("{family}: missing parameter `{key}`")]
    MissingParam { family: String, key: String },
    #[error("{family}: bad parameter `{key}`: {msg}")]
    BadParam {
        family: String,
        key: String,
        msg: String,
    },
    #[error("{family}: {msg}")]
    InvalidCombination { family: String, msg: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// The 23 generator families. Canonical order: the 11 non-deterministic
/// families first, then the 12 deterministic ones.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorFamily {
    ErdosRenyi,
    WattsStrogatz,
    NewmanWattsStrogatz,
    ExtendedBarabasiAlbert,
    PowerlawCluster,
    DuplicationDivergence,
    GaussianPartition,
    ForestFire,
    RandomGeometric,
    Geometric3dDd,
    RandomRegular,
    BalancedTree,
    BinomialTree,
    FullRaryTree,
    CircularLadder,
    ChordalCycle,
    Barbell,
    Lollipop,
    Dgm,
    SquareLattice,
    HexagonalLattice,
    TriangularLattice,
    Star,
}

impl GeneratorFamily {
    pub const ALL: [GeneratorFamily; 23] = [
        GeneratorFamily::ErdosRenyi,
        GeneratorFamily::WattsStrogatz,
        GeneratorFamily::NewmanWattsStrogatz,
        GeneratorFamily::ExtendedBarabasiAlbert,
        GeneratorFamily::PowerlawCluster,
        GeneratorFamily::DuplicationDivergence,
        GeneratorFamily::GaussianPartition,
        GeneratorFamily::ForestFire,
        GeneratorFamily::RandomGeometric,
        GeneratorFamily::Geometric3dDd,
        GeneratorFamily::RandomRegular,
        GeneratorFamily::BalancedTree,
        GeneratorFamily::BinomialTree,
        GeneratorFamily::FullRaryTree,
        GeneratorFamily::CircularLadder,
        GeneratorFamily::ChordalCycle,
        GeneratorFamily::Barbell,
        GeneratorFamily::Lollipop,
        GeneratorFamily::Dgm,
        GeneratorFamily::SquareLattice,
        GeneratorFamily::HexagonalLattice,
        GeneratorFamily::TriangularLattice,
        GeneratorFamily::Star,
    ];

    pub const NONDETERMINISTIC: [GeneratorFamily; 11] = [
        GeneratorFamily::ErdosRenyi,
        GeneratorFamily::WattsStrogatz,
        GeneratorFamily::NewmanWattsStrogatz,
        GeneratorFamily::ExtendedBarabasiAlbert,
        GeneratorFamily::PowerlawCluster,
        GeneratorFamily::DuplicationDivergence,
        GeneratorFamily::GaussianPartition,
        GeneratorFamily::ForestFire,
        GeneratorFamily::RandomGeometric,
        GeneratorFamily::Geometric3dDd,
        GeneratorFamily::RandomRegular,
    ];

    pub const DETERMINISTIC: [GeneratorFamily; 12] = [
        GeneratorFamily::BalancedTree,
        GeneratorFamily::BinomialTree,
        GeneratorFamily::FullRaryTree,
        GeneratorFamily::CircularLadder,
        GeneratorFamily::ChordalCycle,
        GeneratorFamily::Barbell,
        GeneratorFamily::Lollipop,
        GeneratorFamily::Dgm,
        GeneratorFamily::SquareLattice,
        GeneratorFamily::HexagonalLattice,
        GeneratorFamily::TriangularLattice,
        GeneratorFamily::Star,
    ];

    pub fn is_deterministic(self) -> bool {
        GeneratorFamily::DETERMINISTIC.contains(&self)
    }

    pub fn name(self) -> &'static str {
        match self {
            GeneratorFamily::ErdosRenyi => "erdos_renyi",
            GeneratorFamily::WattsStrogatz => "watts_strogatz",
            GeneratorFamily::NewmanWattsStrogatz => "newman_watts_strogatz",
            GeneratorFamily::ExtendedBarabasiAlbert => "extended_barabasi_albert",
            GeneratorFamily::PowerlawCluster => "powerlaw_cluster",
            GeneratorFamily::DuplicationDivergence => "duplication_divergence",
            GeneratorFamily::GaussianPartition => "gaussian_partition",
            GeneratorFamily::ForestFire => "forest_fire",
            GeneratorFamily::RandomGeometric => "random_geometric",
            GeneratorFamily::Geometric3dDd => "geometric_3d_dd",
            GeneratorFamily::RandomRegular => "random_regular",
            GeneratorFamily::BalancedTree => "balanced_tree",
            GeneratorFamily::BinomialTree => "binomial_tree",
            GeneratorFamily::FullRaryTree => "full_rary_tree",
            GeneratorFamily::CircularLadder => "circular_ladder",
            GeneratorFamily::ChordalCycle => "chordal_cycle",
            GeneratorFamily::Barbell => "barbell",
            GeneratorFamily::Lollipop => "lollipop",
            GeneratorFamily::Dgm => "dgm",
            GeneratorFamily::SquareLattice => "square_lattice",
            GeneratorFamily::HexagonalLattice => "hexagonal_lattice",
            GeneratorFamily::TriangularLattice => "triangular_lattice",
            GeneratorFamily::Star => "star",
        }
    }
}

impl std::fmt::Display for GeneratorFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for GeneratorFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GeneratorFamily::ALL
            .iter()
            .copied()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown generator family `{s}`"))
    }
}

/// A single named parameter value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Flag(bool),
    Int(i64),
    Real(f64),
}

/// Named parameters of a generator spec, ordered for stable serialization.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Params(pub BTreeMap<String, ParamValue>);

impl Params {
    pub fn new() -> Self {
        Params(BTreeMap::new())
    }

    pub fn set_int(&mut self, key: &str, v: i64) -> &mut Self {
        self.0.insert(key.to_string(), ParamValue::Int(v));
        self
    }

    pub fn set_real(&mut self, key: &str, v: f64) -> &mut Self {
        self.0.insert(key.to_string(), ParamValue::Real(v));
        self
    }

    pub fn set_flag(&mut self, key: &str, v: bool) -> &mut Self {
        self.0.insert(key.to_string(), ParamValue::Flag(v));
        self
    }

    fn fetch(&self, family: GeneratorFamily, key: &str) -> Result<&ParamValue, GeneratorError> {
        self.0.get(key).ok_or_else(|| GeneratorError::MissingParam {
            family: family.name().to_string(),
            key: key.to_string(),
        })
    }

    pub fn usize(&self, family: GeneratorFamily, key: &str) -> Result<usize, GeneratorError> {
        match self.fetch(family, key)? {
            ParamValue::Int(v) if *v >= 0 => Ok(*v as usize),
            other => Err(GeneratorError::BadParam {
                family: family.name().to_string(),
                key: key.to_string(),
                msg: format!("expected non-negative integer, got {other:?}"),
            }),
        }
    }

    pub fn real(&self, family: GeneratorFamily, key: &str) -> Result<f64, GeneratorError> {
        match self.fetch(family, key)? {
            ParamValue::Real(v) => Ok(*v),
            ParamValue::Int(v) => Ok(*v as f64),
            other => Err(GeneratorError::BadParam {
                family: family.name().to_string(),
                key: key.to_string(),
                msg: format!("expected real, got {other:?}"),
            }),
        }
    }

    pub fn real_opt(&self, key: &str) -> Option<f64> {
        match self.0.get(key) {
            Some(ParamValue::Real(v)) => Some(*v),
            Some(ParamValue::Int(v)) => Some(*v as f64),
            _ => None,
        }
    }

    pub fn flag_or(&self, key: &str, default: bool) -> bool {
        match self.0.get(key) {
            Some(ParamValue::Flag(v)) => *v,
            _ => default,
        }
    }
}

/// Rewire fraction applied to deterministic families by sampled specs.
pub const DETERMINISTIC_REWIRE_P: f64 = 0.25;

/// Everything needed to reproduce one generated graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub family: GeneratorFamily,
    pub params: Params,
    pub seed: u64,
}

/// Node-count range that parameter sampling aims for. The reference desk
/// profile is 50..=2000; tests shrink it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizeProfile {
    pub n_min: usize,
    pub n_max: usize,
}

impl Default for SizeProfile {
    fn default() -> Self {
        SizeProfile {
            n_min: 50,
            n_max: 2000,
        }
    }
}

impl SizeProfile {
    pub fn new(n_min: usize, n_max: usize) -> Self {
        assert!(n_min >= 3 && n_min <= n_max);
        SizeProfile { n_min, n_max }
    }

    fn sample_n(&self, rng: &mut ChaCha8Rng) -> usize {
        rng.gen_range(self.n_min..=self.n_max)
    }
}

/// Generate the graph a spec describes. Bit-identical output for identical
/// specs. Deterministic families honour the optional `rewire_p` parameter.
pub fn generate(spec: &GeneratorSpec) -> Result<Graph, GeneratorError> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let fam = spec.family;
    let p = &spec.params;
    let graph = match fam {
        GeneratorFamily::ErdosRenyi => nondeterministic::erdos_renyi(fam, p, &mut rng)?,
        GeneratorFamily::WattsStrogatz => {
            nondeterministic::watts_strogatz(fam, p, &mut rng, false)?
        }
        GeneratorFamily::NewmanWattsStrogatz => {
            nondeterministic::watts_strogatz(fam, p, &mut rng, true)?
        }
        GeneratorFamily::ExtendedBarabasiAlbert => {
            nondeterministic::extended_barabasi_albert(fam, p, &mut rng)?
        }
        GeneratorFamily::PowerlawCluster => {
            nondeterministic::powerlaw_cluster(fam, p, &mut rng)?
        }
        GeneratorFamily::DuplicationDivergence => {
            nondeterministic::duplication_divergence(fam, p, &mut rng)?
        }
        GeneratorFamily::GaussianPartition => {
            nondeterministic::gaussian_partition(fam, p, &mut rng)?
        }
        GeneratorFamily::ForestFire => nondeterministic::forest_fire(fam, p, &mut rng)?,
        GeneratorFamily::RandomGeometric => {
            nondeterministic::random_geometric(fam, p, &mut rng)?
        }
        GeneratorFamily::Geometric3dDd => nondeterministic::geometric_3d_dd(fam, p, &mut rng)?,
        GeneratorFamily::RandomRegular => nondeterministic::random_regular(fam, p, &mut rng)?,
        GeneratorFamily::BalancedTree => deterministic::balanced_tree(fam, p)?,
        GeneratorFamily::BinomialTree => deterministic::binomial_tree(fam, p)?,
        GeneratorFamily::FullRaryTree => deterministic::full_rary_tree(fam, p)?,
        GeneratorFamily::CircularLadder => deterministic::circular_ladder(fam, p)?,
        GeneratorFamily::ChordalCycle => deterministic::chordal_cycle(fam, p)?,
        GeneratorFamily::Barbell => deterministic::barbell(fam, p)?,
        GeneratorFamily::Lollipop => deterministic::lollipop(fam, p)?,
        GeneratorFamily::Dgm => deterministic::dgm(fam, p)?,
        GeneratorFamily::SquareLattice => deterministic::square_lattice(fam, p)?,
        GeneratorFamily::HexagonalLattice => deterministic::hexagonal_lattice(fam, p)?,
        GeneratorFamily::TriangularLattice => deterministic::triangular_lattice(fam, p)?,
        GeneratorFamily::Star => deterministic::star(fam, p)?,
    };

    if fam.is_deterministic() {
        if let Some(rp) = spec.params.real_opt("rewire_p") {
            if !(0.0..=1.0).contains(&rp) {
                return Err(GeneratorError::BadParam {
                    family: fam.name().to_string(),
                    key: "rewire_p".to_string(),
                    msg: format!("fraction must be in [0,1], got {rp}"),
                });
            }
            if rp > 0.0 {
                return Ok(graph.rewire_fraction(rp, spec.seed)?);
            }
        }
    }
    Ok(graph)
}

/// Group the true significance profiles of a dataset by generator family.
/// This is the reference index (the set of all known true SPs) that the
/// agreement heatmap matches predictions against.
pub fn nearest_family_reference_profiles(
    records: &[crate::dataset::DatasetRecord],
) -> BTreeMap<GeneratorFamily, Vec<crate::sp::SignificanceProfile>> {
    let mut index: BTreeMap<GeneratorFamily, Vec<crate::sp::SignificanceProfile>> =
        BTreeMap::new();
    for rec in records {
        index.entry(rec.family).or_default().push(rec.profile());
    }
    index
}

/// Draw in-regime parameters for a family. Deterministic families get
/// `rewire_p = 0.25`. The same `(family, profile, rng_seed)` always yields
/// the same spec; the spec's own seed is drawn from the same stream.
pub fn sample_spec(
    family: GeneratorFamily,
    profile: &SizeProfile,
    rng_seed: u64,
) -> GeneratorSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut params = match family {
        GeneratorFamily::ErdosRenyi => nondeterministic::sample_erdos_renyi(profile, &mut rng),
        GeneratorFamily::WattsStrogatz | GeneratorFamily::NewmanWattsStrogatz => {
            nondeterministic::sample_watts_strogatz(profile, &mut rng)
        }
        GeneratorFamily::ExtendedBarabasiAlbert => {
            nondeterministic::sample_extended_barabasi_albert(profile, &mut rng)
        }
        GeneratorFamily::PowerlawCluster => {
            nondeterministic::sample_powerlaw_cluster(profile, &mut rng)
        }
        GeneratorFamily::DuplicationDivergence => {
            nondeterministic::sample_duplication_divergence(profile, &mut rng)
        }
        GeneratorFamily::GaussianPartition => {
            nondeterministic::sample_gaussian_partition(profile, &mut rng)
        }
        GeneratorFamily::ForestFire => nondeterministic::sample_forest_fire(profile, &mut rng),
        GeneratorFamily::RandomGeometric => {
            nondeterministic::sample_random_geometric(profile, &mut rng)
        }
        GeneratorFamily::Geometric3dDd => {
            nondeterministic::sample_geometric_3d_dd(profile, &mut rng)
        }
        GeneratorFamily::RandomRegular => {
            nondeterministic::sample_random_regular(profile, &mut rng)
        }
        GeneratorFamily::BalancedTree => deterministic::sample_balanced_tree(profile, &mut rng),
        GeneratorFamily::BinomialTree => deterministic::sample_binomial_tree(profile, &mut rng),
        GeneratorFamily::FullRaryTree => deterministic::sample_full_rary_tree(profile, &mut rng),
        GeneratorFamily::CircularLadder => {
            deterministic::sample_circular_ladder(profile, &mut rng)
        }
        GeneratorFamily::ChordalCycle => deterministic::sample_chordal_cycle(profile, &mut rng),
        GeneratorFamily::Barbell => deterministic::sample_barbell(profile, &mut rng),
        GeneratorFamily::Lollipop => deterministic::sample_lollipop(profile, &mut rng),
        GeneratorFamily::Dgm => deterministic::sample_dgm(profile, &mut rng),
        GeneratorFamily::SquareLattice => deterministic::sample_square_lattice(profile, &mut rng),
        GeneratorFamily::HexagonalLattice => {
            deterministic::sample_hexagonal_lattice(profile, &mut rng)
        }
        GeneratorFamily::TriangularLattice => {
            deterministic::sample_triangular_lattice(profile, &mut rng)
        }
        GeneratorFamily::Star => deterministic::sample_star(profile, &mut rng),
    };
    if family.is_deterministic() {
        params.set_real("rewire_p", DETERMINISTIC_REWIRE_P);
    }
    GeneratorSpec {
        family,
        params,
        seed: rng.gen(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::{census, oracle_census, PatternId};

    #[test]
    fn family_names_round_trip() {
        for fam in GeneratorFamily::ALL {
            let parsed: GeneratorFamily = fam.name().parse().unwrap();
            assert_eq!(parsed, fam);
        }
        assert!("no_such_family".parse::<GeneratorFamily>().is_err());
    }

    #[test]
    fn nd_plus_d_is_23() {
        assert_eq!(GeneratorFamily::ALL.len(), 23);
        assert_eq!(GeneratorFamily::NONDETERMINISTIC.len(), 11);
        assert_eq!(GeneratorFamily::DETERMINISTIC.len(), 12);
    }

    #[test]
    fn every_family_generates_valid_graphs() {
        let profile = SizeProfile::new(20, 80);
        for (i, fam) in GeneratorFamily::ALL.into_iter().enumerate() {
            let spec = sample_spec(fam, &profile, 1000 + i as u64);
            let g = generate(&spec).unwrap_or_else(|e| panic!("{fam}: {e}"));
            g.validate().unwrap_or_else(|e| panic!("{fam}: {e}"));
            assert!(g.n() > 0, "{fam} generated an empty graph");
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let profile = SizeProfile::new(20, 80);
        for (i, fam) in GeneratorFamily::ALL.into_iter().enumerate() {
            let spec = sample_spec(fam, &profile, 77 + i as u64);
            let a = generate(&spec).unwrap();
            let b = generate(&spec).unwrap();
            assert_eq!(a, b, "{fam} not bit-deterministic");
        }
    }

    #[test]
    fn sampled_specs_are_deterministic() {
        let profile = SizeProfile::default();
        for fam in GeneratorFamily::ALL {
            assert_eq!(
                sample_spec(fam, &profile, 5),
                sample_spec(fam, &profile, 5)
            );
        }
    }

    #[test]
    fn star_example() {
        let mut params = Params::new();
        params.set_int("k", 5);
        let g = generate(&GeneratorSpec {
            family: GeneratorFamily::Star,
            params,
            seed: 0,
        })
        .unwrap();
        assert_eq!(g.n(), 6);
        assert_eq!(g.m(), 5);
        assert_eq!(g.degree_sequence().degrees, vec![5, 1, 1, 1, 1, 1]);
    }

    #[test]
    fn barbell_example() {
        let mut params = Params::new();
        params.set_int("k", 4);
        params.set_int("path_len", 2);
        let g = generate(&GeneratorSpec {
            family: GeneratorFamily::Barbell,
            params,
            seed: 0,
        })
        .unwrap();
        assert_eq!(g.n(), 10);
        assert_eq!(g.m(), 15); // 2·C(4,2) + 3
        assert_eq!(oracle_census(&g).get(PatternId::K4), 2);
    }

    #[test]
    fn dgm_node_edge_closed_forms() {
        for steps in 1..=6u32 {
            let mut params = Params::new();
            params.set_int("n", steps as i64);
            let g = generate(&GeneratorSpec {
                family: GeneratorFamily::Dgm,
                params,
                seed: 0,
            })
            .unwrap();
            let expected_nodes = 3 * (3usize.pow(steps) + 1) / 2;
            let expected_edges = 3usize.pow(steps + 1);
            assert_eq!(g.n(), expected_nodes, "dgm({steps}) nodes");
            assert_eq!(g.m(), expected_edges, "dgm({steps}) edges");
        }
    }

    #[test]
    fn circular_ladder_is_cubic() {
        for k in [3usize, 5, 9] {
            let mut params = Params::new();
            params.set_int("k", k as i64);
            let g = generate(&GeneratorSpec {
                family: GeneratorFamily::CircularLadder,
                params,
                seed: 0,
            })
            .unwrap();
            assert_eq!(g.n(), 2 * k);
            assert_eq!(g.m(), 3 * k);
            assert!(g.degree_sequence().degrees.iter().all(|&d| d == 3));
        }
    }

    #[test]
    fn random_regular_hits_degree_exactly() {
        let mut params = Params::new();
        params.set_int("n", 30);
        params.set_int("d", 4);
        let g = generate(&GeneratorSpec {
            family: GeneratorFamily::RandomRegular,
            params,
            seed: 9,
        })
        .unwrap();
        assert!(g.degree_sequence().degrees.iter().all(|&d| d == 4));
    }

    #[test]
    fn watts_strogatz_rejects_k_not_below_n() {
        let mut params = Params::new();
        params.set_int("n", 10);
        params.set_int("k", 10);
        params.set_real("p", 0.1);
        let err = generate(&GeneratorSpec {
            family: GeneratorFamily::WattsStrogatz,
            params,
            seed: 0,
        });
        assert!(err.is_err());
    }

    #[test]
    fn duplication_divergence_regimes() {
        let profile = SizeProfile::new(20, 60);
        let inv_e = (-1.0f64).exp();
        let mut seen = [false; 3];
        for seed in 0..60 {
            let spec = sample_spec(GeneratorFamily::DuplicationDivergence, &profile, seed);
            let sigma = spec.params.real_opt("sigma").unwrap();
            assert!(sigma > 0.0 && sigma < 1.0);
            assert!((sigma - inv_e).abs() > 1e-9 && (sigma - 0.5).abs() > 1e-9);
            let regime = if sigma < inv_e {
                0
            } else if sigma < 0.5 {
                1
            } else {
                2
            };
            seen[regime] = true;
        }
        assert_eq!(seen, [true; 3], "all three regimes should be drawn");
    }

    #[test]
    fn gaussian_partition_respects_overattractiveness_bound() {
        let profile = SizeProfile::new(60, 200);
        for seed in 0..40 {
            let spec = sample_spec(GeneratorFamily::GaussianPartition, &profile, seed);
            let p = spec.params.real_opt("p").unwrap();
            let q = spec.params.real_opt("q").unwrap();
            assert!(p <= (5.0 * q).min(1.0) + 1e-12, "p={p} q={q}");
            assert!((0.0..=1.0).contains(&q));
        }
    }

    #[test]
    fn forest_fire_probability_range() {
        let profile = SizeProfile::new(20, 60);
        for seed in 0..20 {
            let spec = sample_spec(GeneratorFamily::ForestFire, &profile, seed);
            let fw = spec.params.real_opt("p_forward").unwrap();
            let bw = spec.params.real_opt("p_backward").unwrap();
            assert!((0.0..=0.4).contains(&fw));
            assert!((0.0..=0.4).contains(&bw));
        }
    }

    #[test]
    fn sampled_sizes_respect_profile_max() {
        // strict upper bound matters: the census oracle is only meant for
        // small graphs
        let profile = SizeProfile::new(10, 60);
        for (i, fam) in GeneratorFamily::ALL.into_iter().enumerate() {
            for s in 0..4u64 {
                let spec = sample_spec(fam, &profile, 31 * i as u64 + s);
                let g = generate(&spec).unwrap_or_else(|e| panic!("{fam}: {e}"));
                assert!(g.n() <= 60, "{fam} produced n={} > 60", g.n());
            }
        }
    }

    #[test]
    fn rewired_deterministic_specs_stay_valid() {
        let profile = SizeProfile::new(20, 80);
        for (i, fam) in GeneratorFamily::DETERMINISTIC.into_iter().enumerate() {
            let spec = sample_spec(fam, &profile, 400 + i as u64);
            assert_eq!(spec.params.real_opt("rewire_p"), Some(0.25));
            let g = generate(&spec).unwrap();
            g.validate().unwrap();
        }
    }

    #[test]
    fn census_on_every_family_obeys_conservation() {
        let profile = SizeProfile::new(10, 50);
        for (i, fam) in GeneratorFamily::ALL.into_iter().enumerate() {
            let spec = sample_spec(fam, &profile, 900 + i as u64);
            let g = generate(&spec).unwrap();
            assert_eq!(census(&g).unwrap(), oracle_census(&g), "{fam}");
            assert!(crate::census::check_conservation(&g).unwrap(), "{fam}");
        }
    }
}
