//! Exact induced censuses of the 8 connected graphs on 3 and 4 nodes.
//!
//! The fast path never enumerates node subsets. It computes a handful of
//! cheap non-induced quantities — wedges, per-edge and per-vertex triangle
//! counts, codegree pairs — and converts them to induced counts through the
//! closed linear system relating non-induced and induced occurrences:
//!
//! ```text
//! N_P4      = I_P4 + 2·I_PAW + 4·I_C4 + 6·I_DIAMOND + 12·I_K4
//! N_S4      = I_S4 + 1·I_PAW           + 2·I_DIAMOND +  4·I_K4
//! N_C4      = I_C4            + 1·I_DIAMOND +  3·I_K4
//! N_PAW     = I_PAW           + 4·I_DIAMOND + 12·I_K4
//! N_DIAMOND = I_DIAMOND + 6·I_K4
//! N_K4      = I_K4
//! ```
//!
//! [`oracle_census`] is the independent check: exhaustive enumeration of all
//! 3- and 4-node subsets, classified by degree multiset. It shares no code
//! with the fast path.

use std::collections::HashMap;

use thiserror::Error;

use crate::graph::{DegreeSequence, Graph};

/// The 8 candidate patterns, in the fixed serialization order used by every
/// count vector, Z-score vector and significance profile in this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PatternId {
    /// Path on 3 nodes.
    P3,
    /// Triangle.
    Tri,
    /// Path on 4 nodes.
    P4,
    /// Star K1,3.
    S4,
    /// Cycle on 4 nodes.
    C4,
    /// Triangle with a pendant edge (tri-pan).
    Paw,
    /// K4 minus one edge (bi-fan).
    Diamond,
    /// Complete graph on 4 nodes.
    K4,
}

impl PatternId {
    pub const ALL: [PatternId; 8] = [
        PatternId::P3,
        PatternId::Tri,
        PatternId::P4,
        PatternId::S4,
        PatternId::C4,
        PatternId::Paw,
        PatternId::Diamond,
        PatternId::K4,
    ];

    /// Position in the canonical order.
    pub fn index(self) -> usize {
        self as usize
    }

    /// Number of nodes of the pattern (3 or 4).
    pub fn size(self) -> usize {
        match self {
            PatternId::P3 | PatternId::Tri => 3,
            _ => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PatternId::P3 => "P3",
            PatternId::Tri => "TRI",
            PatternId::P4 => "P4",
            PatternId::S4 => "S4",
            PatternId::C4 => "C4",
            PatternId::Paw => "PAW",
            PatternId::Diamond => "DIAMOND",
            PatternId::K4 => "K4",
        }
    }
}

impl std::fmt::Display for PatternId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for PatternId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PatternId::ALL
            .iter()
            .copied()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown pattern `{s}`"))
    }
}

/// Induced occurrence counts for all 8 patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GraphletCounts {
    counts: [u64; 8],
}

impl GraphletCounts {
    pub fn get(&self, p: PatternId) -> u64 {
        self.counts[p.index()]
    }

    pub fn set(&mut self, p: PatternId, value: u64) {
        self.counts[p.index()] = value;
    }

    /// Counts as an 8-array in [`PatternId::ALL`] order.
    pub fn as_array(&self) -> [u64; 8] {
        self.counts
    }

    pub fn from_array(counts: [u64; 8]) -> Self {
        GraphletCounts { counts }
    }

    pub fn iter(&self) -> impl Iterator<Item = (PatternId, u64)> + '_ {
        PatternId::ALL.iter().map(|&p| (p, self.counts[p.index()]))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CensusError {
    /// Counts are kept in checked 64-bit arithmetic; wraparound is refused.
    #[error("graphlet count overflowed 64-bit range")]
    Overflow,
}

fn add(a: u64, b: u64) -> Result<u64, CensusError> {
    a.checked_add(b).ok_or(CensusError::Overflow)
}

fn sub(a: u64, b: u64) -> Result<u64, CensusError> {
    // The conversion system can only go negative if the inputs are
    // inconsistent, which would be a bug, but surface it as overflow rather
    // than wrapping.
    a.checked_sub(b).ok_or(CensusError::Overflow)
}

fn mul(a: u64, b: u64) -> Result<u64, CensusError> {
    a.checked_mul(b).ok_or(CensusError::Overflow)
}

fn choose2(d: u64) -> u64 {
    d * d.saturating_sub(1) / 2
}

fn choose3(d: u64) -> Result<u64, CensusError> {
    if d < 3 {
        return Ok(0);
    }
    mul(mul(d, d - 1)?, d - 2).map(|x| x / 6)
}

/// Non-induced 3-path (wedge) count from degrees alone: `Σ_v C(d_v, 2)`.
/// This is the degree-sequence invariant behind the conservation law.
pub fn noninduced_p3_from_degrees(d: &DegreeSequence) -> u64 {
    d.degrees.iter().map(|&deg| choose2(deg as u64)).sum()
}

/// Exact induced counts of 3-paths and triangles.
pub fn count_size3(g: &Graph) -> Result<(u64, u64), CensusError> {
    let tri_total = triangle_structure(g)?.total;
    let wedges = noninduced_p3_from_degrees(&g.degree_sequence());
    let p3 = sub(wedges, mul(3, tri_total)?)?;
    Ok((p3, tri_total))
}

struct TriangleStructure {
    /// Triangles through each edge, aligned with `edge_list`.
    per_edge: Vec<u64>,
    /// Triangles through each vertex.
    per_vertex: Vec<u64>,
    edge_list: Vec<(usize, usize)>,
    total: u64,
}

fn triangle_structure(g: &Graph) -> Result<TriangleStructure, CensusError> {
    let edge_list: Vec<(usize, usize)> = g.edges().collect();
    let mut per_edge = vec![0u64; edge_list.len()];
    let mut per_vertex = vec![0u64; g.n()];
    let mut total = 0u64;
    for (i, &(u, v)) in edge_list.iter().enumerate() {
        // sorted-list intersection
        let (mut a, mut b) = (g.neighbors(u), g.neighbors(v));
        let mut common = 0u64;
        while let (Some(&x), Some(&y)) = (a.first(), b.first()) {
            match x.cmp(&y) {
                std::cmp::Ordering::Less => a = &a[1..],
                std::cmp::Ordering::Greater => b = &b[1..],
                std::cmp::Ordering::Equal => {
                    common += 1;
                    a = &a[1..];
                    b = &b[1..];
                }
            }
        }
        per_edge[i] = common;
        per_vertex[u] = add(per_vertex[u], common)?;
        per_vertex[v] = add(per_vertex[v], common)?;
        total = add(total, common)?;
    }
    // Each triangle is seen once per edge (3x) in `total` and twice per
    // vertex tally entry (vertex v is endpoint of 2 of its triangle edges).
    for t in &mut per_vertex {
        debug_assert!(*t % 2 == 0);
        *t /= 2;
    }
    Ok(TriangleStructure {
        per_edge,
        per_vertex,
        edge_list,
        total: total / 3,
    })
}

/// Exact induced counts of the six 4-node patterns.
pub fn count_size4(g: &Graph) -> Result<GraphletCounts, CensusError> {
    let tri = triangle_structure(g)?;
    let degs: Vec<u64> = (0..g.n()).map(|v| g.degree(v) as u64).collect();

    // Non-induced building blocks.
    let mut n_p4 = 0u64; // paths with 3 edges
    let mut n_paw = 0u64; // triangle + pendant
    let mut n_diamond = 0u64; // two triangles sharing an edge
    for (i, &(u, v)) in tri.edge_list.iter().enumerate() {
        let du = degs[u];
        let dv = degs[v];
        n_p4 = add(n_p4, mul(du.saturating_sub(1), dv.saturating_sub(1))?)?;
        n_diamond = add(n_diamond, choose2(tri.per_edge[i]))?;
    }
    n_p4 = sub(n_p4, mul(3, tri.total)?)?;
    for v in 0..g.n() {
        n_paw = add(n_paw, mul(tri.per_vertex[v], degs[v].saturating_sub(2))?)?;
    }

    let mut n_s4 = 0u64; // K1,3
    for &d in &degs {
        n_s4 = add(n_s4, choose3(d)?)?;
    }

    // 4-cycles via codegrees: every unordered pair with c common neighbours
    // contributes C(c,2) cycles through that diagonal; each cycle has two
    // diagonals.
    let mut codeg: HashMap<(usize, usize), u64> = HashMap::new();
    for v in 0..g.n() {
        let nbrs = g.neighbors(v);
        for i in 0..nbrs.len() {
            for j in (i + 1)..nbrs.len() {
                *codeg.entry((nbrs[i], nbrs[j])).or_insert(0) += 1;
            }
        }
    }
    let mut cycle_pairs = 0u64;
    for &c in codeg.values() {
        cycle_pairs = add(cycle_pairs, choose2(c))?;
    }
    debug_assert!(cycle_pairs % 2 == 0);
    let n_c4 = cycle_pairs / 2;

    // K4: for each edge, adjacent pairs among its common neighbours; every
    // clique is found once per edge, i.e. 6 times.
    let mut k4_hits = 0u64;
    let mut common = Vec::new();
    for &(u, v) in &tri.edge_list {
        common.clear();
        let (mut a, mut b) = (g.neighbors(u), g.neighbors(v));
        while let (Some(&x), Some(&y)) = (a.first(), b.first()) {
            match x.cmp(&y) {
                std::cmp::Ordering::Less => a = &a[1..],
                std::cmp::Ordering::Greater => b = &b[1..],
                std::cmp::Ordering::Equal => {
                    common.push(x);
                    a = &a[1..];
                    b = &b[1..];
                }
            }
        }
        for i in 0..common.len() {
            for j in (i + 1)..common.len() {
                if g.has_edge(common[i], common[j]) {
                    k4_hits = add(k4_hits, 1)?;
                }
            }
        }
    }
    debug_assert!(k4_hits % 6 == 0);
    let n_k4 = k4_hits / 6;

    // Non-induced -> induced, solved bottom-up.
    let i_k4 = n_k4;
    let i_diamond = sub(n_diamond, mul(6, i_k4)?)?;
    let i_paw = sub(n_paw, add(mul(4, i_diamond)?, mul(12, i_k4)?)?)?;
    let i_c4 = sub(n_c4, add(i_diamond, mul(3, i_k4)?)?)?;
    let i_s4 = sub(n_s4, add(i_paw, add(mul(2, i_diamond)?, mul(4, i_k4)?)?)?)?;
    let i_p4 = sub(
        n_p4,
        add(
            mul(2, i_paw)?,
            add(mul(4, i_c4)?, add(mul(6, i_diamond)?, mul(12, i_k4)?)?)?,
        )?,
    )?;

    let mut out = GraphletCounts::default();
    out.set(PatternId::P4, i_p4);
    out.set(PatternId::S4, i_s4);
    out.set(PatternId::C4, i_c4);
    out.set(PatternId::Paw, i_paw);
    out.set(PatternId::Diamond, i_diamond);
    out.set(PatternId::K4, i_k4);
    Ok(out)
}

/// Full 8-pattern induced census (fast path).
pub fn census(g: &Graph) -> Result<GraphletCounts, CensusError> {
    let (p3, tri) = count_size3(g)?;
    let mut out = count_size4(g)?;
    out.set(PatternId::P3, p3);
    out.set(PatternId::Tri, tri);
    Ok(out)
}

/// `true` iff the degree-sequence conservation identity holds:
/// `P3_induced = Σ_v C(d_v,2) − 3·triangles`, exactly.
pub fn check_conservation(g: &Graph) -> Result<bool, CensusError> {
    let (p3, tri) = count_size3(g)?;
    let wedges = noninduced_p3_from_degrees(&g.degree_sequence());
    Ok(wedges == p3 + 3 * tri)
}

/// Mean local clustering coefficient: average over all nodes of
/// `2·t_v / (d_v·(d_v−1))`, with nodes of degree < 2 contributing 0.
pub fn average_clustering(g: &Graph) -> f64 {
    if g.n() == 0 {
        return 0.0;
    }
    let tri = triangle_structure(g).expect("triangle counts fit in u64");
    let mut acc = 0.0;
    for v in 0..g.n() {
        let d = g.degree(v) as f64;
        if d >= 2.0 {
            acc += 2.0 * tri.per_vertex[v] as f64 / (d * (d - 1.0));
        }
    }
    acc / g.n() as f64
}

/// Brute-force census by exhaustive subset enumeration, classifying each
/// induced subgraph by its degree multiset. Independent of the fast path;
/// intended for n up to a couple hundred.
pub fn oracle_census(g: &Graph) -> GraphletCounts {
    let n = g.n();
    let mut counts = GraphletCounts::default();

    for i in 0..n {
        for j in (i + 1)..n {
            let eij = g.has_edge(i, j);
            for k in (j + 1)..n {
                let eik = g.has_edge(i, k);
                let ejk = g.has_edge(j, k);
                let edges = eij as u8 + eik as u8 + ejk as u8;
                match edges {
                    2 => counts.set(PatternId::P3, counts.get(PatternId::P3) + 1),
                    3 => counts.set(PatternId::Tri, counts.get(PatternId::Tri) + 1),
                    _ => {}
                }
            }
        }
    }

    for i in 0..n {
        for j in (i + 1)..n {
            let eij = g.has_edge(i, j) as u8;
            for k in (j + 1)..n {
                let eik = g.has_edge(i, k) as u8;
                let ejk = g.has_edge(j, k) as u8;
                for l in (k + 1)..n {
                    let eil = g.has_edge(i, l) as u8;
                    let ejl = g.has_edge(j, l) as u8;
                    let ekl = g.has_edge(k, l) as u8;
                    let mut deg = [
                        eij + eik + eil,
                        eij + ejk + ejl,
                        eik + ejk + ekl,
                        eil + ejl + ekl,
                    ];
                    deg.sort_unstable();
                    let pattern = match deg {
                        [1, 1, 2, 2] => Some(PatternId::P4),
                        [1, 1, 1, 3] => Some(PatternId::S4),
                        [2, 2, 2, 2] => Some(PatternId::C4),
                        [1, 2, 2, 3] => Some(PatternId::Paw),
                        [2, 2, 3, 3] => Some(PatternId::Diamond),
                        [3, 3, 3, 3] => Some(PatternId::K4),
                        // everything else is disconnected on 4 nodes
                        _ => None,
                    };
                    if let Some(p) = pattern {
                        counts.set(p, counts.get(p) + 1);
                    }
                }
            }
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn path(n: usize) -> Graph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Graph::from_edges(&edges, None).unwrap()
    }

    fn star(k: usize) -> Graph {
        let edges: Vec<_> = (1..=k).map(|i| (0, i)).collect();
        Graph::from_edges(&edges, None).unwrap()
    }

    fn c4() -> Graph {
        Graph::from_edges(&[(0, 1), (1, 2), (2, 3), (3, 0)], None).unwrap()
    }

    fn paw() -> Graph {
        Graph::from_edges(&[(0, 1), (1, 2), (2, 0), (0, 3)], None).unwrap()
    }

    #[test]
    fn size3_examples() {
        assert_eq!(count_size3(&Graph::complete(3)).unwrap(), (0, 1));
        assert_eq!(count_size3(&star(3)).unwrap(), (3, 0));
        assert_eq!(count_size3(&c4()).unwrap(), (4, 0));
    }

    #[test]
    fn size4_examples() {
        let k4 = census(&Graph::complete(4)).unwrap();
        assert_eq!(k4.get(PatternId::K4), 1);
        for p in [
            PatternId::P4,
            PatternId::S4,
            PatternId::C4,
            PatternId::Paw,
            PatternId::Diamond,
        ] {
            assert_eq!(k4.get(p), 0, "{p}");
        }

        let cyc = census(&c4()).unwrap();
        assert_eq!(cyc.get(PatternId::C4), 1);
        assert_eq!(cyc.get(PatternId::P4), 0);

        // every 4-subset of K5 induces a K4
        let k5 = census(&Graph::complete(5)).unwrap();
        assert_eq!(k5.get(PatternId::K4), 5);
        for p in [
            PatternId::P4,
            PatternId::S4,
            PatternId::C4,
            PatternId::Paw,
            PatternId::Diamond,
        ] {
            assert_eq!(k5.get(p), 0);
        }
    }

    #[test]
    fn census_composition_examples() {
        let p4 = census(&path(4)).unwrap();
        assert_eq!(p4.get(PatternId::P3), 2);
        assert_eq!(p4.get(PatternId::P4), 1);
        assert_eq!(p4.get(PatternId::Tri), 0);
        assert_eq!(p4.get(PatternId::S4), 0);

        let empty = census(&Graph::empty(10)).unwrap();
        assert_eq!(empty.as_array(), [0; 8]);

        let pw = census(&paw()).unwrap();
        assert_eq!(pw.get(PatternId::Tri), 1);
        assert_eq!(pw.get(PatternId::P3), 2);
        assert_eq!(pw.get(PatternId::Paw), 1);
        assert_eq!(pw.get(PatternId::P4), 0);
    }

    #[test]
    fn oracle_agrees_on_small_fixed_graphs() {
        for g in [
            Graph::complete(3),
            Graph::complete(4),
            Graph::complete(5),
            c4(),
            paw(),
            path(4),
            star(3),
            Graph::empty(6),
        ] {
            assert_eq!(census(&g).unwrap(), oracle_census(&g));
        }
    }

    #[test]
    fn oracle_agrees_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        for _ in 0..60 {
            let n = rng.gen_range(5..40);
            let p = rng.gen_range(0.05..0.5);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.gen_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::from_edges(&edges, Some(n)).unwrap();
            assert_eq!(census(&g).unwrap(), oracle_census(&g));
            assert!(check_conservation(&g).unwrap());
        }
    }

    #[test]
    fn noninduced_p3_examples() {
        assert_eq!(
            noninduced_p3_from_degrees(&Graph::complete(3).degree_sequence()),
            3
        );
        assert_eq!(noninduced_p3_from_degrees(&star(3).degree_sequence()), 3);
        assert_eq!(noninduced_p3_from_degrees(&c4().degree_sequence()), 4);
    }

    #[test]
    fn conservation_examples() {
        assert!(check_conservation(&Graph::complete(3)).unwrap());
        assert!(check_conservation(&c4()).unwrap());
        assert!(check_conservation(&paw()).unwrap());
    }

    #[test]
    fn census_invariant_under_relabeling() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let n = 20;
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.gen_bool(0.2) {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::from_edges(&edges, Some(n)).unwrap();
            let mut perm: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                let j = rng.gen_range(0..=i);
                perm.swap(i, j);
            }
            assert_eq!(census(&g).unwrap(), census(&g.relabel(&perm)).unwrap());
        }
    }

    #[test]
    fn k4_count_bounded_by_choose4() {
        let g = Graph::complete(9);
        let c = census(&g).unwrap();
        // C(9,4) = 126
        assert_eq!(c.get(PatternId::K4), 126);
    }
}
