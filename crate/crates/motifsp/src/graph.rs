//! Simple undirected graphs with canonical adjacency.
//!
//! The whole pipeline runs on one representation: a node count `n` and a
//! per-node sorted neighbour list. Invariants held by every constructor:
//!
//! * no self-loops,
//! * no parallel edges (each list strictly increasing),
//! * symmetry (`u ∈ adj[v] ⇔ v ∈ adj[u]`),
//! * `m` equals half the sum of list lengths.
//!
//! Graphs are immutable after construction, so shared read access is safe.

use std::collections::HashSet;
use std::io::{self, BufRead, Write};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("node id {id} out of range for declared node count {n}")]
    NodeOutOfRange { id: usize, n: usize },
    #[error("rewiring needs at least 3 nodes, graph has {0}")]
    RewireTooFewNodes(usize),
    #[error("edge list line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("graph invariant violated: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Simple undirected graph. Node ids are dense `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    m: usize,
}

/// Outcome of [`Graph::from_edge_list`]: the canonical graph plus how many
/// input pairs were dropped as self-loops or duplicates.
#[derive(Debug, Clone)]
pub struct EdgeListBuild {
    pub graph: Graph,
    pub dropped: usize,
}

/// Per-node degrees; `degrees[v] == |N(v)|`, sum is always even.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSequence {
    pub degrees: Vec<usize>,
}

impl DegreeSequence {
    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }
}

impl Graph {
    /// Build from an arbitrary edge list. Self-loops and duplicate edges are
    /// dropped (the count of dropped pairs is reported). When `n` is `None`
    /// the node count is `max id + 1`; declaring `n` allows trailing
    /// isolated nodes.
    pub fn from_edge_list(
        edges: &[(usize, usize)],
        n: Option<usize>,
    ) -> Result<EdgeListBuild, GraphError> {
        let inferred = edges
            .iter()
            .map(|&(u, v)| u.max(v) + 1)
            .max()
            .unwrap_or(0);
        let n = match n {
            Some(declared) => {
                if inferred > declared {
                    let bad = edges
                        .iter()
                        .flat_map(|&(u, v)| [u, v])
                        .find(|&x| x >= declared)
                        .unwrap();
                    return Err(GraphError::NodeOutOfRange {
                        id: bad,
                        n: declared,
                    });
                }
                declared
            }
            None => inferred,
        };

        let mut seen = HashSet::with_capacity(edges.len());
        let mut adj = vec![Vec::new(); n];
        let mut dropped = 0usize;
        for &(u, v) in edges {
            if u == v {
                dropped += 1;
                continue;
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                dropped += 1;
                continue;
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let m = seen.len();
        Ok(EdgeListBuild {
            graph: Graph { adj, m },
            dropped,
        })
    }

    /// [`Graph::from_edge_list`] when the dropped count is not of interest.
    pub fn from_edges(edges: &[(usize, usize)], n: Option<usize>) -> Result<Graph, GraphError> {
        Ok(Self::from_edge_list(edges, n)?.graph)
    }

    /// Empty graph on `n` nodes.
    pub fn empty(n: usize) -> Graph {
        Graph {
            adj: vec![Vec::new(); n],
            m: 0,
        }
    }

    /// Complete graph on `n` nodes.
    pub fn complete(n: usize) -> Graph {
        let adj = (0..n)
            .map(|v| (0..n).filter(|&u| u != v).collect())
            .collect();
        Graph {
            adj,
            m: n * n.saturating_sub(1) / 2,
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Iterate each undirected edge once, as `(u, v)` with `u < v`, in
    /// lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, nbrs)| nbrs.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn degree_sequence(&self) -> DegreeSequence {
        DegreeSequence {
            degrees: self.adj.iter().map(Vec::len).collect(),
        }
    }

    /// Check every representation invariant. Used by tests on all
    /// construction paths.
    pub fn validate(&self) -> Result<(), GraphError> {
        let n = self.n();
        let mut half_edges = 0usize;
        for (v, nbrs) in self.adj.iter().enumerate() {
            half_edges += nbrs.len();
            for window in nbrs.windows(2) {
                if window[0] >= window[1] {
                    return Err(GraphError::Invalid(format!(
                        "adjacency of {v} not strictly increasing"
                    )));
                }
            }
            for &u in nbrs {
                if u == v {
                    return Err(GraphError::Invalid(format!("self-loop at {v}")));
                }
                if u >= n {
                    return Err(GraphError::Invalid(format!("neighbor {u} out of range")));
                }
                if self.adj[u].binary_search(&v).is_err() {
                    return Err(GraphError::Invalid(format!("edge {v}-{u} not symmetric")));
                }
            }
        }
        if half_edges != 2 * self.m {
            return Err(GraphError::Invalid(format!(
                "m = {} but adjacency holds {} half-edges",
                self.m, half_edges
            )));
        }
        Ok(())
    }

    /// Relabel nodes by `perm` (node `v` becomes `perm[v]`). `perm` must be
    /// a permutation of `0..n`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.n());
        let edges: Vec<(usize, usize)> =
            self.edges().map(|(u, v)| (perm[u], perm[v])).collect();
        Graph::from_edges(&edges, Some(self.n())).expect("relabeling preserves validity")
    }

    /// Disjoint union; nodes of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let off = self.n();
        let mut edges: Vec<(usize, usize)> = self.edges().collect();
        edges.extend(other.edges().map(|(u, v)| (u + off, v + off)));
        Graph::from_edges(&edges, Some(self.n() + other.n())).expect("union preserves validity")
    }

    /// Perturb the graph by `⌊p·m⌋` single-edge rewiring steps. Each step
    /// removes a uniformly chosen edge `(u,v)`, keeps one endpoint (picked
    /// uniformly) and attaches it to a uniform node `w ∉ {u,v}`. If the
    /// proposed edge already exists the step ends with one less edge, so
    /// `m` never grows. The result is canonical.
    pub fn rewire_fraction(&self, p: f64, rng_seed: u64) -> Result<Graph, GraphError> {
        assert!((0.0..=1.0).contains(&p), "rewire fraction must be in [0,1]");
        let steps = (p * self.m as f64).floor() as usize;
        if steps == 0 {
            return Ok(self.clone());
        }
        if self.n() < 3 {
            return Err(GraphError::RewireTooFewNodes(self.n()));
        }
        let n = self.n();
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let mut edges: Vec<(usize, usize)> = self.edges().collect();
        let mut present: HashSet<(usize, usize)> = edges.iter().copied().collect();

        for _ in 0..steps {
            if edges.is_empty() {
                break;
            }
            let idx = rng.gen_range(0..edges.len());
            let (u, v) = edges.swap_remove(idx);
            present.remove(&(u, v));
            let kept = if rng.gen_bool(0.5) { u } else { v };
            let (a, b) = (u.min(v), u.max(v));
            let mut w = rng.gen_range(0..n - 2);
            if w >= a {
                w += 1;
            }
            if w >= b {
                w += 1;
            }
            let new_edge = (kept.min(w), kept.max(w));
            if present.insert(new_edge) {
                edges.push(new_edge);
            }
            // else: proposed edge already present, the step loses the edge
        }
        Graph::from_edges(&edges, Some(n))
    }

    /// Write the canonical edge-list text format: one `u v` per line with
    /// `u < v`, lines sorted lexicographically by `(u, v)`. Bit-exact for a
    /// given graph.
    pub fn write_edge_list<W: Write>(&self, mut sink: W) -> io::Result<()> {
        for (u, v) in self.edges() {
            writeln!(sink, "{u} {v}")?;
        }
        Ok(())
    }

    /// Parse the edge-list text format. The node count is inferred as
    /// `max id + 1`; `read(write(g)) == g` for graphs without trailing
    /// isolated nodes.
    pub fn read_edge_list<R: BufRead>(source: R) -> Result<Graph, GraphError> {
        let mut edges = Vec::new();
        for (lineno, line) in source.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<usize, GraphError> {
                let tok = tok.ok_or_else(|| GraphError::Parse {
                    line: lineno + 1,
                    msg: "expected two node ids".into(),
                })?;
                tok.parse().map_err(|_| GraphError::Parse {
                    line: lineno + 1,
                    msg: format!("non-integer token `{tok}`"),
                })
            };
            let u = parse(it.next())?;
            let v = parse(it.next())?;
            if it.next().is_some() {
                return Err(GraphError::Parse {
                    line: lineno + 1,
                    msg: "trailing tokens after edge".into(),
                });
            }
            edges.push((u, v));
        }
        Graph::from_edges(&edges, None)
    }

    pub fn write_edge_list_path(&self, path: &std::path::Path) -> Result<(), GraphError> {
        let file = std::fs::File::create(path)?;
        let mut w = io::BufWriter::new(file);
        self.write_edge_list(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn read_edge_list_path(path: &std::path::Path) -> Result<Graph, GraphError> {
        let file = std::fs::File::open(path)?;
        Self::read_edge_list(io::BufReader::new(file))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::from_edges(&[(0, 1), (1, 2), (2, 0)], None).unwrap()
    }

    #[test]
    fn triangle_from_edge_list() {
        let g = triangle();
        assert_eq!(g.n(), 3);
        assert_eq!(g.m(), 3);
        g.validate().unwrap();
    }

    #[test]
    fn self_loops_and_duplicates_dropped() {
        let b = Graph::from_edge_list(&[(0, 1), (1, 0), (0, 0)], None).unwrap();
        assert_eq!(b.graph.n(), 2);
        assert_eq!(b.graph.m(), 1);
        assert_eq!(b.dropped, 2);
    }

    #[test]
    fn four_cycle() {
        let g = Graph::from_edges(&[(0, 1), (1, 2), (2, 3), (3, 0)], None).unwrap();
        assert_eq!(g.m(), 4);
        assert_eq!(g.degree_sequence().degrees, vec![2, 2, 2, 2]);
    }

    #[test]
    fn node_out_of_declared_range() {
        let err = Graph::from_edges(&[(0, 5)], Some(3)).unwrap_err();
        assert!(matches!(err, GraphError::NodeOutOfRange { id: 5, n: 3 }));
    }

    #[test]
    fn declared_n_allows_trailing_isolated_nodes() {
        let g = Graph::from_edges(&[(0, 1)], Some(5)).unwrap();
        assert_eq!(g.n(), 5);
        assert_eq!(g.degree_sequence().degrees, vec![1, 1, 0, 0, 0]);
    }

    #[test]
    fn degree_sequences() {
        assert_eq!(Graph::complete(4).degree_sequence().degrees, vec![3; 4]);
        let star = Graph::from_edges(&[(0, 1), (0, 2), (0, 3)], None).unwrap();
        assert_eq!(star.degree_sequence().degrees, vec![3, 1, 1, 1]);
        assert_eq!(Graph::empty(5).degree_sequence().degrees, vec![0; 5]);
    }

    #[test]
    fn rewire_zero_fraction_is_identity() {
        let g = triangle();
        let h = g.rewire_fraction(0.0, 7).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn rewire_full_c4_stays_simple() {
        let g = Graph::from_edges(&[(0, 1), (1, 2), (2, 3), (3, 0)], None).unwrap();
        let h = g.rewire_fraction(1.0, 3).unwrap();
        assert!(h.m() <= 4);
        h.validate().unwrap();
    }

    #[test]
    fn rewire_attempts_floor_of_p_m() {
        // 100-edge graph, p = 0.25: exactly 25 steps attempted, so at most
        // 25 edges can be lost and the rest must stay intact.
        let edges: Vec<(usize, usize)> = (0..100).map(|i| (i, i + 100)).collect();
        let g = Graph::from_edges(&edges, None).unwrap();
        let h = g.rewire_fraction(0.25, 11).unwrap();
        assert!(h.m() >= 75 && h.m() <= 100);
        h.validate().unwrap();
    }

    #[test]
    fn rewire_rejects_tiny_graphs() {
        let g = Graph::from_edges(&[(0, 1)], None).unwrap();
        assert!(matches!(
            g.rewire_fraction(1.0, 0).unwrap_err(),
            GraphError::RewireTooFewNodes(2)
        ));
    }

    #[test]
    fn rewire_never_increases_edge_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for trial in 0..20 {
            let n = 12;
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.gen_bool(0.3) {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::from_edges(&edges, Some(n)).unwrap();
            let h = g.rewire_fraction(1.0, trial).unwrap();
            assert!(h.m() <= g.m());
            h.validate().unwrap();
        }
    }

    #[test]
    fn canonical_writer_format() {
        let mut out = Vec::new();
        triangle().write_edge_list(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "0 1\n0 2\n1 2\n");
    }

    #[test]
    fn read_path_graph() {
        let g = Graph::read_edge_list("0 1\n1 2\n".as_bytes()).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.m(), 2);
        assert_eq!(g.degree_sequence().degrees, vec![1, 2, 1]);
    }

    #[test]
    fn read_rejects_malformed_lines() {
        assert!(Graph::read_edge_list("0 x\n".as_bytes()).is_err());
        assert!(Graph::read_edge_list("0\n".as_bytes()).is_err());
        assert!(Graph::read_edge_list("0 1 2\n".as_bytes()).is_err());
    }

    #[test]
    fn relabel_preserves_structure() {
        let g = triangle();
        let h = g.relabel(&[2, 0, 1]);
        assert_eq!(h.m(), 3);
        assert_eq!(h.degree_sequence().degrees, vec![2, 2, 2]);
    }
}
