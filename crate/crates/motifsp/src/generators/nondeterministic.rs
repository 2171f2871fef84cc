//! The 11 non-deterministic generator families and their parameter
//! regimes.
//!
//! All builders work on ordered adjacency (`BTreeSet`) so that, given a
//! seed, generation is bit-deterministic. Directed intermediates (forest
//! fire) are symmetrized before returning.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::census::average_clustering;
use crate::graph::Graph;

use super::{GeneratorError, GeneratorFamily, Params, SizeProfile};

fn bad(
    family: GeneratorFamily,
    key: &str,
    msg: impl Into<String>,
) -> GeneratorError {
    GeneratorError::BadParam {
        family: family.name().to_string(),
        key: key.to_string(),
        msg: msg.into(),
    }
}

fn invalid(family: GeneratorFamily, msg: impl Into<String>) -> GeneratorError {
    GeneratorError::InvalidCombination {
        family: family.name().to_string(),
        msg: msg.into(),
    }
}

struct AdjBuilder {
    adj: Vec<BTreeSet<usize>>,
}

impl AdjBuilder {
    fn new(n: usize) -> Self {
        AdjBuilder {
            adj: vec![BTreeSet::new(); n],
        }
    }

    fn has(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(&v)
    }

    fn add(&mut self, u: usize, v: usize) -> bool {
        if u == v || self.adj[u].contains(&v) {
            return false;
        }
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        true
    }

    fn remove(&mut self, u: usize, v: usize) {
        self.adj[u].remove(&v);
        self.adj[v].remove(&u);
    }

    fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    fn into_graph(self) -> Graph {
        let n = self.adj.len();
        let mut edges = Vec::new();
        for (u, nbrs) in self.adj.iter().enumerate() {
            for &v in nbrs.range((u + 1)..) {
                edges.push((u, v));
            }
        }
        Graph::from_edges(&edges, Some(n)).expect("builder keeps the graph simple")
    }
}

/// Failures-before-success draw with continuation probability `p`
/// (mean `p/(1−p)`).
fn geometric_failures(rng: &mut ChaCha8Rng, p: f64) -> usize {
    if p <= 0.0 {
        return 0;
    }
    let u: f64 = rng.gen::<f64>().max(1e-300);
    (u.ln() / p.ln()).floor() as usize
}

/// Pick `take` distinct items from `pool` by partial Fisher–Yates.
fn choose_distinct(rng: &mut ChaCha8Rng, pool: &mut Vec<usize>, take: usize) -> Vec<usize> {
    let take = take.min(pool.len());
    for i in 0..take {
        let j = rng.gen_range(i..pool.len());
        pool.swap(i, j);
    }
    pool[..take].to_vec()
}

// ---------------------------------------------------------------------------
// Erdős–Rényi

pub(super) fn erdos_renyi(
    fam: GeneratorFamily,
    params: &Params,
    rng: &mut ChaCha8Rng,
) -> Result<Graph, GeneratorError> {
    let n = params.usize(fam, "n")?;
    let p = params.real(fam, "p")?;
    if !(0.0..=1.0).contains(&p) {
        return Err(bad(fam, "p", format!("probability out of [0,1]: {p}")));
    }
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Ok(Graph::from_edges(&edges, Some(n))?)
}

/// Node count uniform inside the chosen phase; the edge probability comes
/// from the standard phase thresholds (critical `1/n`, supercritical up to
/// `ln n / n`, connected above it).
pub(super) fn sample_erdos_renyi(profile: &SizeProfile, rng: &mut ChaCha8Rng) -> Params {
    let n = profile.sample_n(rng);
    let nf = n as f64;
    let ln_n = nf.ln();
    let p = match rng.gen_range(0..3u8) {
        0 => 1.0 / nf,
        1 => rng.gen_range(1.0 / nf..ln_n / nf),
        _ => rng.gen_range(ln_n / nf..(3.0 * ln_n / nf).min(1.0)),
    };
    let mut params = Params::new();
    params.set_int("n", n as i64);
    params.set_real("p", p);
    params
}

// ---------------------------------------------------------------------------
// Watts–Strogatz and Newman–Watts–Strogatz

/// Ring lattice with `k/2` neighbours on each side. In the plain variant a
/// ring edge is rewired with probability `p`; in the Newman variant a
/// shortcut is added instead, keeping the ring intact.
pub(super) fn watts_strogatz(
    fam: GeneratorFamily,
    params: &Params,
    rng: &mut ChaCha8Rng,
    add_shortcuts: bool,
) -> Result<Graph, GeneratorError> {
    let n = params.usize(fam, "n")?;
    let k = params.usize(fam, "k")?;
    let p = params.real(fam, "p")?;
    if k >= n {
        return Err(invalid(fam, format!("k = {k} must be below n = {n}")));
    }
    if k < 2 || k % 2 != 0 {
        return Err(bad(fam, "k", format!("need an even k >= 2, got {k}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(bad(fam, "p", format!("probability out of [0,1]: {p}")));
    }

    let mut b = AdjBuilder::new(n);
    for j in 1..=(k / 2) {
        for i in 0..n {
            b.add(i, (i + j) % n);
        }
    }
    for j in 1..=(k / 2) {
        for i in 0..n {
            if !rng.gen_bool(p) {
                continue;
            }
            if b.degree(i) >= n - 1 {
                continue; // saturated node, nothing to rewire to
            }
            let mut w = rng.gen_range(0..n);
            while w == i || b.has(i, w) {
                w = rng.gen_range(0..n);
            }
            if !add_shortcuts {
                b.remove(i, (i + j) % n);
            }
            b.add(i, w);
        }
    }
    Ok(b.into_graph())
}

pub(super) fn sample_watts_strogatz(profile: &SizeProfile, rng: &mut ChaCha8Rng) -> Params {
    let n = profile.sample_n(rng).max(8);
    let max_half = ((n - 2) / 2).min(5).max(2);
    let k = 2 * rng.gen_range(2..=max_half);
    // log-uniform rewiring probability covers the small-world sweep
    let p = 10f64.powf(rng.gen_range(-3.0..=0.0));
    let mut params = Params::new();
    params.set_int("n", n as i64);
    params.set_int("k", k as i64);
    params.set_real("p", p);
    params
}

// ---------------------------------------------------------------------------
// Extended Barabási–Albert

/// Growth with three event types: with probability `p` add `m` links, with
/// probability `q` rewire `m` link ends, otherwise add a node with `m`
/// preferential links. Attachment probability is proportional to
/// `degree + 1`, so isolated nodes stay reachable.
pub(super) fn extended_barabasi_albert(
    fam: GeneratorFamily,
    params: &Params,
    rng: &mut ChaCha8Rng,
) -> Result<Graph, GeneratorError> {
    let n = params.usize(fam, "n")?;
    let m = params.usize(fam, "m")?;
    let p = params.real(fam, "p")?;
    let q = params.real(fam, "q")?;
    if m < 1 || m >= n {
        return Err(invalid(fam, format!("need 1 <= m < n, got m={m}, n={n}")));
    }
    if p < 0.0 || q < 0.0 || p + q >= 1.0 {
        return Err(invalid(fam, format!("need p,q >= 0 with p+q < 1, got p={p}, q={q}")));
    }

    let mut b = AdjBuilder::new(n);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut alive = m; // current node count

    // degree+1 preferential draw: uniform over nodes plus half-edges
    fn pref(rng: &mut ChaCha8Rng, alive: usize, edges: &[(usize, usize)]) -> usize {
        let total = alive + 2 * edges.len();
        let r = rng.gen_range(0..total);
        if r < alive {
            r
        } else {
            let h = r - alive;
            let (a, bb) = edges[h / 2];
            if h % 2 == 0 {
                a
            } else {
                bb
            }
        }
    }

    const TRIES: usize = 64;
    while alive < n {
        let roll: f64 = rng.gen();
        let full = edges.len() >= alive * alive.saturating_sub(1) / 2;
        if roll < p && !full {
            for _ in 0..m {
                for _ in 0..TRIES {
                    let u = rng.gen_range(0..alive);
                    let v = pref(rng, alive, &edges);
                    if u != v && !b.has(u, v) {
                        b.add(u, v);
                        edges.push((u.min(v), u.max(v)));
                        break;
                    }
                }
            }
        } else if roll < p + q && !edges.is_empty() {
            for _ in 0..m {
                for _ in 0..TRIES {
                    let u = rng.gen_range(0..alive);
                    if b.degree(u) == 0 {
                        continue;
                    }
                    let nbrs: Vec<usize> = b.adj[u].iter().copied().collect();
                    let v = nbrs[rng.gen_range(0..nbrs.len())];
                    let w = pref(rng, alive, &edges);
                    if w == u || w == v || b.has(u, w) {
                        continue;
                    }
                    b.remove(u, v);
                    let old = (u.min(v), u.max(v));
                    let idx = edges.iter().position(|&e| e == old).unwrap();
                    edges.swap_remove(idx);
                    b.add(u, w);
                    edges.push((u.min(w), u.max(w)));
                    break;
                }
            }
        } else {
            let new = alive;
            alive += 1;
            let want = m.min(new);
            let mut got = 0;
            for _ in 0..(TRIES * m.max(1)) {
                if got == want {
                    break;
                }
                let t = pref(rng, alive, &edges);
                if t != new && !b.has(new, t) {
                    b.add(new, t);
                    edges.push((t.min(new), t.max(new)));
                    got += 1;
                }
            }
        }
    }
    Ok(b.into_graph())
}

/// Power-law exponent of the degree distribution in this model:
/// `γ(p,q,m) = 1 + (2m(1−q) + 1 − p − q)/m`, decreasing in both p and q.
fn extended_ba_exponent(p: f64, q: f64, m: f64) -> f64 {
    1.0 + (2.0 * m * (1.0 - q) + 1.0 - p - q) / m
}

/// Draw a target exponent uniformly in [2,3] and bisect `q` until the
/// model's exponent relation hits it within 0.05.
pub(super) fn sample_extended_barabasi_albert(
    profile: &SizeProfile,
    rng: &mut ChaCha8Rng,
) -> Params {
    let n = profile.sample_n(rng).max(8);
    let m = rng.gen_range(1..=3usize.min(n / 2));
    let target = rng.gen_range(2.0..=3.0);
    let p = rng.gen_range(0.0..0.3);
    let (mut lo, mut hi) = (0.0f64, 0.9 - p);
    let mut q = 0.5 * (lo + hi);
    for _ in 0..60 {
        q = 0.5 * (lo + hi);
        let gamma = extended_ba_exponent(p, q, m as f64);
        if (gamma - target).abs() <= 0.05 {
            break;
        }
        if gamma > target {
            lo = q; // exponent decreases with q
        } else {
            hi = q;
        }
    }
    let mut params = Params::new();
    params.set_int("n", n as i64);
    params.set_int("m", m as i64);
    params.set_real("p", p);
    params.set_real("q", q);
    params
}

// ---------------------------------------------------------------------------
// Powerlaw cluster (preferential attachment + triad formation)

pub(super) fn powerlaw_cluster(
    fam: GeneratorFamily,
    params: &Params,
    rng: &mut ChaCha8Rng,
) -> Result<Graph, GeneratorError> {
    let n = params.usize(fam, "n")?;
    let m = params.usize(fam, "m")?;
    let tp = params.real(fam, "triangle_p")?;
    if m < 1 || m >= n {
        return Err(invalid(fam, format!("need 1 <= m < n, got m={m}, n={n}")));
    }
    if !(0.0..=1.0).contains(&tp) {
        return Err(bad(fam, "triangle_p", format!("probability out of [0,1]: {tp}")));
    }

    let mut b = AdjBuilder::new(n);
    // preferential pool: every node once at birth plus once per incident edge
    let mut repeated: Vec<usize> = (0..m).collect();

    let pick_pref = |rng: &mut ChaCha8Rng, repeated: &[usize], b: &AdjBuilder, src: usize| {
        for _ in 0..128 {
            let t = repeated[rng.gen_range(0..repeated.len())];
            if t != src && !b.has(src, t) {
                return Some(t);
            }
        }
        None
    };

    for source in m..n {
        let mut last = match pick_pref(rng, &repeated, &b, source) {
            Some(t) => t,
            None => continue,
        };
        b.add(source, last);
        repeated.push(last);
        let mut count = 1;
        while count < m {
            if rng.gen_bool(tp) {
                // triad step: close a triangle through the last target
                let candidates: Vec<usize> = b.adj[last]
                    .iter()
                    .copied()
                    .filter(|&w| w != source && !b.has(source, w))
                    .collect();
                if !candidates.is_empty() {
                    let w = candidates[rng.gen_range(0..candidates.len())];
                    b.add(source, w);
                    repeated.push(w);
                    count += 1;
                    continue;
                }
            }
            match pick_pref(rng, &repeated, &b, source) {
                Some(t) => {
                    b.add(source, t);
                    repeated.push(t);
                    last = t;
                    count += 1;
                }
                None => break,
            }
        }
        repeated.extend(std::iter::repeat(source).take(m));
    }
    Ok(b.into_graph())
}

/// Calibrate the triad-formation probability against a measured mean local
/// clustering on probe graphs, bisecting towards one of the target
/// coefficients {0.35, 0.45, 0.55}.
pub(super) fn sample_powerlaw_cluster(profile: &SizeProfile, rng: &mut ChaCha8Rng) -> Params {
    let n = profile.sample_n(rng).max(8);
    let m = rng.gen_range(2..=3usize.min(n / 2).max(2));
    let target = [0.35, 0.45, 0.55][rng.gen_range(0..3)];
    let probe_n = n.min(400);
    let probe_seed: u64 = rng.gen();

    let measure = |tp: f64| -> f64 {
        let mut params = Params::new();
        params.set_int("n", probe_n as i64);
        params.set_int("m", m as i64);
        params.set_real("triangle_p", tp);
        let mut probe_rng = rand::SeedableRng::seed_from_u64(probe_seed);
        let g = powerlaw_cluster(GeneratorFamily::PowerlawCluster, &params, &mut probe_rng)
            .expect("probe parameters are valid");
        average_clustering(&g)
    };

    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..8 {
        let mid = 0.5 * (lo + hi);
        if measure(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tp = 0.5 * (lo + hi);

    let mut params = Params::new();
    params.set_int("n", n as i64);
    params.set_int("m", m as i64);
    params.set_real("triangle_p", tp);
    params
}

// ---------------------------------------------------------------------------
// Duplication divergence

/// Partial duplication: a new node copies a random anchor's edges, keeping
/// each with probability `sigma`; attempts that retain nothing are
/// discarded and redrawn.
pub(super) fn duplication_divergence(
    fam: GeneratorFamily,
    params: &Params,
    rng: &mut ChaCha8Rng,
) -> Result<Graph, GeneratorError> {
    let n = params.usize(fam, "n")?;
    let sigma = params.real(fam, "sigma")?;
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(bad(fam, "sigma", format!("retention must be in (0,1), got {sigma}")));
    }
    if n < 2 {
        return Err(invalid(fam, "need n >= 2"));
    }
    let mut b = AdjBuilder::new(n);
    b.add(0, 1);
    let mut alive = 2;
    while alive < n {
        let new = alive;
        let mut attached = false;
        for _attempt in 0..10_000 {
            let anchor = rng.gen_range(0..alive);
            let kept: Vec<usize> = b.adj[anchor]
                .iter()
                .copied()
                .filter(|_| rng.gen_bool(sigma))
                .collect();
            if !kept.is_empty() {
                for w in kept {
                    b.add(new, w);
                }
                attached = true;
                break;
            }
        }
        if !attached {
            // overwhelmingly unlikely; keep the node reachable anyway
            b.add(new, rng.gen_range(0..alive));
        }
        alive += 1;
    }
    Ok(b.into_graph())
}

pub(super) fn sample_duplication_divergence(
    profile: &SizeProfile,
    rng: &mut ChaCha8Rng,
) -> Params {
    let n = profile.sample_n(rng);
    let inv_e = (-1.0f64).exp();
    let margin = 1e-3;
    let (lo, hi) = match rng.gen_range(0..3u8) {
        0 => (margin, inv_e - margin),          // self-averaging
        1 => (inv_e + margin, 0.5 - margin),    // self-averaging
        _ => (0.5 + margin, 1.0 - margin),      // non-self-averaging
    };
    let sigma = rng.gen_range(lo..hi);
    let mut params = Params::new();
    params.set_int("n", n as i64);
    params.set_real("sigma", sigma);
    params
}

// ---------------------------------------------------------------------------
// Gaussian random partition

/// Group sizes are Gaussian around `group_size_mean` (variance 10); edges
/// are Bernoulli with intra-group probability `p` and inter-group `q`.
pub(super) fn gaussian_partition(
    fam: GeneratorFamily,
    params: &Params,
    rng: &mut ChaCha8Rng,
) -> Result<Graph, GeneratorError> {
    let n = params.usize(fam, "n")?;
    let s = params.real(fam, "group_size_mean")?;
    let p = params.real(fam, "p")?;
    let q = params.real(fam, "q")?;
    for (key, v) in [("p", p), ("q", q)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(bad(fam, key, format!("probability out of [0,1]: {v}")));
        }
    }
    if s < 1.0 {
        return Err(bad(fam, "group_size_mean", "mean group size must be >= 1"));
    }

    let normal = Normal::new(s, GAUSSIAN_PARTITION_VARIANCE.sqrt()).expect("std is finite");
    let mut membership = Vec::with_capacity(n);
    let mut group = 0usize;
    while membership.len() < n {
        let size = normal.sample(rng).round().max(1.0) as usize;
        for _ in 0..size.min(n - membership.len()) {
            membership.push(group);
        }
        group += 1;
    }

    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let prob = if membership[u] == membership[v] { p } else { q };
            if prob > 0.0 && rng.gen_bool(prob) {
                edges.push((u, v));
            }
        }
    }
    Ok(Graph::from_edges(&edges, Some(n))?)
}

/// Fixed group-size variance (v) of the partition model.
pub const GAUSSIAN_PARTITION_VARIANCE: f64 = 10.0;
/// Over-attractiveness (κ): how far intra-group density may exceed
/// inter-group density.
pub const GAUSSIAN_PARTITION_KAPPA: f64 = 5.0;

/// `q` saturates the edge budget
/// `q = min(1, 2|E_max| / (|V|² + |V|(κ·√s − s(κ+1))))` and
/// `p = min(1, κ·q)`.
pub(super) fn sample_gaussian_partition(profile: &SizeProfile, rng: &mut ChaCha8Rng) -> Params {
    let n = profile.sample_n(rng).max(16);
    let nf = n as f64;
    let kappa = GAUSSIAN_PARTITION_KAPPA;
    let s = rng.gen_range((nf / 20.0).max(3.0)..=(nf / 8.0).max(4.0));
    let mean_degree = rng.gen_range(4.0..14.0);
    let e_max = (nf * mean_degree / 2.0).min(nf * (nf - 1.0) / 2.0);
    let denom = nf * nf + nf * (kappa * s.sqrt() - s * (kappa + 1.0));
    let q = if denom > 0.0 {
        (2.0 * e_max / denom).min(1.0).max(0.0)
    } else {
        1.0
    };
    let p = (kappa * q).min(1.0);
    let mut params = Params::new();
    params.set_int("n", n as i64);
    params.set_real("group_size_mean", s);
    params.set_real("p", p);
    params.set_real("q", q);
    params
}

// ---------------------------------------------------------------------------
// Forest fire

/// Leskovec-style growth: each new node picks an ambassador and "burns"
/// through its out- and in-links with geometric fanouts, linking to every
/// burned node. Built directed, returned undirected.
pub(super) fn forest_fire(
    fam: GeneratorFamily,
    params: &Params,
    rng: &mut ChaCha8Rng,
) -> Result<Graph, GeneratorError> {
    let n = params.usize(fam, "n")?;
    let p_f = params.real(fam, "p_forward")?;
    let p_b = params.real(fam, "p_backward")?;
    for (key, v) in [("p_forward", p_f), ("p_backward", p_b)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(bad(fam, key, format!("probability out of [0,1]: {v}")));
        }
    }
    if n == 0 {
        return Err(invalid(fam, "need n >= 1"));
    }

    let mut out_adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut in_adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];

    for v in 1..n {
        let ambassador = rng.gen_range(0..v);
        let mut visited: BTreeSet<usize> = BTreeSet::new();
        visited.insert(ambassador);
        let mut burned = vec![ambassador];
        let mut queue = std::collections::VecDeque::from([ambassador]);
        while let Some(x) = queue.pop_front() {
            let n_fwd = geometric_failures(rng, p_f);
            let n_bwd = geometric_failures(rng, p_b);
            for (want, pool) in [(n_fwd, &out_adj[x]), (n_bwd, &in_adj[x])] {
                let mut candidates: Vec<usize> =
                    pool.iter().copied().filter(|y| !visited.contains(y)).collect();
                for y in choose_distinct(rng, &mut candidates, want) {
                    visited.insert(y);
                    burned.push(y);
                    queue.push_back(y);
                }
            }
        }
        for y in burned {
            out_adj[v].insert(y);
            in_adj[y].insert(v);
        }
    }

    let mut edges = Vec::new();
    for (u, outs) in out_adj.iter().enumerate() {
        for &v in outs {
            edges.push((u, v));
        }
    }
    Ok(Graph::from_edges(&edges, Some(n))?)
}

pub(super) fn sample_forest_fire(profile: &SizeProfile, rng: &mut ChaCha8Rng) -> Params {
    let n = profile.sample_n(rng);
    let mut params = Params::new();
    params.set_int("n", n as i64);
    params.set_real("p_forward", rng.gen_range(0.0..=0.4));
    params.set_real("p_backward", rng.gen_range(0.0..=0.4));
    params
}

// ---------------------------------------------------------------------------
// Random geometric

/// Unit-ball volume in `dim` dimensions, for radius calibration.
fn unit_ball_volume(dim: usize) -> f64 {
    use std::f64::consts::PI;
    match dim {
        2 => PI,
        3 => 4.0 * PI / 3.0,
        4 => PI * PI / 2.0,
        5 => 8.0 * PI * PI / 15.0,
        _ => unreachable!("dimension validated to 2..=5"),
    }
}

pub(super) fn random_geometric(
    fam: GeneratorFamily,
    params: &Params,
    rng: &mut ChaCha8Rng,
) -> Result<Graph, GeneratorError> {
    let n = params.usize(fam, "n")?;
    let dim = params.usize(fam, "dim")?;
    let radius = params.real(fam, "radius")?;
    if !(2..=5).contains(&dim) {
        return Err(bad(fam, "dim", format!("hypercube dimension must be 2..=5, got {dim}")));
    }
    if radius <= 0.0 {
        return Err(bad(fam, "radius", "radius must be positive"));
    }

    let points: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dim).map(|_| rng.gen::<f64>()).collect())
        .collect();
    let r2 = radius * radius;
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let d2: f64 = points[u]
                .iter()
                .zip(&points[v])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            if d2 < r2 {
                edges.push((u, v));
            }
        }
    }
    Ok(Graph::from_edges(&edges, Some(n))?)
}

pub(super) fn sample_random_geometric(profile: &SizeProfile, rng: &mut ChaCha8Rng) -> Params {
    let n = profile.sample_n(rng).max(8);
    let dim = rng.gen_range(2..=5usize);
    let mean_degree = rng.gen_range(4.0..12.0);
    let radius = (mean_degree / ((n as f64 - 1.0) * unit_ball_volume(dim)))
        .powf(1.0 / dim as f64)
        .min(1.0);
    let mut params = Params::new();
    params.set_int("n", n as i64);
    params.set_int("dim", dim as i64);
    params.set_real("radius", radius);
    params
}

// ---------------------------------------------------------------------------
// 3D geometric with duplication divergence

/// Points live in the unit cube. Each new node duplicates a random
/// anchor's position with Gaussian jitter, retains each anchor edge with
/// probability `sigma`, and additionally links to everything within
/// `radius`. Nodes that end up isolated fall back to their anchor.
pub(super) fn geometric_3d_dd(
    fam: GeneratorFamily,
    params: &Params,
    rng: &mut ChaCha8Rng,
) -> Result<Graph, GeneratorError> {
    let n = params.usize(fam, "n")?;
    let sigma = params.real(fam, "sigma")?;
    let jitter = params.real(fam, "jitter")?;
    let radius = params.real(fam, "radius")?;
    if !(0.0..=1.0).contains(&sigma) {
        return Err(bad(fam, "sigma", format!("retention out of [0,1]: {sigma}")));
    }
    if jitter <= 0.0 || radius <= 0.0 {
        return Err(bad(fam, "jitter", "jitter and radius must be positive"));
    }
    if n < 2 {
        return Err(invalid(fam, "need n >= 2"));
    }

    let noise = Normal::new(0.0, jitter).expect("jitter is finite");
    let mut pos: Vec<[f64; 3]> = Vec::with_capacity(n);
    pos.push([rng.gen(), rng.gen(), rng.gen()]);
    pos.push([rng.gen(), rng.gen(), rng.gen()]);
    let mut b = AdjBuilder::new(n);
    b.add(0, 1);

    let r2 = radius * radius;
    for new in 2..n {
        let anchor = rng.gen_range(0..new);
        let mut point = pos[anchor];
        for c in &mut point {
            *c = (*c + noise.sample(rng)).clamp(0.0, 1.0);
        }
        pos.push(point);
        let kept: Vec<usize> = b.adj[anchor]
            .iter()
            .copied()
            .filter(|_| rng.gen_bool(sigma))
            .collect();
        for w in kept {
            b.add(new, w);
        }
        for w in 0..new {
            let d2: f64 = point
                .iter()
                .zip(&pos[w])
                .map(|(a, c)| (a - c) * (a - c))
                .sum();
            if d2 < r2 {
                b.add(new, w);
            }
        }
        if b.degree(new) == 0 {
            b.add(new, anchor);
        }
    }
    Ok(b.into_graph())
}

pub(super) fn sample_geometric_3d_dd(profile: &SizeProfile, rng: &mut ChaCha8Rng) -> Params {
    let n = profile.sample_n(rng).max(8);
    let sigma = rng.gen_range(0.3..0.7);
    let jitter = rng.gen_range(0.05..0.2);
    let mean_degree = rng.gen_range(3.0..8.0);
    let radius = (mean_degree / ((n as f64 - 1.0) * unit_ball_volume(3)))
        .powf(1.0 / 3.0)
        .min(1.0);
    let mut params = Params::new();
    params.set_int("n", n as i64);
    params.set_real("sigma", sigma);
    params.set_real("jitter", jitter);
    params.set_real("radius", radius);
    params
}

// ---------------------------------------------------------------------------
// Random regular

/// Stub pairing with full restarts on collision; every node gets degree
/// exactly `d`.
pub(super) fn random_regular(
    fam: GeneratorFamily,
    params: &Params,
    rng: &mut ChaCha8Rng,
) -> Result<Graph, GeneratorError> {
    let n = params.usize(fam, "n")?;
    let d = params.usize(fam, "d")?;
    if d >= n {
        return Err(invalid(fam, format!("degree d = {d} must be below n = {n}")));
    }
    if (n * d) % 2 != 0 {
        return Err(invalid(fam, format!("n·d must be even, got n={n}, d={d}")));
    }
    if d == 0 {
        return Ok(Graph::empty(n));
    }

    // Progressive pairing: shuffle the open stubs, keep every pair that
    // stays simple, re-pair the leftovers; restart from scratch only when
    // the leftovers cannot be matched at all.
    const ATTEMPTS: usize = 500;
    for _ in 0..ATTEMPTS {
        let mut seen: std::collections::HashSet<(usize, usize)> =
            std::collections::HashSet::with_capacity(n * d / 2);
        let mut edges: Vec<(usize, usize)> = Vec::with_capacity(n * d / 2);
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(d)).collect();
        while !stubs.is_empty() {
            for i in (1..stubs.len()).rev() {
                let j = rng.gen_range(0..=i);
                stubs.swap(i, j);
            }
            let mut leftover: std::collections::BTreeMap<usize, usize> =
                std::collections::BTreeMap::new();
            for pair in stubs.chunks_exact(2) {
                let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
                if u != v && seen.insert((u, v)) {
                    edges.push((u, v));
                } else {
                    *leftover.entry(u).or_insert(0) += 1;
                    *leftover.entry(v).or_insert(0) += 1;
                }
            }
            let suitable = leftover.is_empty()
                || leftover.keys().any(|&u| {
                    leftover
                        .keys()
                        .any(|&v| u < v && !seen.contains(&(u, v)))
                });
            if !suitable {
                break; // dead end, restart the whole pairing
            }
            stubs = leftover
                .into_iter()
                .flat_map(|(v, count)| std::iter::repeat(v).take(count))
                .collect();
        }
        if stubs.is_empty() {
            return Ok(Graph::from_edges(&edges, Some(n))?);
        }
    }
    Err(invalid(
        fam,
        format!("failed to realize a {d}-regular graph on {n} nodes after {ATTEMPTS} attempts"),
    ))
}

pub(super) fn sample_random_regular(profile: &SizeProfile, rng: &mut ChaCha8Rng) -> Params {
    let n = profile.sample_n(rng).max(10);
    let d_max = 8.min(n - 1);
    let d = if n % 2 == 0 {
        rng.gen_range(3..=d_max)
    } else {
        // parity: n odd needs even d
        2 * rng.gen_range(2..=(d_max / 2).max(2))
    };
    let mut params = Params::new();
    params.set_int("n", n as i64);
    params.set_int("d", d as i64);
    params
}
