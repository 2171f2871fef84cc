//! The 12 deterministic constructions. Each is fully determined by its
//! parameters; variability comes from the optional rewiring perturbation
//! applied by `generate` on top.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;

use super::{GeneratorError, GeneratorFamily, Params, SizeProfile};

fn bad(family: GeneratorFamily, key: &str, msg: impl Into<String>) -> GeneratorError {
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

fn build(edges: Vec<(usize, usize)>, n: usize) -> Result<Graph, GeneratorError> {
    Ok(Graph::from_edges(&edges, Some(n))?)
}

// ---------------------------------------------------------------------------
// Trees

/// Every internal node has exactly `r` children, down to depth `h`.
pub(super) fn balanced_tree(
    fam: GeneratorFamily,
    params: &Params,
) -> Result<Graph, GeneratorError> {
    let r = params.usize(fam, "r")?;
    let h = params.usize(fam, "h")?;
    if r < 2 {
        return Err(bad(fam, "r", "branching factor must be >= 2"));
    }
    let n = balanced_tree_nodes(r, h);
    let mut edges = Vec::with_capacity(n - 1);
    for child in 1..n {
        edges.push(((child - 1) / r, child));
    }
    build(edges, n)
}

fn balanced_tree_nodes(r: usize, h: usize) -> usize {
    // (r^(h+1) - 1) / (r - 1)
    let mut total = 1usize;
    let mut level = 1usize;
    for _ in 0..h {
        level *= r;
        total += level;
    }
    total
}

pub(super) fn sample_balanced_tree(profile: &SizeProfile, rng: &mut ChaCha8Rng) -> Params {
    let mut feasible = Vec::new();
    for r in 2..=4usize {
        for h in 1..=11usize {
            let n = balanced_tree_nodes(r, h);
            if n > profile.n_max {
                break;
            }
            if n >= profile.n_min {
                feasible.push((r, h));
            }
        }
    }
    let (r, h) = if feasible.is_empty() {
        // fall back to the largest tree that still fits
        let mut best = (2, 1);
        for r in 2..=4usize {
            for h in 1..=11usize {
                let n = balanced_tree_nodes(r, h);
                if n <= profile.n_max && n > balanced_tree_nodes(best.0, best.1) {
                    best = (r, h);
                }
            }
        }
        best
    } else {
        feasible[rng.gen_range(0..feasible.len())]
    };
    let mut params = Params::new();
    params.set_int("r", r as i64);
    params.set_int("h", h as i64);
    params
}

/// Binomial tree of the given order: 2^order nodes, built by linking the
/// roots of two copies of the previous order.
pub(super) fn binomial_tree(
    fam: GeneratorFamily,
    params: &Params,
) -> Result<Graph, GeneratorError> {
    let order = params.usize(fam, "order")?;
    if order > 20 {
        return Err(bad(fam, "order", "order above 20 is past any desk scale"));
    }
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut size = 1usize;
    for _ in 0..order {
        let shifted: Vec<(usize, usize)> =
            edges.iter().map(|&(u, v)| (u + size, v + size)).collect();
        edges.extend(shifted);
        edges.push((0, size));
        size *= 2;
    }
    build(edges, size)
}

pub(super) fn sample_binomial_tree(profile: &SizeProfile, rng: &mut ChaCha8Rng) -> Params {
    let mut feasible: Vec<usize> = (1..=16)
        .filter(|&k| {
            let n = 1usize << k;
            n >= profile.n_min && n <= profile.n_max
        })
        .collect();
    if feasible.is_empty() {
        let k = (usize::BITS - 1 - profile.n_max.leading_zeros()) as usize;
        feasible.push(k.max(1));
    }
    let order = feasible[rng.gen_range(0..feasible.len())];
    let mut params = Params::new();
    params.set_int("order", order as i64);
    params
}

/// `n` nodes filled level by level, each node with `r` children.
pub(super) fn full_rary_tree(
    fam: GeneratorFamily,
    params: &Params,
) -> Result<Graph, GeneratorError> {
    let r = params.usize(fam, "r")?;
    let n = params.usize(fam, "n")?;
    if r < 1 {
        return Err(bad(fam, "r", "branching factor must be >= 1"));
    }
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for child in 1..n {
        edges.push(((child - 1) / r, child));
    }
    build(edges, n.max(1))
}

pub(super) fn sample_full_rary_tree(profile: &SizeProfile, rng: &mut ChaCha8Rng) -> Params {
    let mut params = Params::new();
    params.set_int("r", rng.gen_range(2..=5) as i64);
    params.set_int("n", profile.sample_n(rng) as i64);
    params
}

// ---------------------------------------------------------------------------
// Modified cycles

/// Two concentric k-cycles joined by rungs; 3-regular on 2k nodes.
pub(super) fn circular_ladder(
    fam: GeneratorFamily,
    params: &Params,
) -> Result<Graph, GeneratorError> {
    let k = params.usize(fam, "k")?;
    if k < 3 {
        return Err(bad(fam, "k", "cycle length must be >= 3"));
    }
    let mut edges = Vec::with_capacity(3 * k);
    for i in 0..k {
        edges.push((i, (i + 1) % k));
        edges.push((k + i, k + (i + 1) % k));
        edges.push((i, k + i));
    }
    build(edges, 2 * k)
}

pub(super) fn sample_circular_ladder(profile: &SizeProfile, rng: &mut ChaCha8Rng) -> Params {
    let k_min = (profile.n_min / 2).max(3);
    let k_max = (profile.n_max / 2).max(k_min);
    let mut params = Params::new();
    params.set_int("k", rng.gen_range(k_min..=k_max) as i64);
    params
}

fn is_prime(p: usize) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn modpow(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc = 1u64;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % modulus;
        }
        base = base * base % modulus;
        exp >>= 1;
    }
    acc
}

/// Cycle on a prime `p` of nodes plus chords joining each `x` to its
/// multiplicative inverse mod `p`; self-inverse chords are dropped.
pub(super) fn chordal_cycle(
    fam: GeneratorFamily,
    params: &Params,
) -> Result<Graph, GeneratorError> {
    let p = params.usize(fam, "p")?;
    if !is_prime(p) || p < 3 {
        return Err(bad(fam, "p", format!("need a prime >= 3, got {p}")));
    }
    let mut edges = Vec::new();
    for x in 0..p {
        edges.push((x, (x + 1) % p));
    }
    for x in 1..p {
        let inv = modpow(x as u64, (p - 2) as u64, p as u64) as usize;
        if inv != x {
            edges.push((x.min(inv), x.max(inv)));
        }
    }
    build(edges, p)
}

pub(super) fn sample_chordal_cycle(profile: &SizeProfile, rng: &mut ChaCha8Rng) -> Params {
    let draw = rng.gen_range(profile.n_min.max(3)..=profile.n_max);
    // nearest prime at or below the draw, else at or below n_max
    let p = (3..=draw)
        .rev()
        .find(|&x| is_prime(x))
        .unwrap_or(3);
    let mut params = Params::new();
    params.set_int("p", p as i64);
    params
}

// ---------------------------------------------------------------------------
// Complete-graph based

/// Two k-cliques joined through a path of `path_len` extra nodes
/// (`path_len = 0` joins them by a single edge).
pub(super) fn barbell(fam: GeneratorFamily, params: &Params) -> Result<Graph, GeneratorError> {
    let k = params.usize(fam, "k")?;
    let path_len = params.usize(fam, "path_len")?;
    if k < 3 {
        return Err(bad(fam, "k", "clique size must be >= 3"));
    }
    let n = 2 * k + path_len;
    let mut edges = Vec::new();
    for u in 0..k {
        for v in (u + 1)..k {
            edges.push((u, v));
        }
    }
    let second = k + path_len;
    for u in second..n {
        for v in (u + 1)..n {
            edges.push((u, v));
        }
    }
    // bridge: clique A exit node, the path, clique B entry node
    let mut prev = k - 1;
    for step in 0..path_len {
        edges.push((prev, k + step));
        prev = k + step;
    }
    edges.push((prev, second));
    build(edges, n)
}

pub(super) fn sample_barbell(profile: &SizeProfile, rng: &mut ChaCha8Rng) -> Params {
    let k_max = 12.min(profile.n_max / 2 - 1).max(3);
    let k = rng.gen_range(3..=k_max);
    let path_hi = profile.n_max - 2 * k;
    let path_lo = profile.n_min.saturating_sub(2 * k).min(path_hi);
    let mut params = Params::new();
    params.set_int("k", k as i64);
    params.set_int("path_len", rng.gen_range(path_lo..=path_hi) as i64);
    params
}

/// One k-clique with a path of `path_len` nodes hanging off it.
pub(super) fn lollipop(fam: GeneratorFamily, params: &Params) -> Result<Graph, GeneratorError> {
    let k = params.usize(fam, "k")?;
    let path_len = params.usize(fam, "path_len")?;
    if k < 3 {
        return Err(bad(fam, "k", "clique size must be >= 3"));
    }
    if path_len < 1 {
        return Err(bad(fam, "path_len", "path must have at least one node"));
    }
    let n = k + path_len;
    let mut edges = Vec::new();
    for u in 0..k {
        for v in (u + 1)..k {
            edges.push((u, v));
        }
    }
    let mut prev = k - 1;
    for step in 0..path_len {
        edges.push((prev, k + step));
        prev = k + step;
    }
    build(edges, n)
}

pub(super) fn sample_lollipop(profile: &SizeProfile, rng: &mut ChaCha8Rng) -> Params {
    let k_max = 12.min(profile.n_max.saturating_sub(1)).max(3);
    let k = rng.gen_range(3..=k_max);
    let path_hi = (profile.n_max - k).max(1);
    let path_lo = profile.n_min.saturating_sub(k).max(1).min(path_hi);
    let mut params = Params::new();
    params.set_int("k", k as i64);
    params.set_int("path_len", rng.gen_range(path_lo..=path_hi) as i64);
    params
}

// ---------------------------------------------------------------------------
// Dorogovtsev–Goltsev–Mendes

/// Start from a triangle; at each step every edge sprouts a new node
/// joined to both its endpoints. After `n` steps: `3(3^n + 1)/2` nodes and
/// `3^(n+1)` edges.
pub(super) fn dgm(fam: GeneratorFamily, params: &Params) -> Result<Graph, GeneratorError> {
    let steps = params.usize(fam, "n")?;
    if steps > 8 {
        return Err(bad(fam, "n", "more than 8 steps is past any desk scale"));
    }
    let mut edges = vec![(0usize, 1usize), (1, 2), (0, 2)];
    let mut next = 3usize;
    for _ in 0..steps {
        let snapshot = edges.clone();
        for (u, v) in snapshot {
            edges.push((u, next));
            edges.push((v, next));
            next += 1;
        }
    }
    build(edges, next)
}

pub(super) fn sample_dgm(profile: &SizeProfile, rng: &mut ChaCha8Rng) -> Params {
    let nodes_at = |t: u32| 3 * (3usize.pow(t) + 1) / 2;
    let mut feasible: Vec<u32> = (1..=7)
        .filter(|&t| nodes_at(t) >= profile.n_min && nodes_at(t) <= profile.n_max)
        .collect();
    if feasible.is_empty() {
        let t = (1..=7).rev().find(|&t| nodes_at(t) <= profile.n_max).unwrap_or(1);
        feasible.push(t);
    }
    let mut params = Params::new();
    params.set_int("n", feasible[rng.gen_range(0..feasible.len())] as i64);
    params
}

// ---------------------------------------------------------------------------
// Lattices

/// 3D grid graph with the given side lengths.
pub(super) fn square_lattice(
    fam: GeneratorFamily,
    params: &Params,
) -> Result<Graph, GeneratorError> {
    let a = params.usize(fam, "a")?;
    let b = params.usize(fam, "b")?;
    let c = params.usize(fam, "c")?;
    if a < 2 || b < 2 || c < 2 {
        return Err(invalid(fam, "every dimension must be >= 2"));
    }
    let id = |x: usize, y: usize, z: usize| (x * b + y) * c + z;
    let mut edges = Vec::new();
    for x in 0..a {
        for y in 0..b {
            for z in 0..c {
                if x + 1 < a {
                    edges.push((id(x, y, z), id(x + 1, y, z)));
                }
                if y + 1 < b {
                    edges.push((id(x, y, z), id(x, y + 1, z)));
                }
                if z + 1 < c {
                    edges.push((id(x, y, z), id(x, y, z + 1)));
                }
            }
        }
    }
    build(edges, a * b * c)
}

pub(super) fn sample_square_lattice(profile: &SizeProfile, rng: &mut ChaCha8Rng) -> Params {
    let cap = ((profile.n_max as f64).cbrt().floor() as usize).max(2);
    let mut dims = [2usize; 3];
    for _ in 0..200 {
        let cand = [
            rng.gen_range(2..=cap.max(2)),
            rng.gen_range(2..=cap.max(2)),
            rng.gen_range(2..=cap.max(2)),
        ];
        let n = cand[0] * cand[1] * cand[2];
        if n <= profile.n_max {
            dims = cand;
            if n >= profile.n_min {
                break;
            }
        }
    }
    let mut params = Params::new();
    params.set_int("a", dims[0] as i64);
    params.set_int("b", dims[1] as i64);
    params.set_int("c", dims[2] as i64);
    params
}

/// Honeycomb in brick-wall coordinates: full horizontal rows, vertical
/// bonds where row+column parity is even, boundary stubs trimmed. With
/// `periodic` the lattice closes onto a torus and is exactly 3-regular
/// (requires even `rows >= 2`).
pub(super) fn hexagonal_lattice(
    fam: GeneratorFamily,
    params: &Params,
) -> Result<Graph, GeneratorError> {
    let rows = params.usize(fam, "rows")?;
    let cols = params.usize(fam, "cols")?;
    let periodic = params.flag_or("periodic", false);
    if rows < 1 || cols < 1 {
        return Err(invalid(fam, "need at least one row and column of hexagons"));
    }

    if periodic {
        if rows % 2 != 0 || rows < 2 || cols < 2 {
            return Err(invalid(
                fam,
                "periodic honeycomb needs even rows >= 2 and cols >= 2",
            ));
        }
        let (nr, nc) = (rows, 2 * cols);
        let id = |i: usize, j: usize| i * nc + j;
        let mut edges = Vec::new();
        for i in 0..nr {
            for j in 0..nc {
                edges.push((id(i, j), id(i, (j + 1) % nc)));
                if (i + j) % 2 == 0 {
                    edges.push((id(i, j), id((i + 1) % nr, j)));
                }
            }
        }
        return build(edges, nr * nc);
    }

    let nr = rows + 1;
    let nc = if rows == 1 { 2 * cols + 1 } else { 2 * cols + 2 };
    let id = |i: usize, j: usize| i * nc + j;
    let mut adj = vec![Vec::new(); nr * nc];
    let push = |adj: &mut Vec<Vec<usize>>, u: usize, v: usize| {
        adj[u].push(v);
        adj[v].push(u);
    };
    for i in 0..nr {
        for j in 0..nc {
            if j + 1 < nc {
                push(&mut adj, id(i, j), id(i, j + 1));
            }
            if i + 1 < nr && (i + j) % 2 == 0 {
                push(&mut adj, id(i, j), id(i + 1, j));
            }
        }
    }
    trim_and_build(fam, adj)
}

/// Drop degree <= 1 nodes (cascading), relabel the rest compactly.
fn trim_and_build(
    fam: GeneratorFamily,
    adj: Vec<Vec<usize>>,
) -> Result<Graph, GeneratorError> {
    let n = adj.len();
    let mut alive = vec![true; n];
    loop {
        let mut changed = false;
        for v in 0..n {
            if alive[v] && adj[v].iter().filter(|&&u| alive[u]).count() <= 1 {
                alive[v] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut relabel = vec![usize::MAX; n];
    let mut next = 0usize;
    for v in 0..n {
        if alive[v] {
            relabel[v] = next;
            next += 1;
        }
    }
    if next == 0 {
        return Err(invalid(fam, "lattice collapsed after trimming"));
    }
    let mut edges = Vec::new();
    for v in 0..n {
        if !alive[v] {
            continue;
        }
        for &u in &adj[v] {
            if alive[u] && v < u {
                edges.push((relabel[v], relabel[u]));
            }
        }
    }
    build(edges, next)
}

pub(super) fn sample_hexagonal_lattice(profile: &SizeProfile, rng: &mut ChaCha8Rng) -> Params {
    // node count is about (rows+1)(2*cols+2)
    let mut rows = 1usize;
    let mut cols = 1usize;
    for _ in 0..200 {
        let r = rng.gen_range(1..=((profile.n_max / 4).max(1)).min(40));
        let c = rng.gen_range(1..=((profile.n_max / 4).max(1)).min(40));
        let approx = (r + 1) * (2 * c + 2);
        if approx <= profile.n_max {
            rows = r;
            cols = c;
            if approx >= profile.n_min {
                break;
            }
        }
    }
    let mut params = Params::new();
    params.set_int("rows", rows as i64);
    params.set_int("cols", cols as i64);
    params.set_flag("periodic", false);
    params
}

/// Square grid with one consistent diagonal per cell, so every internal
/// face is a triangle. `periodic` closes both directions (needs both sides
/// >= 3) and makes the lattice 6-regular.
pub(super) fn triangular_lattice(
    fam: GeneratorFamily,
    params: &Params,
) -> Result<Graph, GeneratorError> {
    let rows = params.usize(fam, "rows")?;
    let cols = params.usize(fam, "cols")?;
    let periodic = params.flag_or("periodic", false);
    if rows < 1 || cols < 1 {
        return Err(invalid(fam, "need at least one cell in each direction"));
    }

    if periodic {
        if rows < 3 || cols < 3 {
            return Err(invalid(fam, "periodic triangular lattice needs sides >= 3"));
        }
        let id = |i: usize, j: usize| i * cols + j;
        let mut edges = Vec::new();
        for i in 0..rows {
            for j in 0..cols {
                edges.push((id(i, j), id(i, (j + 1) % cols)));
                edges.push((id(i, j), id((i + 1) % rows, j)));
                edges.push((id(i, j), id((i + 1) % rows, (j + 1) % cols)));
            }
        }
        return build(edges, rows * cols);
    }

    let (nr, nc) = (rows + 1, cols + 1);
    let id = |i: usize, j: usize| i * nc + j;
    let mut edges = Vec::new();
    for i in 0..nr {
        for j in 0..nc {
            if j + 1 < nc {
                edges.push((id(i, j), id(i, j + 1)));
            }
            if i + 1 < nr {
                edges.push((id(i, j), id(i + 1, j)));
            }
            if i + 1 < nr && j + 1 < nc {
                edges.push((id(i, j), id(i + 1, j + 1)));
            }
        }
    }
    build(edges, nr * nc)
}

pub(super) fn sample_triangular_lattice(profile: &SizeProfile, rng: &mut ChaCha8Rng) -> Params {
    let cap = ((profile.n_max as f64).sqrt().floor() as usize).saturating_sub(1).max(1);
    let mut rows = 1usize;
    let mut cols = 1usize;
    for _ in 0..200 {
        let r = rng.gen_range(1..=cap);
        let c = rng.gen_range(1..=cap);
        let n = (r + 1) * (c + 1);
        if n <= profile.n_max {
            rows = r;
            cols = c;
            if n >= profile.n_min {
                break;
            }
        }
    }
    let mut params = Params::new();
    params.set_int("rows", rows as i64);
    params.set_int("cols", cols as i64);
    params.set_flag("periodic", false);
    params
}

// ---------------------------------------------------------------------------
// Star

pub(super) fn star(fam: GeneratorFamily, params: &Params) -> Result<Graph, GeneratorError> {
    let k = params.usize(fam, "k")?;
    if k < 1 {
        return Err(bad(fam, "k", "need at least one leaf"));
    }
    let edges: Vec<(usize, usize)> = (1..=k).map(|leaf| (0, leaf)).collect();
    build(edges, k + 1)
}

pub(super) fn sample_star(profile: &SizeProfile, rng: &mut ChaCha8Rng) -> Params {
    let n = profile.sample_n(rng);
    let mut params = Params::new();
    params.set_int("k", (n - 1) as i64);
    params
}
