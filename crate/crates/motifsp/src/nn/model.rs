//! Forward pass, exact reverse-mode gradients, and the finite-difference
//! harness that keeps them honest.
//!
//! Node embeddings are flat row-major buffers (`n × dim`). The forward
//! pass caches every pre-activation, aggregation and dropout mask it
//! produces, so the backward pass can replay the computation exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;

use super::{DenseSlot, GnnSlot, JumpingKnowledge, Layout, ModelParams};

/// `out[v] = x[v]·W + b` for row-major `W: in_dim × out_dim`.
fn dense_forward(x: &[f64], n: usize, w: &[f64], b: &[f64], in_dim: usize, out_dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * out_dim];
    for v in 0..n {
        let row = &x[v * in_dim..(v + 1) * in_dim];
        let dst = &mut out[v * out_dim..(v + 1) * out_dim];
        dst.copy_from_slice(b);
        for (r, &xr) in row.iter().enumerate() {
            if xr == 0.0 {
                continue;
            }
            let wrow = &w[r * out_dim..(r + 1) * out_dim];
            for (c, &wc) in wrow.iter().enumerate() {
                dst[c] += xr * wc;
            }
        }
    }
    out
}

fn relu(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| if v > 0.0 { v } else { 0.0 }).collect()
}

/// Multiply elementwise by the ReLU mask of pre-activations `z`.
fn relu_backward(dout: &mut [f64], z: &[f64]) {
    for (d, &zv) in dout.iter_mut().zip(z.iter()) {
        if zv <= 0.0 {
            *d = 0.0;
        }
    }
}

/// Inverted-dropout mask: kept entries carry `1/(1−p)`, dropped are 0.
fn sample_mask(rng: &mut ChaCha8Rng, len: usize, p: f64) -> Vec<f64> {
    let scale = 1.0 / (1.0 - p);
    (0..len)
        .map(|_| if rng.gen_bool(p) { 0.0 } else { scale })
        .collect()
}

fn apply_mask(x: &mut [f64], mask: &[f64]) {
    for (v, m) in x.iter_mut().zip(mask.iter()) {
        *v *= m;
    }
}

struct GnnLayerCache {
    input: Vec<f64>,    // n × in_dim
    agg: Vec<f64>,      // GIN: (1+eps)h + Σ nbrs; SAGE: neighbour mean
    z1: Vec<f64>,       // n × h
    a1: Vec<f64>,       // GIN only: relu(z1)
    z2: Vec<f64>,       // GIN only
    output: Vec<f64>,   // n × h, after activation and dropout
    mask: Option<Vec<f64>>,
    in_dim: usize,
}

struct MlpLayerCache {
    input: Vec<f64>, // 1 × in_dim
    z: Vec<f64>,     // 1 × out_dim
    mask: Option<Vec<f64>>,
}

pub(crate) struct ForwardCache {
    gnn: Vec<GnnLayerCache>,
    jk_argmax: Option<Vec<u8>>, // n × h winner layer for max-JK
    pooled: Vec<f64>,           // graph embedding after add pooling
    mlp: Vec<MlpLayerCache>,
    output: Vec<f64>,
}

/// Run the model on one graph. With `train_mode` the dropout masks are
/// drawn from `dropout_seed`; in eval mode the pass is deterministic and
/// the seed is ignored.
pub fn forward(
    params: &ModelParams,
    g: &Graph,
    train_mode: bool,
    dropout_seed: u64,
) -> Vec<f64> {
    forward_cached(params, g, train_mode, dropout_seed).output
}

pub(crate) fn forward_cached(
    params: &ModelParams,
    g: &Graph,
    train_mode: bool,
    dropout_seed: u64,
) -> ForwardCache {
    let config = &params.config;
    let layout = Layout::of(config);
    let n = g.n();
    let h = config.hidden_dim;
    let mut rng = ChaCha8Rng::seed_from_u64(dropout_seed);

    let mut features: Vec<f64> = vec![1.0; n]; // constant scalar input
    let mut in_dim = 1usize;
    let mut gnn_caches = Vec::with_capacity(config.gnn_depth);

    for slot in &layout.gnn {
        let input = features;
        let (agg, z1, a1, z2, mut output) = match slot {
            GnnSlot::Gin { eps, l1, l2 } => {
                let eps_v = params.values[*eps];
                let mut agg = vec![0.0; n * in_dim];
                for v in 0..n {
                    let dst = &mut agg[v * in_dim..(v + 1) * in_dim];
                    for (d, value) in dst.iter_mut().enumerate() {
                        *value = (1.0 + eps_v) * input[v * in_dim + d];
                    }
                    for &u in g.neighbors(v) {
                        for (d, value) in dst.iter_mut().enumerate() {
                            *value += input[u * in_dim + d];
                        }
                    }
                }
                let z1 = dense_forward(
                    &agg,
                    n,
                    &params.values[l1.w.clone()],
                    &params.values[l1.b.clone()],
                    in_dim,
                    h,
                );
                let a1 = relu(&z1);
                let z2 = dense_forward(
                    &a1,
                    n,
                    &params.values[l2.w.clone()],
                    &params.values[l2.b.clone()],
                    h,
                    h,
                );
                let out = relu(&z2);
                (agg, z1, a1, z2, out)
            }
            GnnSlot::Sage {
                w_self,
                w_neigh,
                b,
                in_dim: din,
                out_dim,
            } => {
                let mut mean = vec![0.0; n * din];
                for v in 0..n {
                    let deg = g.degree(v);
                    if deg == 0 {
                        continue;
                    }
                    let dst = &mut mean[v * din..(v + 1) * din];
                    for &u in g.neighbors(v) {
                        for (d, value) in dst.iter_mut().enumerate() {
                            *value += input[u * din + d];
                        }
                    }
                    for value in dst.iter_mut() {
                        *value /= deg as f64;
                    }
                }
                let mut z = dense_forward(
                    &input,
                    n,
                    &params.values[w_self.clone()],
                    &params.values[b.clone()],
                    *din,
                    *out_dim,
                );
                let z_neigh = dense_forward(
                    &mean,
                    n,
                    &params.values[w_neigh.clone()],
                    &vec![0.0; *out_dim],
                    *din,
                    *out_dim,
                );
                for (zv, nv) in z.iter_mut().zip(z_neigh.iter()) {
                    *zv += nv;
                }
                let out = relu(&z);
                (mean, z.clone(), Vec::new(), z, out)
            }
        };

        let mask = if train_mode && config.gnn_dropout > 0.0 {
            let m = sample_mask(&mut rng, n * h, config.gnn_dropout);
            apply_mask(&mut output, &m);
            Some(m)
        } else {
            None
        };

        features = output.clone();
        gnn_caches.push(GnnLayerCache {
            input,
            agg,
            z1,
            a1,
            z2,
            output,
            mask,
            in_dim,
        });
        in_dim = h;
    }

    // jumping knowledge over all layer outputs
    let pooled_dim = config.pooled_dim();
    let (jk, jk_argmax) = match config.jumping_knowledge {
        JumpingKnowledge::Max => {
            let mut jk = vec![f64::NEG_INFINITY; n * h];
            let mut winner = vec![0u8; n * h];
            for (l, cache) in gnn_caches.iter().enumerate() {
                for (i, &v) in cache.output.iter().enumerate() {
                    if v > jk[i] {
                        jk[i] = v;
                        winner[i] = l as u8;
                    }
                }
            }
            (jk, Some(winner))
        }
        JumpingKnowledge::Cat => {
            let mut jk = vec![0.0; n * pooled_dim];
            for (l, cache) in gnn_caches.iter().enumerate() {
                for v in 0..n {
                    jk[v * pooled_dim + l * h..v * pooled_dim + (l + 1) * h]
                        .copy_from_slice(&cache.output[v * h..(v + 1) * h]);
                }
            }
            (jk, None)
        }
    };

    // global add pooling
    let mut pooled = vec![0.0; pooled_dim];
    for v in 0..n {
        for d in 0..pooled_dim {
            pooled[d] += jk[v * pooled_dim + d];
        }
    }

    // M3 head
    let mut mlp_caches = Vec::with_capacity(config.mlp_depth);
    let mut x = pooled.clone();
    let last = layout.mlp.len() - 1;
    for (i, slot) in layout.mlp.iter().enumerate() {
        let z = dense_forward(
            &x,
            1,
            &params.values[slot.w.clone()],
            &params.values[slot.b.clone()],
            slot.in_dim,
            slot.out_dim,
        );
        let (next, mask) = if i < last {
            let mut a = relu(&z);
            let mask = if train_mode && config.mlp_dropout > 0.0 {
                let m = sample_mask(&mut rng, a.len(), config.mlp_dropout);
                apply_mask(&mut a, &m);
                Some(m)
            } else {
                None
            };
            (a, mask)
        } else {
            (z.clone(), None)
        };
        mlp_caches.push(MlpLayerCache { input: x, z, mask });
        x = next;
    }

    ForwardCache {
        gnn: gnn_caches,
        jk_argmax,
        pooled,
        mlp: mlp_caches,
        output: x,
    }
}

/// The graph embedding after jumping knowledge and add pooling (M2
/// output), in eval mode. Additive over disjoint unions.
pub fn pooled_embedding(params: &ModelParams, g: &Graph) -> Vec<f64> {
    forward_cached(params, g, false, 0).pooled
}

/// Mean squared error over the output coordinates.
pub fn loss(pred: &[f64], truth: &[f64]) -> f64 {
    assert_eq!(pred.len(), truth.len());
    pred.iter()
        .zip(truth.iter())
        .map(|(p, t)| (p - t) * (p - t))
        .sum::<f64>()
        / pred.len() as f64
}

/// Loss and exact parameter gradients for one graph.
pub struct GraphGradients {
    pub loss: f64,
    pub grad: Vec<f64>,
}

/// Forward + backward for one `(graph, target)` pair. `dropout_seed`
/// fixes the masks shared by both passes.
pub fn graph_gradient(
    params: &ModelParams,
    g: &Graph,
    target: &[f64],
    train_mode: bool,
    dropout_seed: u64,
) -> GraphGradients {
    let config = &params.config;
    let layout = Layout::of(config);
    let cache = forward_cached(params, g, train_mode, dropout_seed);
    let n = g.n();
    let h = config.hidden_dim;
    let out_dim = config.out_dim;
    assert_eq!(target.len(), out_dim, "target length must match out_dim");

    let loss_value = loss(&cache.output, target);
    let mut grad = vec![0.0; layout.total];

    // d loss / d output
    let mut dz: Vec<f64> = cache
        .output
        .iter()
        .zip(target.iter())
        .map(|(p, t)| 2.0 * (p - t) / out_dim as f64)
        .collect();

    // M3 backward
    let last = layout.mlp.len() - 1;
    for (i, slot) in layout.mlp.iter().enumerate().rev() {
        let cache_i = &cache.mlp[i];
        if i < last {
            // dz currently holds gradient wrt this layer's post-dropout
            // output; pull it back through dropout and ReLU
            if let Some(mask) = &cache_i.mask {
                apply_mask(&mut dz, mask);
            }
            relu_backward(&mut dz, &cache_i.z);
        }
        accumulate_dense(
            &mut grad,
            slot,
            &cache_i.input,
            1,
            &dz,
        );
        dz = dense_backward_input(&params.values, slot, &dz, 1);
    }
    let dpooled = dz; // gradient wrt the pooled embedding

    // pooling backward: every node's jk row receives dpooled
    let pooled_dim = config.pooled_dim();
    let mut djk = vec![0.0; n * pooled_dim];
    for v in 0..n {
        djk[v * pooled_dim..(v + 1) * pooled_dim].copy_from_slice(&dpooled);
    }

    // jumping-knowledge backward: route into per-layer output gradients
    let mut dout_layers: Vec<Vec<f64>> = vec![vec![0.0; n * h]; config.gnn_depth];
    match config.jumping_knowledge {
        JumpingKnowledge::Max => {
            let winner = cache.jk_argmax.as_ref().expect("max-JK caches winners");
            for i in 0..n * h {
                dout_layers[winner[i] as usize][i] += djk[i];
            }
        }
        JumpingKnowledge::Cat => {
            for v in 0..n {
                for (l, dout) in dout_layers.iter_mut().enumerate() {
                    dout[v * h..(v + 1) * h].copy_from_slice(
                        &djk[v * pooled_dim + l * h..v * pooled_dim + (l + 1) * h],
                    );
                }
            }
        }
    }

    // GNN backward, top layer first; dh_carry is the gradient wrt the
    // layer's input, which is the previous layer's output
    let mut dh_carry: Option<Vec<f64>> = None;
    for (l, slot) in layout.gnn.iter().enumerate().rev() {
        let cache_l = &cache.gnn[l];
        let in_dim = cache_l.in_dim;
        let mut dout = std::mem::take(&mut dout_layers[l]);
        if let Some(carry) = dh_carry.take() {
            for (d, c) in dout.iter_mut().zip(carry.iter()) {
                *d += c;
            }
        }
        if let Some(mask) = &cache_l.mask {
            apply_mask(&mut dout, mask);
        }

        let dh_in = match slot {
            GnnSlot::Gin { eps, l1, l2 } => {
                let mut dz2 = dout;
                relu_backward(&mut dz2, &cache_l.z2);
                accumulate_dense(&mut grad, l2, &cache_l.a1, n, &dz2);
                let mut dz1 = dense_backward_input(&params.values, l2, &dz2, n);
                relu_backward(&mut dz1, &cache_l.z1);
                accumulate_dense(&mut grad, l1, &cache_l.agg, n, &dz1);
                let dagg = dense_backward_input(&params.values, l1, &dz1, n);

                // agg_v = (1+eps)·h_v + Σ_{u∈N(v)} h_u
                let eps_v = params.values[*eps];
                let mut deps = 0.0;
                let mut dh = vec![0.0; n * in_dim];
                for v in 0..n {
                    for d in 0..in_dim {
                        deps += cache_l.input[v * in_dim + d] * dagg[v * in_dim + d];
                        dh[v * in_dim + d] += (1.0 + eps_v) * dagg[v * in_dim + d];
                    }
                    for &u in g.neighbors(v) {
                        for d in 0..in_dim {
                            dh[u * in_dim + d] += dagg[v * in_dim + d];
                        }
                    }
                }
                grad[*eps] += deps;
                dh
            }
            GnnSlot::Sage {
                w_self,
                w_neigh,
                b,
                in_dim: din,
                out_dim,
            } => {
                let mut dz = dout;
                relu_backward(&mut dz, &cache_l.z1);
                // weight gradients for both transforms plus shared bias
                accumulate_matmul(&mut grad[w_self.clone()], &cache_l.input, n, *din, &dz, *out_dim);
                accumulate_matmul(&mut grad[w_neigh.clone()], &cache_l.agg, n, *din, &dz, *out_dim);
                let gb = &mut grad[b.clone()];
                for v in 0..n {
                    for c in 0..*out_dim {
                        gb[c] += dz[v * out_dim + c];
                    }
                }
                let dh_self =
                    matmul_backward_input(&params.values[w_self.clone()], &dz, n, *din, *out_dim);
                let dmean =
                    matmul_backward_input(&params.values[w_neigh.clone()], &dz, n, *din, *out_dim);
                let mut dh = dh_self;
                for v in 0..n {
                    let deg = g.degree(v);
                    if deg == 0 {
                        continue;
                    }
                    let inv = 1.0 / deg as f64;
                    for &u in g.neighbors(v) {
                        for d in 0..*din {
                            dh[u * din + d] += dmean[v * din + d] * inv;
                        }
                    }
                }
                dh
            }
        };
        dh_carry = Some(dh_in);
    }

    GraphGradients {
        loss: loss_value,
        grad,
    }
}

/// dW += xᵀ·dz and db += Σ_rows dz for one dense slot.
fn accumulate_dense(grad: &mut [f64], slot: &DenseSlot, x: &[f64], rows: usize, dz: &[f64]) {
    accumulate_matmul(
        &mut grad[slot.w.clone()],
        x,
        rows,
        slot.in_dim,
        dz,
        slot.out_dim,
    );
    let gb = &mut grad[slot.b.clone()];
    for v in 0..rows {
        for c in 0..slot.out_dim {
            gb[c] += dz[v * slot.out_dim + c];
        }
    }
}

fn accumulate_matmul(
    gw: &mut [f64],
    x: &[f64],
    rows: usize,
    in_dim: usize,
    dz: &[f64],
    out_dim: usize,
) {
    for v in 0..rows {
        for r in 0..in_dim {
            let xr = x[v * in_dim + r];
            if xr == 0.0 {
                continue;
            }
            let wrow = &mut gw[r * out_dim..(r + 1) * out_dim];
            let dzrow = &dz[v * out_dim..(v + 1) * out_dim];
            for (gwc, &dzc) in wrow.iter_mut().zip(dzrow.iter()) {
                *gwc += xr * dzc;
            }
        }
    }
}

/// dx = dz·Wᵀ given row-major `W: in_dim × out_dim`.
fn matmul_backward_input(
    w: &[f64],
    dz: &[f64],
    rows: usize,
    in_dim: usize,
    out_dim: usize,
) -> Vec<f64> {
    let mut dx = vec![0.0; rows * in_dim];
    for v in 0..rows {
        let dzrow = &dz[v * out_dim..(v + 1) * out_dim];
        let dxrow = &mut dx[v * in_dim..(v + 1) * in_dim];
        for (r, dxr) in dxrow.iter_mut().enumerate() {
            let wrow = &w[r * out_dim..(r + 1) * out_dim];
            *dxr = wrow.iter().zip(dzrow.iter()).map(|(a, b)| a * b).sum();
        }
    }
    dx
}

fn dense_backward_input(values: &[f64], slot: &DenseSlot, dz: &[f64], rows: usize) -> Vec<f64> {
    matmul_backward_input(&values[slot.w.clone()], dz, rows, slot.in_dim, slot.out_dim)
}

/// Compare analytic gradients against central finite differences on
/// `n_coords` randomly chosen parameter coordinates. Returns the largest
/// relative error (`|a−fd| / max(|a|, |fd|, 1)`); dropout is disabled so
/// the loss surface is the eval-mode one.
pub fn gradient_check(
    params: &ModelParams,
    g: &Graph,
    target: &[f64],
    n_coords: usize,
    seed: u64,
) -> f64 {
    const H: f64 = 1e-5;
    let analytic = graph_gradient(params, g, target, false, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut probe = params.clone();
    for _ in 0..n_coords {
        let i = rng.gen_range(0..params.values.len());
        let orig = probe.values[i];
        probe.values[i] = orig + H;
        let up = loss(&forward(&probe, g, false, 0), target);
        probe.values[i] = orig - H;
        let down = loss(&forward(&probe, g, false, 0), target);
        probe.values[i] = orig;
        let fd = (up - down) / (2.0 * H);
        let a = analytic.grad[i];
        let rel = (a - fd).abs() / a.abs().max(fd.abs()).max(1.0);
        worst = worst.max(rel);
    }
    worst
}
