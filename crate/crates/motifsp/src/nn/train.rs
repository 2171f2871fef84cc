//! Mini-batch training with Adam and 25+25 early stopping.
//!
//! Batches are shuffled per epoch from the config seed; per-graph dropout
//! streams are derived from (seed, epoch, batch, example), so a run is
//! reproducible bit for bit. Per-graph gradients are computed in parallel
//! but reduced in index order, which keeps the arithmetic identical at any
//! worker count.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::census::PatternId;
use crate::dataset::DatasetRecord;
use crate::graph::Graph;

use super::model::{forward, graph_gradient};
use super::{ModelConfig, ModelParams, NnError};

/// Epochs before evaluation-based stopping may trigger.
pub const EARLY_STOP_GRACE: usize = 25;
/// Epochs without a new best validation loss before stopping.
pub const EARLY_STOP_PATIENCE: usize = 25;

/// One training unit: a graph and its regression target (length must
/// match the config's `out_dim`).
#[derive(Debug, Clone)]
pub struct TrainExample {
    pub graph: Graph,
    pub target: Vec<f64>,
}

/// What the regression target of an example set is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetKind {
    /// The 8 significance-profile entries.
    Sp,
    /// One significance-profile entry.
    SpSingle(PatternId),
    /// `log1p` of the 8 induced counts.
    CountLog1p,
}

/// Load the graphs a record set references and attach regression targets.
pub fn examples_from_records(
    records: &[DatasetRecord],
    dataset_dir: &Path,
    kind: TargetKind,
) -> Result<Vec<TrainExample>, NnError> {
    let mut out = Vec::with_capacity(records.len());
    for rec in records {
        let loaded = Graph::read_edge_list_path(&dataset_dir.join(&rec.edge_path))
            .map_err(crate::dataset::DatasetError::from)?;
        let graph = if loaded.n() < rec.n {
            // restore trailing isolated nodes the edge list cannot carry
            let edges: Vec<(usize, usize)> = loaded.edges().collect();
            Graph::from_edges(&edges, Some(rec.n)).map_err(crate::dataset::DatasetError::from)?
        } else {
            loaded
        };
        let target = match kind {
            TargetKind::Sp => rec.sp.to_vec(),
            TargetKind::SpSingle(p) => vec![rec.sp[p.index()]],
            TargetKind::CountLog1p => rec.counts.iter().map(|&c| (c as f64).ln_1p()).collect(),
        };
        out.push(TrainExample { graph, target });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_mse: f64,
    pub valid_mse: f64,
    /// Median over validation examples of the per-example median |error|.
    pub median_abs_err: f64,
    /// Max over validation examples of the summed |error| of a full
    /// prediction.
    pub max_abs_sum_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub epochs: Vec<EpochStats>,
    /// Epoch (1-based) whose parameters are returned.
    pub best_epoch: usize,
    pub best_valid_mse: f64,
    /// Last epoch that ran.
    pub stopping_epoch: usize,
}

fn mix_seed(seed: u64, parts: [u64; 3]) -> u64 {
    let mut h = 0xcbf29ce484222325u64 ^ seed;
    for v in parts {
        for b in v.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    h
}

fn median(sorted: &mut Vec<f64>) -> f64 {
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = sorted.len();
    if k == 0 {
        return 0.0;
    }
    if k % 2 == 1 {
        sorted[k / 2]
    } else {
        0.5 * (sorted[k / 2 - 1] + sorted[k / 2])
    }
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
    lr: f64,
}

impl Adam {
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(len: usize, lr: f64) -> Adam {
        Adam {
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
            lr,
        }
    }

    fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let bc1 = 1.0 - Self::BETA1.powi(self.t as i32);
        let bc2 = 1.0 - Self::BETA2.powi(self.t as i32);
        for i in 0..params.len() {
            self.m[i] = Self::BETA1 * self.m[i] + (1.0 - Self::BETA1) * grad[i];
            self.v[i] = Self::BETA2 * self.v[i] + (1.0 - Self::BETA2) * grad[i] * grad[i];
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= self.lr * m_hat / (v_hat.sqrt() + Self::EPS);
        }
    }
}

fn evaluate(params: &ModelParams, set: &[TrainExample]) -> (f64, f64, f64) {
    let per_example: Vec<(f64, f64, f64)> = set
        .par_iter()
        .map(|ex| {
            let pred = forward(params, &ex.graph, false, 0);
            let mut abs: Vec<f64> = pred
                .iter()
                .zip(&ex.target)
                .map(|(p, t)| (p - t).abs())
                .collect();
            let mse = abs.iter().map(|e| e * e).sum::<f64>() / abs.len() as f64;
            let sum_abs: f64 = abs.iter().sum();
            let med = median(&mut abs);
            (mse, med, sum_abs)
        })
        .collect();
    let count = per_example.len() as f64;
    let mse = per_example.iter().map(|x| x.0).sum::<f64>() / count;
    let mut medians: Vec<f64> = per_example.iter().map(|x| x.1).collect();
    let median_abs = median(&mut medians);
    let max_sum = per_example.iter().map(|x| x.2).fold(0.0f64, f64::max);
    (mse, median_abs, max_sum)
}

/// Train a model, returning the parameters of the best validation epoch
/// and the full per-epoch report. Non-finite losses abort with
/// [`NnError::Diverged`].
pub fn train(
    train_set: &[TrainExample],
    valid_set: &[TrainExample],
    config: &ModelConfig,
) -> Result<(ModelParams, TrainReport), NnError> {
    if train_set.is_empty() || valid_set.is_empty() {
        return Err(NnError::Config(
            "training requires non-empty train and valid splits".to_string(),
        ));
    }
    for ex in train_set.iter().chain(valid_set) {
        if ex.target.len() != config.out_dim {
            return Err(NnError::Config(format!(
                "target length {} does not match out_dim {}",
                ex.target.len(),
                config.out_dim
            )));
        }
    }

    let mut params = ModelParams::init(config);
    let mut adam = Adam::new(params.len(), config.learning_rate);
    let mut report = TrainReport {
        epochs: Vec::with_capacity(config.epochs),
        best_epoch: 0,
        best_valid_mse: f64::INFINITY,
        stopping_epoch: 0,
    };
    let mut best_params = params.clone();

    for epoch in 1..=config.epochs {
        let mut order: Vec<usize> = (0..train_set.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(config.seed, [epoch as u64, 0, 0]));
        for i in (1..order.len()).rev() {
            let j = rng.gen_range(0..=i);
            order.swap(i, j);
        }

        let mut epoch_loss = 0.0;
        for (batch_idx, chunk) in order.chunks(config.batch_size).enumerate() {
            let grads: Vec<_> = chunk
                .par_iter()
                .map(|&i| {
                    let seed = mix_seed(config.seed, [epoch as u64, batch_idx as u64, i as u64]);
                    graph_gradient(&params, &train_set[i].graph, &train_set[i].target, true, seed)
                })
                .collect();
            let scale = 1.0 / chunk.len() as f64;
            let batch_loss: f64 = grads.iter().map(|g| g.loss).sum::<f64>() * scale;
            if !batch_loss.is_finite() {
                report.stopping_epoch = epoch;
                return Err(NnError::Diverged {
                    epoch,
                    report: Box::new(report),
                });
            }
            let mut grad = vec![0.0; params.len()];
            for g in &grads {
                for (acc, v) in grad.iter_mut().zip(&g.grad) {
                    *acc += v * scale;
                }
            }
            adam.step(&mut params.values, &grad);
            epoch_loss += batch_loss * chunk.len() as f64;
        }
        let train_mse = epoch_loss / train_set.len() as f64;

        let (valid_mse, median_abs_err, max_abs_sum_err) = evaluate(&params, valid_set);
        if !valid_mse.is_finite() {
            report.stopping_epoch = epoch;
            return Err(NnError::Diverged {
                epoch,
                report: Box::new(report),
            });
        }
        report.epochs.push(EpochStats {
            epoch,
            train_mse,
            valid_mse,
            median_abs_err,
            max_abs_sum_err,
        });
        if valid_mse < report.best_valid_mse {
            report.best_valid_mse = valid_mse;
            report.best_epoch = epoch;
            best_params = params.clone();
        }
        report.stopping_epoch = epoch;
        if epoch >= EARLY_STOP_GRACE && epoch - report.best_epoch >= EARLY_STOP_PATIENCE {
            break;
        }
    }

    Ok((best_params, report))
}

/// Train one 1-output head for a single pattern. The example targets must
/// be full 8-entry profiles; the projection happens here.
pub fn train_single_target(
    train_set: &[TrainExample],
    valid_set: &[TrainExample],
    config: &ModelConfig,
    pattern: PatternId,
) -> Result<(ModelParams, TrainReport), NnError> {
    let project = |set: &[TrainExample]| -> Result<Vec<TrainExample>, NnError> {
        set.iter()
            .map(|ex| {
                if ex.target.len() != 8 {
                    return Err(NnError::Config(
                        "single-target projection needs 8-entry profile targets".to_string(),
                    ));
                }
                Ok(TrainExample {
                    graph: ex.graph.clone(),
                    target: vec![ex.target[pattern.index()]],
                })
            })
            .collect()
    };
    let mut cfg = *config;
    cfg.out_dim = 1;
    train(&project(train_set)?, &project(valid_set)?, &cfg)
}

/// A count-regression model along with the residual statistics (in
/// `log1p` space, measured on the training split) that the count-to-SP
/// approximation consumes.
#[derive(Debug, Clone)]
pub struct CountRegression {
    pub params: ModelParams,
    pub report: TrainReport,
    /// Per-pattern mean of (prediction − target) residuals.
    pub residual_mean: [f64; 8],
    /// Per-pattern population variance of the residuals.
    pub residual_var: [f64; 8],
}

/// Train an 8-output model on `log1p` counts. Targets must come from
/// [`TargetKind::CountLog1p`].
pub fn train_count_target(
    train_set: &[TrainExample],
    valid_set: &[TrainExample],
    config: &ModelConfig,
) -> Result<CountRegression, NnError> {
    let mut cfg = *config;
    cfg.out_dim = 8;
    let (params, report) = train(train_set, valid_set, &cfg)?;

    let residuals: Vec<Vec<f64>> = train_set
        .par_iter()
        .map(|ex| {
            let pred = forward(&params, &ex.graph, false, 0);
            pred.iter().zip(&ex.target).map(|(p, t)| p - t).collect()
        })
        .collect();
    let count = residuals.len() as f64;
    let mut residual_mean = [0.0; 8];
    let mut residual_var = [0.0; 8];
    for r in &residuals {
        for k in 0..8 {
            residual_mean[k] += r[k];
        }
    }
    for v in &mut residual_mean {
        *v /= count;
    }
    for r in &residuals {
        for k in 0..8 {
            let d = r[k] - residual_mean[k];
            residual_var[k] += d * d;
        }
    }
    for v in &mut residual_var {
        *v /= count;
    }

    Ok(CountRegression {
        params,
        report,
        residual_mean,
        residual_var,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{Backbone, JumpingKnowledge};

    fn tiny_config(seed: u64) -> ModelConfig {
        ModelConfig {
            backbone: Backbone::Gin,
            gnn_depth: 2,
            hidden_dim: 8,
            gnn_dropout: 0.0,
            jumping_knowledge: JumpingKnowledge::Cat,
            mlp_depth: 2,
            mlp_dropout: 0.2,
            epochs: 30,
            batch_size: 16,
            learning_rate: 1e-3,
            seed,
            out_dim: 8,
        }
    }

    fn path_graph(n: usize) -> Graph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Graph::from_edges(&edges, None).unwrap()
    }

    fn sp_target(seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut z3 = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0f64)];
        let n3 = (z3[0] * z3[0] + z3[1] * z3[1]).sqrt();
        z3.iter_mut().for_each(|v| *v /= n3);
        let mut z4: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n4 = z4.iter().map(|v| v * v).sum::<f64>().sqrt();
        z4.iter_mut().for_each(|v| *v /= n4);
        let mut t = vec![z3[0], z3[1]];
        t.extend(z4);
        t
    }

    #[test]
    fn zero_learning_rate_freezes_parameters() {
        let mut config = tiny_config(1);
        config.learning_rate = 0.0;
        config.epochs = 5;
        let examples = vec![TrainExample {
            graph: path_graph(5),
            target: sp_target(3),
        }];
        let (params, report) = train(&examples, &examples, &config).unwrap();
        assert_eq!(params, ModelParams::init(&config));
        let first = report.epochs[0].valid_mse;
        for e in &report.epochs {
            assert!((e.valid_mse - first).abs() < 1e-15);
        }
    }

    #[test]
    fn single_record_overfits() {
        // convergence oracle for the optimizer + backprop path, so the
        // dropout noise sources are off
        let config = ModelConfig {
            backbone: Backbone::Gin,
            gnn_depth: 3,
            hidden_dim: 16,
            gnn_dropout: 0.0,
            jumping_knowledge: JumpingKnowledge::Cat,
            mlp_depth: 3,
            mlp_dropout: 0.0,
            epochs: 100,
            batch_size: 16,
            learning_rate: 1e-3,
            seed: 0,
            out_dim: 8,
        };
        let graph =
            Graph::from_edges(&[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 2), (2, 4)], None)
                .unwrap();
        let examples = vec![TrainExample {
            graph,
            target: sp_target(5),
        }];
        let (params, _report) = train(&examples, &examples, &config).unwrap();
        let pred = forward(&params, &examples[0].graph, false, 0);
        let mse = super::super::model::loss(&pred, &examples[0].target);
        assert!(mse < 1e-3, "train MSE after 100 epochs: {mse}");
    }

    #[test]
    fn training_is_bit_reproducible() {
        let config = tiny_config(7);
        let examples: Vec<TrainExample> = (0..8)
            .map(|i| TrainExample {
                graph: path_graph(4 + i % 3),
                target: sp_target(i as u64),
            })
            .collect();
        let (pa, ra) = train(&examples[..6], &examples[6..], &config).unwrap();
        let (pb, rb) = train(&examples[..6], &examples[6..], &config).unwrap();
        assert_eq!(pa, pb);
        assert_eq!(ra, rb);
    }

    #[test]
    fn duplicated_batch_entry_keeps_mean_gradient() {
        let config = tiny_config(3);
        let params = ModelParams::init(&config);
        let g = path_graph(5);
        let t = sp_target(1);
        let single = graph_gradient(&params, &g, &t, true, 42);
        // a batch of two copies with the same dropout stream averages to
        // the same gradient
        let other = graph_gradient(&params, &g, &t, true, 42);
        let mean: Vec<f64> = single
            .grad
            .iter()
            .zip(&other.grad)
            .map(|(a, b)| (a + b) / 2.0)
            .collect();
        for (m, s) in mean.iter().zip(&single.grad) {
            assert!((m - s).abs() < 1e-15);
        }
    }

    #[test]
    fn single_target_head_is_one_dimensional() {
        let config = tiny_config(4);
        let examples: Vec<TrainExample> = (0..6)
            .map(|i| TrainExample {
                graph: path_graph(4 + i % 2),
                target: sp_target(i as u64),
            })
            .collect();
        let (params, _) = train_single_target(
            &examples[..4],
            &examples[4..],
            &config,
            PatternId::Tri,
        )
        .unwrap();
        assert_eq!(params.config.out_dim, 1);
        let pred = forward(&params, &examples[0].graph, false, 0);
        assert_eq!(pred.len(), 1);
    }

    #[test]
    fn count_regression_reports_residual_stats() {
        let mut config = tiny_config(5);
        config.epochs = 8;
        let examples: Vec<TrainExample> = (0..6)
            .map(|i| {
                let g = path_graph(4 + i % 3);
                let counts = crate::census::census(&g).unwrap();
                TrainExample {
                    target: counts
                        .as_array()
                        .iter()
                        .map(|&c| (c as f64).ln_1p())
                        .collect(),
                    graph: g,
                }
            })
            .collect();
        let model = train_count_target(&examples[..4], &examples[4..], &config).unwrap();
        assert!(model.residual_var.iter().all(|v| v.is_finite() && *v >= 0.0));
        assert!(model.residual_mean.iter().all(|v| v.is_finite()));
        // log1p/expm1 are exact inverses on the count range we use
        for c in [0u64, 1, 7, 1000] {
            let t = (c as f64).ln_1p();
            assert_eq!(t.exp_m1().round() as u64, c);
        }
    }

    #[test]
    fn early_stopping_respects_grace_and_patience() {
        let mut config = tiny_config(6);
        config.epochs = 100;
        config.learning_rate = 1e-5; // slow crawl: best epoch stays early
        let examples: Vec<TrainExample> = (0..4)
            .map(|i| TrainExample {
                graph: path_graph(4),
                target: sp_target(i as u64),
            })
            .collect();
        let (_p, report) = train(&examples[..2], &examples[2..], &config).unwrap();
        // stopping can never fire in the grace period
        assert!(report.stopping_epoch >= EARLY_STOP_GRACE.min(config.epochs));
        if report.stopping_epoch < config.epochs {
            assert!(report.stopping_epoch - report.best_epoch >= EARLY_STOP_PATIENCE);
        }
    }
}
