//! A compact message-passing regressor for significance profiles.
//!
//! The model has three modules: K layers of message passing over the graph
//! (M1, GIN or SAGE backbone), global add pooling into one graph embedding
//! (M2), and an MLP head mapping the embedding to the 8 profile entries
//! (M3). Node features start as the constant scalar 1 — the graphs carry
//! no attributes, so everything the model learns comes from structure.
//!
//! Everything is f64 and hand-differentiated; `model::backward` returns
//! exact gradients (checked against central finite differences in the
//! tests), and training is bit-deterministic for a fixed config.

mod model;
mod train;

pub use model::{forward, gradient_check, graph_gradient, loss, pooled_embedding, GraphGradients};
pub use train::{
    examples_from_records, train, train_count_target, train_single_target, CountRegression,
    EpochStats, TargetKind, TrainExample, TrainReport,
};

use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::census::PatternId;

#[derive(Debug, Error)]
pub enum NnError {
    #[error("invalid model config: {0}")]
    Config(String),
    #[error("training diverged (non-finite loss) at epoch {epoch}")]
    Diverged {
        epoch: usize,
        report: Box<TrainReport>,
    },
    #[error("checkpoint is malformed: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Dataset(#[from] crate::dataset::DatasetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backbone {
    Gin,
    Sage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JumpingKnowledge {
    /// Elementwise max over the K layer outputs.
    Max,
    /// Concatenation of the K layer outputs.
    Cat,
}

/// Hyperparameters. The admissible ranges mirror the reference search
/// space; [`ModelConfig::validate`] enforces them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub backbone: Backbone,
    /// K, number of message-passing layers (2..=3).
    pub gnn_depth: usize,
    /// Width of M1 layers and M3 hidden layers (6..=16).
    pub hidden_dim: usize,
    /// Dropout after each M1 layer, in [0, 0.9].
    pub gnn_dropout: f64,
    pub jumping_knowledge: JumpingKnowledge,
    /// Number of dense layers in M3 (2..=6).
    pub mlp_depth: usize,
    /// Dropout after each hidden M3 layer, in [0.2, 0.9].
    pub mlp_dropout: f64,
    /// Upper bound on training epochs (<= 100).
    pub epochs: usize,
    /// One of {16, 32, 64, 128, 256}.
    pub batch_size: usize,
    /// In [1e-5, 1e-3].
    pub learning_rate: f64,
    pub seed: u64,
    /// 8 for profile regression, 1 for a single-pattern head.
    pub out_dim: usize,
}

impl ModelConfig {
    /// A mid-range GIN configuration; good starting point for desk runs.
    pub fn default_gin(seed: u64) -> Self {
        ModelConfig {
            backbone: Backbone::Gin,
            gnn_depth: 2,
            hidden_dim: 16,
            gnn_dropout: 0.0,
            jumping_knowledge: JumpingKnowledge::Cat,
            mlp_depth: 3,
            mlp_dropout: 0.2,
            epochs: 100,
            batch_size: 32,
            learning_rate: 1e-3,
            seed,
            out_dim: 8,
        }
    }

    pub fn validate(&self) -> Result<(), NnError> {
        let fail = |msg: String| Err(NnError::Config(msg));
        if !(2..=3).contains(&self.gnn_depth) {
            return fail(format!("gnn_depth must be 2..=3, got {}", self.gnn_depth));
        }
        if !(6..=16).contains(&self.hidden_dim) {
            return fail(format!("hidden_dim must be 6..=16, got {}", self.hidden_dim));
        }
        if !(0.0..=0.9).contains(&self.gnn_dropout) {
            return fail(format!("gnn_dropout must be in [0, 0.9], got {}", self.gnn_dropout));
        }
        if !(2..=6).contains(&self.mlp_depth) {
            return fail(format!("mlp_depth must be 2..=6, got {}", self.mlp_depth));
        }
        if !(0.2..=0.9).contains(&self.mlp_dropout) {
            return fail(format!("mlp_dropout must be in [0.2, 0.9], got {}", self.mlp_dropout));
        }
        if self.epochs == 0 || self.epochs > 100 {
            return fail(format!("epochs must be 1..=100, got {}", self.epochs));
        }
        if ![16, 32, 64, 128, 256].contains(&self.batch_size) {
            return fail(format!(
                "batch_size must be one of 16/32/64/128/256, got {}",
                self.batch_size
            ));
        }
        if !(1e-5..=1e-3).contains(&self.learning_rate) {
            return fail(format!(
                "learning_rate must be in [1e-5, 1e-3], got {}",
                self.learning_rate
            ));
        }
        if self.out_dim != 1 && self.out_dim != 8 {
            return fail(format!("out_dim must be 1 or 8, got {}", self.out_dim));
        }
        Ok(())
    }

    /// Dimension fed into M3 after jumping knowledge and pooling.
    pub fn pooled_dim(&self) -> usize {
        match self.jumping_knowledge {
            JumpingKnowledge::Max => self.hidden_dim,
            JumpingKnowledge::Cat => self.hidden_dim * self.gnn_depth,
        }
    }
}

/// Draw one hyperparameter combination uniformly from the reference
/// search space (learning rate log-uniform). A seeded loop over this
/// function is the whole random-search story here; sweep orchestration is
/// out of scope.
pub fn sample_config(seed: u64) -> ModelConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let config = ModelConfig {
        backbone: if rng.gen_bool(0.5) {
            Backbone::Gin
        } else {
            Backbone::Sage
        },
        gnn_depth: rng.gen_range(2..=3),
        hidden_dim: rng.gen_range(6..=16),
        gnn_dropout: rng.gen_range(0.0..=0.9),
        jumping_knowledge: if rng.gen_bool(0.5) {
            JumpingKnowledge::Max
        } else {
            JumpingKnowledge::Cat
        },
        mlp_depth: rng.gen_range(2..=6),
        mlp_dropout: rng.gen_range(0.2..=0.9),
        epochs: 100,
        batch_size: [16, 32, 64, 128, 256][rng.gen_range(0..5)],
        learning_rate: 10f64.powf(rng.gen_range(-5.0..=-3.0)),
        seed: rng.gen(),
        out_dim: 8,
    };
    debug_assert!(config.validate().is_ok());
    config
}

/// Offsets of one dense layer inside the flat parameter vector. Weights
/// are row-major `in_dim × out_dim`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct DenseSlot {
    pub w: Range<usize>,
    pub b: Range<usize>,
    pub in_dim: usize,
    pub out_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum GnnSlot {
    /// Learnable epsilon plus the two dense layers of the GIN update MLP.
    Gin {
        eps: usize,
        l1: DenseSlot,
        l2: DenseSlot,
    },
    /// Self and neighbour transforms sharing one bias.
    Sage {
        w_self: Range<usize>,
        w_neigh: Range<usize>,
        b: Range<usize>,
        in_dim: usize,
        out_dim: usize,
    },
}

/// Flat-parameter layout derived from a config. The serialization order of
/// checkpoints is exactly this order: GNN layers first (per layer: eps,
/// W1, b1, W2, b2 for GIN; W_self, W_neigh, b for SAGE), then the M3 dense
/// layers (W, b each).
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Layout {
    pub gnn: Vec<GnnSlot>,
    pub mlp: Vec<DenseSlot>,
    pub total: usize,
}

impl Layout {
    pub fn of(config: &ModelConfig) -> Layout {
        fn dense(cursor: &mut usize, in_dim: usize, out_dim: usize) -> DenseSlot {
            let w = *cursor..*cursor + in_dim * out_dim;
            *cursor = w.end;
            let b = *cursor..*cursor + out_dim;
            *cursor = b.end;
            DenseSlot {
                w,
                b,
                in_dim,
                out_dim,
            }
        }

        let h = config.hidden_dim;
        let mut cursor = 0usize;
        let mut gnn = Vec::with_capacity(config.gnn_depth);
        let mut in_dim = 1usize; // constant scalar node feature
        for _ in 0..config.gnn_depth {
            match config.backbone {
                Backbone::Gin => {
                    let eps = cursor;
                    cursor += 1;
                    let l1 = dense(&mut cursor, in_dim, h);
                    let l2 = dense(&mut cursor, h, h);
                    gnn.push(GnnSlot::Gin { eps, l1, l2 });
                }
                Backbone::Sage => {
                    let w_self = cursor..cursor + in_dim * h;
                    cursor = w_self.end;
                    let w_neigh = cursor..cursor + in_dim * h;
                    cursor = w_neigh.end;
                    let b = cursor..cursor + h;
                    cursor = b.end;
                    gnn.push(GnnSlot::Sage {
                        w_self,
                        w_neigh,
                        b,
                        in_dim,
                        out_dim: h,
                    });
                }
            }
            in_dim = h;
        }

        let mut mlp = Vec::with_capacity(config.mlp_depth);
        let mut dim = config.pooled_dim();
        for layer in 0..config.mlp_depth {
            let out = if layer + 1 == config.mlp_depth {
                config.out_dim
            } else {
                h
            };
            mlp.push(dense(&mut cursor, dim, out));
            dim = out;
        }

        Layout {
            gnn,
            mlp,
            total: cursor,
        }
    }
}

/// All weights of one model as a flat vector in [`Layout`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub config: ModelConfig,
    pub values: Vec<f64>,
}

impl ModelParams {
    /// Uniform fan-in initialization (`U(−1/√fan_in, 1/√fan_in)` for
    /// weights and biases, epsilon starts at 0), seeded by the config.
    pub fn init(config: &ModelConfig) -> ModelParams {
        let layout = Layout::of(config);
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut values = vec![0.0f64; layout.total];
        let fill_dense = |values: &mut Vec<f64>, slot: &DenseSlot, rng: &mut ChaCha8Rng| {
            let bound = 1.0 / (slot.in_dim as f64).sqrt();
            for i in slot.w.clone() {
                values[i] = rng.gen_range(-bound..=bound);
            }
            for i in slot.b.clone() {
                values[i] = rng.gen_range(-bound..=bound);
            }
        };
        for slot in &layout.gnn {
            match slot {
                GnnSlot::Gin { eps, l1, l2 } => {
                    values[*eps] = 0.0;
                    fill_dense(&mut values, l1, &mut rng);
                    fill_dense(&mut values, l2, &mut rng);
                }
                GnnSlot::Sage {
                    w_self,
                    w_neigh,
                    b,
                    in_dim,
                    ..
                } => {
                    let bound = 1.0 / (*in_dim as f64).sqrt();
                    for i in w_self.clone().chain(w_neigh.clone()).chain(b.clone()) {
                        values[i] = rng.gen_range(-bound..=bound);
                    }
                }
            }
        }
        for slot in &layout.mlp {
            fill_dense(&mut values, slot, &mut rng);
        }
        ModelParams {
            config: *config,
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// On-disk checkpoint: a JSON header binding the config and pattern order
/// to the flat 64-bit parameter array.
#[derive(Debug, Serialize, Deserialize)]
struct Checkpoint {
    version: u32,
    pattern_order: Vec<String>,
    config: ModelConfig,
    params: Vec<f64>,
}

const CHECKPOINT_VERSION: u32 = 1;

pub fn save_checkpoint<W: std::io::Write>(
    params: &ModelParams,
    mut sink: W,
) -> Result<(), NnError> {
    let ckpt = Checkpoint {
        version: CHECKPOINT_VERSION,
        pattern_order: PatternId::ALL.iter().map(|p| p.name().to_string()).collect(),
        config: params.config,
        params: params.values.clone(),
    };
    let json =
        serde_json::to_string(&ckpt).map_err(|e| NnError::Checkpoint(e.to_string()))?;
    sink.write_all(json.as_bytes())?;
    sink.write_all(b"\n")?;
    Ok(())
}

pub fn load_checkpoint<R: std::io::Read>(mut source: R) -> Result<ModelParams, NnError> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    let ckpt: Checkpoint =
        serde_json::from_str(&text).map_err(|e| NnError::Checkpoint(e.to_string()))?;
    if ckpt.version != CHECKPOINT_VERSION {
        return Err(NnError::Checkpoint(format!(
            "unsupported version {}",
            ckpt.version
        )));
    }
    let expected: Vec<String> = PatternId::ALL.iter().map(|p| p.name().to_string()).collect();
    if ckpt.pattern_order != expected {
        return Err(NnError::Checkpoint(
            "pattern order does not match this build".to_string(),
        ));
    }
    let layout = Layout::of(&ckpt.config);
    if ckpt.params.len() != layout.total {
        return Err(NnError::Checkpoint(format!(
            "parameter count {} does not match config (expected {})",
            ckpt.params.len(),
            layout.total
        )));
    }
    Ok(ModelParams {
        config: ckpt.config,
        values: ckpt.params,
    })
}

pub fn save_checkpoint_path(params: &ModelParams, path: &std::path::Path) -> Result<(), NnError> {
    use std::io::Write as _;
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    save_checkpoint(params, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_checkpoint_path(path: &std::path::Path) -> Result<ModelParams, NnError> {
    let file = std::fs::File::open(path)?;
    load_checkpoint(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_total_matches_hand_count() {
        let config = ModelConfig {
            backbone: Backbone::Gin,
            gnn_depth: 2,
            hidden_dim: 8,
            gnn_dropout: 0.0,
            jumping_knowledge: JumpingKnowledge::Cat,
            mlp_depth: 2,
            mlp_dropout: 0.2,
            epochs: 10,
            batch_size: 16,
            learning_rate: 1e-3,
            seed: 0,
            out_dim: 8,
        };
        let layout = Layout::of(&config);
        // layer 1: eps + (1×8 + 8) + (8×8 + 8) = 1 + 16 + 72 = 89
        // layer 2: eps + (8×8 + 8) + (8×8 + 8) = 1 + 72 + 72 = 145
        // mlp: (16×8 + 8) + (8×8 + 8) = 136 + 72 = 208
        assert_eq!(layout.total, 89 + 145 + 208);
        let params = ModelParams::init(&config);
        assert_eq!(params.len(), layout.total);
    }

    #[test]
    fn init_is_deterministic_and_eps_starts_at_zero() {
        let config = ModelConfig::default_gin(3);
        let a = ModelParams::init(&config);
        let b = ModelParams::init(&config);
        assert_eq!(a, b);
        let layout = Layout::of(&config);
        for slot in &layout.gnn {
            if let GnnSlot::Gin { eps, .. } = slot {
                assert_eq!(a.values[*eps], 0.0);
            }
        }
    }

    #[test]
    fn checkpoint_round_trip() {
        let config = ModelConfig::default_gin(11);
        let params = ModelParams::init(&config);
        let mut buf = Vec::new();
        save_checkpoint(&params, &mut buf).unwrap();
        let back = load_checkpoint(buf.as_slice()).unwrap();
        assert_eq!(params, back);
    }

    #[test]
    fn checkpoint_rejects_wrong_param_count() {
        let config = ModelConfig::default_gin(11);
        let params = ModelParams::init(&config);
        let mut buf = Vec::new();
        save_checkpoint(&params, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let truncated = text.replace("\"params\":[", "\"params\":[0.0,");
        assert!(load_checkpoint(truncated.as_bytes()).is_err());
    }

    #[test]
    fn config_validation_catches_out_of_range() {
        let mut config = ModelConfig::default_gin(0);
        config.validate().unwrap();
        config.hidden_dim = 32;
        assert!(config.validate().is_err());
        config.hidden_dim = 16;
        config.batch_size = 25;
        assert!(config.validate().is_err());
        config.batch_size = 256;
        config.learning_rate = 0.01;
        assert!(config.validate().is_err());
    }
}
