//! Network-motif significance profiles, end to end.
//!
//! This crate computes motif significance profiles (SPs) exactly — induced
//! censuses of the 8 connected graphs on 3 and 4 nodes, a degree-preserving
//! null model, group-normalized Z-scores — and learns to predict them with
//! a compact message-passing regressor trained on graphs from 23 synthetic
//! generators.
//!
//! The guide in `book/` walks through the concepts chapter by chapter; its
//! code listings are compiled and run as part of `cargo test`.

pub mod census;
pub mod dataset;
pub mod eval;
pub mod generators;
pub mod graph;
pub mod nn;
pub mod nullmodel;
pub mod sp;

pub use census::{census, oracle_census, GraphletCounts, PatternId};
pub use dataset::{DatasetRecord, Labeler, SplitManifest};
pub use generators::{generate, sample_spec, GeneratorFamily, GeneratorSpec, SizeProfile};
pub use graph::{DegreeSequence, Graph, GraphError};
pub use nullmodel::{double_edge_swap, sample_null, zscores, NullConfig, NullStats, ZScores};
pub use eval::{agreement_heatmap, baseline_rates, error_percentiles, speedup_report, threshold_table};
pub use sp::{is_correct, normalize, sp_distance, SignificanceProfile};
