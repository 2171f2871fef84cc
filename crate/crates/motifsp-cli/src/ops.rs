//! The eight pipeline stages behind the subcommands.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use motifsp::census::{census as census_graph, GraphletCounts, PatternId};
use motifsp::dataset::{
    read_jsonl_path, split, write_jsonl_path, DatasetRecord, Labeler, SplitManifest,
};
use motifsp::eval::{
    agreement_heatmap, baseline_rates, error_percentiles, threshold_table, BaselineMode,
    CountStats, ErrorMetric, PercentileReport, ResidualStats, SpIndex, DEFAULT_THETAS,
};
use motifsp::generators::{generate as generate_graph, sample_spec, GeneratorFamily, SizeProfile};
use motifsp::graph::Graph;
use motifsp::nn::{
    examples_from_records, forward, load_checkpoint_path, save_checkpoint_path,
    train as train_model, train_count_target, train_single_target, Backbone, JumpingKnowledge,
    ModelConfig, TargetKind, TrainExample, TrainReport,
};
use motifsp::nullmodel::{sample_null, zscores, NullConfig};
use motifsp::sp::{fmt_f64, normalize, SignificanceProfile};

use crate::{data_err, usage_err, CliError, GlobalArgs};

const PATTERN_HEADER: &str = "P3,TRI,P4,S4,C4,PAW,DIAMOND,K4";

fn pattern_csv_ints(values: &[u64; 8]) -> String {
    values.map(|v| v.to_string()).join(",")
}

fn pattern_csv_floats(values: &[f64; 8]) -> String {
    values.map(|v| fmt_f64(v)).join(",")
}

/// Load an edge list, restoring a declared node count if the file cannot
/// carry trailing isolated nodes.
fn load_graph(path: &Path, declared_n: Option<usize>) -> Result<Graph, CliError> {
    let g = Graph::read_edge_list_path(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    match declared_n {
        Some(n) if g.n() < n => {
            let edges: Vec<(usize, usize)> = g.edges().collect();
            Graph::from_edges(&edges, Some(n)).map_err(data_err)
        }
        Some(n) if g.n() > n => Err(CliError::Data(format!(
            "{}: edge list uses more nodes than the declared {n}",
            path.display()
        ))),
        _ => Ok(g),
    }
}

// ---------------------------------------------------------------------------
// generate

#[derive(Debug, Args, Serialize)]
pub struct GenerateArgs {
    /// JSON config: a list of {family, count, base_seed, size_profile?}
    /// rows.
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Debug, Deserialize)]
struct GenerateRow {
    family: GeneratorFamily,
    count: usize,
    base_seed: u64,
    #[serde(default)]
    size_profile: Option<SizeProfile>,
}

pub fn generate(global: &GlobalArgs, args: &GenerateArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.config).map_err(data_err)?;
    let rows: Vec<GenerateRow> = serde_json::from_str(&text).map_err(data_err)?;
    let edges_dir = global.out_dir.join("edges");
    std::fs::create_dir_all(&edges_dir).map_err(data_err)?;

    struct Generated {
        id: String,
        family: GeneratorFamily,
        graph: Graph,
        spec: motifsp::generators::GeneratorSpec,
    }

    let mut tasks = Vec::new();
    for row in &rows {
        let profile = row.size_profile.unwrap_or_default();
        for j in 0..row.count {
            tasks.push((row.family, profile, row.base_seed + j as u64));
        }
    }
    let generated: Vec<Generated> = tasks
        .par_iter()
        .map(|&(family, profile, seed)| {
            let spec = sample_spec(family, &profile, seed);
            let graph = generate_graph(&spec).map_err(data_err)?;
            Ok(Generated {
                id: format!("{}-{seed:010}", family.name()),
                family,
                graph,
                spec,
            })
        })
        .collect::<Result<_, CliError>>()?;

    let mut seen = std::collections::HashSet::new();
    for g in &generated {
        if !seen.insert(&g.id) {
            return Err(CliError::Data(format!(
                "duplicate graph id `{}`: overlapping base_seed ranges for one family",
                g.id
            )));
        }
    }

    let mut manifest = String::from("id,family,n,m,edge_path\n");
    let mut specs = String::new();
    for g in &generated {
        let rel = format!("edges/{}.edges", g.id);
        g.graph
            .write_edge_list_path(&global.out_dir.join(&rel))
            .map_err(data_err)?;
        manifest.push_str(&format!(
            "{},{},{},{},{}\n",
            g.id,
            g.family.name(),
            g.graph.n(),
            g.graph.m(),
            rel
        ));
        specs.push_str(&serde_json::to_string(&g.spec).map_err(data_err)?);
        specs.push('\n');
    }
    std::fs::write(global.out_dir.join("generated.csv"), manifest).map_err(data_err)?;
    std::fs::write(global.out_dir.join("specs.jsonl"), specs).map_err(data_err)?;
    eprintln!(
        "generated {} graphs across {} rows",
        generated.len(),
        rows.len()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// census

#[derive(Debug, Args, Serialize)]
pub struct CensusArgs {
    /// Edge-list file.
    #[arg(long = "in")]
    pub input: PathBuf,
}

pub fn census_counts_csv(counts: &GraphletCounts) -> String {
    format!("{PATTERN_HEADER}\n{}\n", pattern_csv_ints(&counts.as_array()))
}

pub fn census(global: &GlobalArgs, args: &CensusArgs) -> Result<(), CliError> {
    let g = load_graph(&args.input, None)?;
    let counts = census_graph(&g).map_err(data_err)?;
    let out = match global.format.as_str() {
        "json" => format!(
            "{}\n",
            serde_json::json!({ "counts": counts.as_array().to_vec() })
        ),
        _ => census_counts_csv(&counts),
    };
    print!("{out}");
    Ok(())
}

// ---------------------------------------------------------------------------
// sp

#[derive(Debug, Args, Serialize)]
pub struct SpArgs {
    /// Edge-list file.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Null-model replicates (T).
    #[arg(long, default_value_t = NullConfig::DEFAULT_REPLICATES)]
    pub replicates: usize,
    /// Attempted swaps per replicate, as a multiple of m.
    #[arg(long, default_value_t = NullConfig::DEFAULT_SWAPS_FACTOR)]
    pub swaps_factor: usize,
    /// |z| used when the null spread is zero but the count deviates.
    #[arg(long, default_value_t = NullConfig::DEFAULT_CAP)]
    pub cap: f64,
}

pub fn sp(global: &GlobalArgs, args: &SpArgs) -> Result<(), CliError> {
    if args.replicates == 0 {
        return Err(usage_err("--replicates must be at least 1"));
    }
    let g = load_graph(&args.input, None)?;
    let counts = census_graph(&g).map_err(data_err)?;
    let stats = sample_null(&g, args.replicates, args.swaps_factor * g.m(), global.seed)
        .map_err(data_err)?;
    let z = zscores(&counts, &stats, args.cap);
    let profile = normalize(&z);

    let out = match global.format.as_str() {
        "json" => format!(
            "{}\n",
            serde_json::json!({
                "counts": counts.as_array().to_vec(),
                "z": z.z.to_vec(),
                "sp": profile.s.to_vec(),
            })
        ),
        _ => format!(
            "pattern,{PATTERN_HEADER}\ncount,{}\nz,{}\nsp,{}\n",
            pattern_csv_ints(&counts.as_array()),
            pattern_csv_floats(&z.z),
            pattern_csv_floats(&profile.s),
        ),
    };
    print!("{out}");
    Ok(())
}

// ---------------------------------------------------------------------------
// dataset

#[derive(Debug, Args, Serialize)]
pub struct DatasetArgs {
    /// Manifest CSV from `generate` (id,family,n,m,edge_path).
    #[arg(long)]
    pub manifest: PathBuf,
    /// Null-model replicates (T).
    #[arg(long, default_value_t = NullConfig::DESK_REPLICATES)]
    pub replicates: usize,
    /// Attempted swaps per replicate, as a multiple of m.
    #[arg(long, default_value_t = NullConfig::DEFAULT_SWAPS_FACTOR)]
    pub swaps_factor: usize,
    #[arg(long, default_value_t = NullConfig::DEFAULT_CAP)]
    pub cap: f64,
    /// Train,valid,test ratios.
    #[arg(long, value_parser = parse_ratios, default_value = "0.7,0.2,0.1")]
    pub split: (f64, f64, f64),
}

fn parse_ratios(s: &str) -> Result<(f64, f64, f64), String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    if parts.len() != 3 {
        return Err("expected three comma-separated ratios".to_string());
    }
    Ok((parts[0], parts[1], parts[2]))
}

struct ManifestRow {
    id: String,
    family: GeneratorFamily,
    n: usize,
    edge_path: String,
}

fn read_generate_manifest(path: &Path) -> Result<Vec<ManifestRow>, CliError> {
    let text = std::fs::read_to_string(path).map_err(data_err)?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.trim().is_empty() {
            continue; // header
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(CliError::Data(format!(
                "{}:{}: expected 5 fields, got {}",
                path.display(),
                i + 1,
                fields.len()
            )));
        }
        rows.push(ManifestRow {
            id: fields[0].to_string(),
            family: fields[1]
                .parse()
                .map_err(|e: String| CliError::Data(format!("{}:{}: {e}", path.display(), i + 1)))?,
            n: fields[2]
                .parse()
                .map_err(|e| CliError::Data(format!("{}:{}: {e}", path.display(), i + 1)))?,
            edge_path: fields[4].to_string(),
        });
    }
    Ok(rows)
}

pub fn dataset(global: &GlobalArgs, args: &DatasetArgs) -> Result<(), CliError> {
    let rows = read_generate_manifest(&args.manifest)?;
    if rows.is_empty() {
        return Err(CliError::Data("manifest lists no graphs".to_string()));
    }
    let base = args
        .manifest
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let null = NullConfig {
        replicates: args.replicates,
        swaps_factor: args.swaps_factor,
        cap: args.cap,
        base_seed: global.seed,
    };
    let labeler = Labeler::new(&global.out_dir, null);

    let records: Vec<DatasetRecord> = rows
        .par_iter()
        .map(|row| {
            let g = load_graph(&base.join(&row.edge_path), Some(row.n))?;
            labeler.label(&g, row.family, &row.id).map_err(data_err)
        })
        .collect::<Result<_, CliError>>()?;

    write_jsonl_path(&records, &global.out_dir.join("labels.jsonl")).map_err(data_err)?;
    let manifest = split(&records, args.split, global.seed).map_err(data_err)?;
    let json = serde_json::to_string_pretty(&manifest).map_err(data_err)?;
    std::fs::write(global.out_dir.join("split.json"), json).map_err(data_err)?;
    eprintln!(
        "labeled {} graphs ({} train / {} valid / {} test)",
        records.len(),
        manifest.train.len(),
        manifest.valid.len(),
        manifest.test.len()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// train

#[derive(Debug, Args, Serialize)]
pub struct TrainArgs {
    /// Dataset directory holding labels.jsonl and split.json.
    #[arg(long)]
    pub dataset: PathBuf,
    /// Regression target: `sp`, `counts`, or `single:<PATTERN>`.
    #[arg(long, default_value = "sp")]
    pub target: String,
    #[arg(long, value_parser = ["gin", "sage"], default_value = "gin")]
    pub backbone: String,
    #[arg(long, default_value_t = 2)]
    pub gnn_depth: usize,
    #[arg(long, default_value_t = 16)]
    pub hidden_dim: usize,
    #[arg(long, default_value_t = 0.0)]
    pub gnn_dropout: f64,
    #[arg(long, value_parser = ["max", "cat"], default_value = "cat")]
    pub jk: String,
    #[arg(long, default_value_t = 3)]
    pub mlp_depth: usize,
    #[arg(long, default_value_t = 0.2)]
    pub mlp_dropout: f64,
    #[arg(long, default_value_t = 100)]
    pub epochs: usize,
    #[arg(long, default_value_t = 32)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub learning_rate: f64,
}

/// What `train` writes next to the checkpoint: the per-epoch report plus,
/// for count regression, the residual statistics the count-to-SP
/// approximation needs.
#[derive(Debug, Serialize, Deserialize)]
pub struct TrainBundle {
    pub report: TrainReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_mean: Option<[f64; 8]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_var: Option<[f64; 8]>,
}

fn model_config(global: &GlobalArgs, args: &TrainArgs, out_dim: usize) -> ModelConfig {
    ModelConfig {
        backbone: if args.backbone == "gin" {
            Backbone::Gin
        } else {
            Backbone::Sage
        },
        gnn_depth: args.gnn_depth,
        hidden_dim: args.hidden_dim,
        gnn_dropout: args.gnn_dropout,
        jumping_knowledge: if args.jk == "max" {
            JumpingKnowledge::Max
        } else {
            JumpingKnowledge::Cat
        },
        mlp_depth: args.mlp_depth,
        mlp_dropout: args.mlp_dropout,
        epochs: args.epochs,
        batch_size: args.batch_size,
        learning_rate: args.learning_rate,
        seed: global.seed,
        out_dim,
    }
}

fn load_dataset(
    dir: &Path,
) -> Result<(Vec<DatasetRecord>, SplitManifest), CliError> {
    let records = read_jsonl_path(&dir.join("labels.jsonl")).map_err(data_err)?;
    let text = std::fs::read_to_string(dir.join("split.json")).map_err(data_err)?;
    let manifest: SplitManifest = serde_json::from_str(&text).map_err(data_err)?;
    Ok((records, manifest))
}

fn select<'a>(
    records: &'a [DatasetRecord],
    ids: &[String],
) -> Result<Vec<&'a DatasetRecord>, CliError> {
    let by_id: BTreeMap<&str, &DatasetRecord> =
        records.iter().map(|r| (r.id.as_str(), r)).collect();
    ids.iter()
        .map(|id| {
            by_id
                .get(id.as_str())
                .copied()
                .ok_or_else(|| CliError::Data(format!("split references unknown record `{id}`")))
        })
        .collect()
}

fn build_examples(
    records: &[DatasetRecord],
    ids: &[String],
    dir: &Path,
    kind: TargetKind,
) -> Result<Vec<TrainExample>, CliError> {
    let selected: Vec<DatasetRecord> = select(records, ids)?
        .into_iter()
        .cloned()
        .collect();
    examples_from_records(&selected, dir, kind).map_err(data_err)
}

pub fn train(global: &GlobalArgs, args: &TrainArgs) -> Result<(), CliError> {
    let (records, manifest) = load_dataset(&args.dataset)?;

    let target_kind = match args.target.as_str() {
        "sp" => TargetKind::Sp,
        "counts" => TargetKind::CountLog1p,
        other => match other.strip_prefix("single:") {
            Some(name) => TargetKind::SpSingle(name.parse::<PatternId>().map_err(usage_err)?),
            None => {
                return Err(usage_err(format!(
                    "unknown --target `{other}` (expected sp, counts, or single:<PATTERN>)"
                )))
            }
        },
    };
    let out_dim = match target_kind {
        TargetKind::SpSingle(_) => 1,
        _ => 8,
    };
    let config = model_config(global, args, out_dim);
    config.validate().map_err(|e| usage_err(e.to_string()))?;

    // single-target training projects from full profiles itself
    let load_kind = match target_kind {
        TargetKind::SpSingle(_) => TargetKind::Sp,
        k => k,
    };
    let train_set = build_examples(&records, &manifest.train, &args.dataset, load_kind)?;
    let valid_set = build_examples(&records, &manifest.valid, &args.dataset, load_kind)?;

    let (params, bundle) = match target_kind {
        TargetKind::Sp => {
            let (p, report) = train_model(&train_set, &valid_set, &config).map_err(data_err)?;
            (
                p,
                TrainBundle {
                    report,
                    residual_mean: None,
                    residual_var: None,
                },
            )
        }
        TargetKind::SpSingle(pattern) => {
            let (p, report) =
                train_single_target(&train_set, &valid_set, &config, pattern).map_err(data_err)?;
            (
                p,
                TrainBundle {
                    report,
                    residual_mean: None,
                    residual_var: None,
                },
            )
        }
        TargetKind::CountLog1p => {
            let model =
                train_count_target(&train_set, &valid_set, &config).map_err(data_err)?;
            (
                model.params,
                TrainBundle {
                    report: model.report,
                    residual_mean: Some(model.residual_mean),
                    residual_var: Some(model.residual_var),
                },
            )
        }
    };

    save_checkpoint_path(&params, &global.out_dir.join("model.json")).map_err(data_err)?;
    let report_json = serde_json::to_string_pretty(&bundle).map_err(data_err)?;
    std::fs::write(global.out_dir.join("train-report.json"), report_json).map_err(data_err)?;
    eprintln!(
        "trained {} epochs, best valid MSE {} at epoch {}",
        bundle.report.stopping_epoch, bundle.report.best_valid_mse, bundle.report.best_epoch
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// predict

#[derive(Debug, Args, Serialize)]
pub struct PredictArgs {
    /// Model checkpoint from `train`.
    #[arg(long)]
    pub model: PathBuf,
    /// Edge-list files to predict.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
}

pub fn predict(global: &GlobalArgs, args: &PredictArgs) -> Result<(), CliError> {
    let params = load_checkpoint_path(&args.model).map_err(data_err)?;
    let mut rows = Vec::new();
    for path in &args.inputs {
        let g = load_graph(path, None)?;
        let pred = forward(&params, &g, false, 0);
        rows.push((path.display().to_string(), pred));
    }
    let out = match global.format.as_str() {
        "json" => {
            let objects: Vec<serde_json::Value> = rows
                .iter()
                .map(|(p, v)| serde_json::json!({ "input": p, "prediction": v }))
                .collect();
            format!("{}\n", serde_json::Value::Array(objects))
        }
        _ => {
            let mut s = if params.config.out_dim == 8 {
                format!("input,{PATTERN_HEADER}\n")
            } else {
                "input,prediction\n".to_string()
            };
            for (p, v) in &rows {
                let values: Vec<String> = v.iter().map(|x| fmt_f64(*x)).collect();
                s.push_str(&format!("{p},{}\n", values.join(",")));
            }
            s
        }
    };
    print!("{out}");
    Ok(())
}

// ---------------------------------------------------------------------------
// eval

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    /// Profile-regression checkpoint.
    #[arg(long)]
    pub model: PathBuf,
    /// Dataset directory holding labels.jsonl and split.json.
    #[arg(long)]
    pub dataset: PathBuf,
    /// Optional count-regression checkpoint for the count-to-SP
    /// comparison.
    #[arg(long)]
    pub count_model: Option<PathBuf>,
    /// train-report.json of the count model (carries residual stats).
    #[arg(long)]
    pub count_report: Option<PathBuf>,
}

#[derive(Serialize)]
struct EvalBundle {
    thresholds: motifsp::eval::ThresholdTable,
    heatmap: motifsp::eval::AgreementMatrix,
    percentiles_squared: PercentileReport,
    percentiles_absolute: PercentileReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    count_vs_sp: Option<CountVsSp>,
}

#[derive(Serialize)]
struct CountVsSp {
    count_percentiles_absolute: PercentileReport,
    sp_percentiles_absolute: PercentileReport,
}

pub fn eval(global: &GlobalArgs, args: &EvalArgs) -> Result<(), CliError> {
    let params = load_checkpoint_path(&args.model).map_err(data_err)?;
    if params.config.out_dim != 8 {
        return Err(CliError::Data(
            "eval needs an 8-output profile model".to_string(),
        ));
    }
    let (records, manifest) = load_dataset(&args.dataset)?;
    let test_records: Vec<DatasetRecord> = select(&records, &manifest.test)?
        .into_iter()
        .cloned()
        .collect();
    if test_records.is_empty() {
        return Err(CliError::Data("test split is empty".to_string()));
    }
    let examples = examples_from_records(&test_records, &args.dataset, TargetKind::Sp)
        .map_err(data_err)?;

    let preds: Vec<SignificanceProfile> = examples
        .par_iter()
        .map(|ex| {
            let out = forward(&params, &ex.graph, false, 0);
            SignificanceProfile {
                s: out.try_into().expect("8-output model"),
            }
        })
        .collect();
    let truths: Vec<SignificanceProfile> = test_records.iter().map(|r| r.profile()).collect();
    let families: Vec<GeneratorFamily> = test_records.iter().map(|r| r.family).collect();

    let thresholds =
        threshold_table(&preds, &truths, &families, &DEFAULT_THETAS).map_err(data_err)?;
    let index = SpIndex::from_records(&records);
    let heatmap = agreement_heatmap(&preds, &families, &index).map_err(data_err)?;
    let percentiles_squared =
        error_percentiles(&preds, &truths, ErrorMetric::Squared).map_err(data_err)?;
    let percentiles_absolute =
        error_percentiles(&preds, &truths, ErrorMetric::Absolute).map_err(data_err)?;

    let count_vs_sp = match (&args.count_model, &args.count_report) {
        (Some(model_path), Some(report_path)) => Some(count_comparison(
            model_path,
            report_path,
            &records,
            &test_records,
            &examples,
            &truths,
            &percentiles_absolute,
        )?),
        (None, None) => None,
        _ => {
            return Err(usage_err(
                "--count-model and --count-report must be given together",
            ))
        }
    };

    let out = &global.out_dir;
    std::fs::write(out.join("thresholds.csv"), thresholds.to_csv()).map_err(data_err)?;
    std::fs::write(out.join("heatmap.csv"), heatmap.to_csv()).map_err(data_err)?;
    std::fs::write(out.join("heatmap.txt"), heatmap.to_text_matrix()).map_err(data_err)?;
    std::fs::write(
        out.join("percentiles_squared.csv"),
        percentiles_squared.to_csv(),
    )
    .map_err(data_err)?;
    std::fs::write(
        out.join("percentiles_absolute.csv"),
        percentiles_absolute.to_csv(),
    )
    .map_err(data_err)?;
    if let Some(cmp) = &count_vs_sp {
        let mut csv = String::from("pattern,source");
        for p in motifsp::eval::PERCENTILE_LEVELS {
            csv.push_str(&format!(",p{p}"));
        }
        csv.push('\n');
        for (i, pat) in PatternId::ALL.iter().enumerate() {
            for (label, rep) in [
                ("count", &cmp.count_percentiles_absolute),
                ("sp", &cmp.sp_percentiles_absolute),
            ] {
                csv.push_str(&format!("{},{label}", pat.name()));
                for v in rep.per_pattern[i] {
                    csv.push_str(&format!(",{}", fmt_f64(v)));
                }
                csv.push('\n');
            }
        }
        std::fs::write(out.join("count_vs_sp.csv"), csv).map_err(data_err)?;
    }

    let bundle = EvalBundle {
        thresholds,
        heatmap,
        percentiles_squared,
        percentiles_absolute,
        count_vs_sp,
    };
    let json = serde_json::to_string_pretty(&bundle).map_err(data_err)?;
    std::fs::write(out.join("eval-bundle.json"), json).map_err(data_err)?;
    eprintln!("evaluated {} test graphs", test_records.len());
    Ok(())
}

/// Score the count-regression route: approximate profiles from predicted
/// counts (all sign combinations), keep each record's closest candidate,
/// and report absolute-error percentiles next to the direct model's.
#[allow(clippy::too_many_arguments)]
fn count_comparison(
    model_path: &Path,
    report_path: &Path,
    all_records: &[DatasetRecord],
    test_records: &[DatasetRecord],
    examples: &[TrainExample],
    truths: &[SignificanceProfile],
    sp_percentiles: &PercentileReport,
) -> Result<CountVsSp, CliError> {
    let count_params = load_checkpoint_path(model_path).map_err(data_err)?;
    let text = std::fs::read_to_string(report_path).map_err(data_err)?;
    let bundle: TrainBundle = serde_json::from_str(&text).map_err(data_err)?;
    let residual_var = bundle.residual_var.ok_or_else(|| {
        CliError::Data(format!(
            "{} carries no residual statistics; train with --target counts",
            report_path.display()
        ))
    })?;
    let residuals = ResidualStats::from_variances(residual_var);

    let mut per_family: BTreeMap<GeneratorFamily, Vec<DatasetRecord>> = BTreeMap::new();
    for r in all_records {
        per_family.entry(r.family).or_default().push(r.clone());
    }
    let mut family_stats: BTreeMap<GeneratorFamily, CountStats> = BTreeMap::new();
    for (fam, recs) in &per_family {
        family_stats.insert(*fam, CountStats::from_records(recs).map_err(data_err)?);
    }

    let count_preds: Vec<SignificanceProfile> = test_records
        .par_iter()
        .zip(examples.par_iter())
        .zip(truths.par_iter())
        .map(|((rec, ex), truth)| {
            let raw = forward(&count_params, &ex.graph, false, 0);
            let output: [f64; 8] = raw.try_into().expect("8-output count model");
            let stats = &family_stats[&rec.family];
            let candidates = motifsp::eval::approx_sp_from_counts(&output, stats, &residuals);
            motifsp::eval::closest_candidate(&candidates, truth).expect("candidates not empty")
        })
        .collect();

    let count_percentiles =
        error_percentiles(&count_preds, truths, ErrorMetric::Absolute).map_err(data_err)?;
    Ok(CountVsSp {
        count_percentiles_absolute: count_percentiles,
        sp_percentiles_absolute: sp_percentiles.clone(),
    })
}

// ---------------------------------------------------------------------------
// baseline

#[derive(Debug, Args, Serialize)]
pub struct BaselineArgs {
    /// Number of simulations.
    #[arg(long, default_value_t = 1_000_000)]
    pub sims: usize,
    /// Comma-separated thresholds.
    #[arg(long, value_parser = parse_thetas, default_value = "0.05,0.1,0.25,0.5")]
    pub thetas: std::vec::Vec<f64>,
    /// `sphere` scores random guesses against random truths; `dataset`
    /// scores them against truths sampled from --dataset labels.
    #[arg(long, value_parser = ["sphere", "dataset"], default_value = "sphere")]
    pub mode: String,
    /// Dataset directory (for --mode dataset).
    #[arg(long)]
    pub dataset: Option<PathBuf>,
}

fn parse_thetas(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| {
            let v: f64 = p.trim().parse().map_err(|e: std::num::ParseFloatError| e.to_string())?;
            if !(0.0 < v && v <= 0.5) {
                return Err(format!("theta must be in (0, 0.5], got {v}"));
            }
            Ok(v)
        })
        .collect()
}

pub fn baseline(global: &GlobalArgs, args: &BaselineArgs) -> Result<(), CliError> {
    let (mode, truths) = match args.mode.as_str() {
        "dataset" => {
            let dir = args.dataset.as_ref().ok_or_else(|| {
                usage_err("--mode dataset requires --dataset pointing at labels")
            })?;
            let records = read_jsonl_path(&dir.join("labels.jsonl")).map_err(data_err)?;
            let truths: Vec<SignificanceProfile> =
                records.iter().map(|r| r.profile()).collect();
            (BaselineMode::SphereVsDataset, truths)
        }
        _ => (BaselineMode::SphereVsSphere, Vec::new()),
    };
    let rates =
        baseline_rates(&args.thetas, args.sims, global.seed, mode, &truths).map_err(data_err)?;

    let out = match global.format.as_str() {
        "json" => {
            let objects: Vec<serde_json::Value> = rates
                .iter()
                .map(|(theta, rate)| serde_json::json!({ "theta": theta, "rate": rate }))
                .collect();
            format!("{}\n", serde_json::Value::Array(objects))
        }
        _ => {
            let mut s = String::from("theta,rate\n");
            for (theta, rate) in &rates {
                s.push_str(&format!("{theta},{}\n", fmt_f64(*rate)));
            }
            s
        }
    };
    print!("{out}");
    let _ = std::io::stdout().flush();
    Ok(())
}
