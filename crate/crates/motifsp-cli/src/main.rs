//! `motifsp` — the pipeline as one binary.
//!
//! Subcommands: `generate`, `census`, `sp`, `dataset`, `train`,
//! `predict`, `eval`, `baseline`. Every run is reproducible from its
//! seeds; numeric outputs are byte-identical at any `--threads` value,
//! and each run drops a manifest JSON (config, versions, seeds, wall and
//! core time) under the output directory.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error.

mod ops;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) => f.write_str(m),
        }
    }
}

/// Shorthand for mapping any library error into a data error.
pub fn data_err(e: impl std::fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

pub fn usage_err(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Parser, Serialize)]
#[command(name = "motifsp", version, about = "Motif significance profiles: exact censuses, null models, synthetic corpora and a learned predictor")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct GlobalArgs {
    /// Base seed; every stage derives its streams from this.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Worker threads (0 = automatic). MOTIFSP_THREADS is the fallback.
    /// Thread count never changes numeric output.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Directory for outputs and the run manifest.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    /// Output format for report-style commands.
    #[arg(long, global = true, value_parser = ["csv", "json"], default_value = "csv")]
    pub format: String,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Generate graphs from a JSON config of generator rows.
    Generate(ops::GenerateArgs),
    /// Exact induced census of one edge-list graph.
    Census(ops::CensusArgs),
    /// Census, null model and significance profile of one graph.
    Sp(ops::SpArgs),
    /// Label a generated corpus and split it into train/valid/test.
    Dataset(ops::DatasetArgs),
    /// Train a profile regressor on a labeled dataset.
    Train(ops::TrainArgs),
    /// Predict profiles for edge-list graphs with a trained model.
    Predict(ops::PredictArgs),
    /// Threshold tables, agreement heatmap and error percentiles on the
    /// test split.
    Eval(ops::EvalArgs),
    /// Correct-guess rates of the naive random-profile baseline.
    Baseline(ops::BaselineArgs),
}

/// Process CPU time (all threads), in seconds.
fn core_time_seconds() -> f64 {
    let mut ts = libc::timespec {
        tv_sec: 0,
        tv_nsec: 0,
    };
    let rc = unsafe { libc::clock_gettime(libc::CLOCK_PROCESS_CPUTIME_ID, &mut ts) };
    if rc != 0 {
        return 0.0;
    }
    ts.tv_sec as f64 + ts.tv_nsec as f64 * 1e-9
}

#[derive(Serialize)]
struct RunManifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a Command,
    global: &'a GlobalArgs,
    threads_used: usize,
    started_unix_seconds: u64,
    wall_seconds: f64,
    core_seconds: f64,
}

fn real_main() -> Result<(), CliError> {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return Ok(());
            }
            return Err(usage_err(e.to_string()));
        }
    };

    let threads = if cli.global.threads > 0 {
        cli.global.threads
    } else {
        std::env::var("MOTIFSP_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(0)
    };
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(data_err)?;
    }
    let threads_used = rayon::current_num_threads();

    std::fs::create_dir_all(&cli.global.out_dir).map_err(data_err)?;

    let started = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let wall_start = std::time::Instant::now();
    let core_start = core_time_seconds();

    match &cli.command {
        Command::Generate(args) => ops::generate(&cli.global, args)?,
        Command::Census(args) => ops::census(&cli.global, args)?,
        Command::Sp(args) => ops::sp(&cli.global, args)?,
        Command::Dataset(args) => ops::dataset(&cli.global, args)?,
        Command::Train(args) => ops::train(&cli.global, args)?,
        Command::Predict(args) => ops::predict(&cli.global, args)?,
        Command::Eval(args) => ops::eval(&cli.global, args)?,
        Command::Baseline(args) => ops::baseline(&cli.global, args)?,
    }

    let manifest = RunManifest {
        tool: "motifsp",
        version: env!("CARGO_PKG_VERSION"),
        command: &cli.command,
        global: &cli.global,
        threads_used,
        started_unix_seconds: started,
        wall_seconds: wall_start.elapsed().as_secs_f64(),
        core_seconds: core_time_seconds() - core_start,
    };
    let manifest_json = serde_json::to_string_pretty(&manifest).map_err(data_err)?;
    std::fs::write(cli.global.out_dir.join("run-manifest.json"), manifest_json)
        .map_err(data_err)?;
    Ok(())
}

fn main() {
    match real_main() {
        Ok(()) => {}
        Err(CliError::Usage(msg)) => {
            eprintln!("{msg}");
            std::process::exit(1);
        }
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
    }
}
