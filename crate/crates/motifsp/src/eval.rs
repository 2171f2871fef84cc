//! Evaluation protocols: threshold-correctness tables, the random
//! baseline T, generator-agreement heatmaps, error percentiles, the
//! count-to-SP approximation, and speedup accounting.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::census::PatternId;
use crate::dataset::DatasetRecord;
use crate::generators::GeneratorFamily;
use crate::sp::{is_correct, normalize, sp_distance, SignificanceProfile};

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("aligned sequences have different lengths: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("zero denominator in {0}")]
    ZeroDenominator(&'static str),
}

/// The error thresholds reported in the reference tables.
pub const DEFAULT_THETAS: [f64; 4] = [0.05, 0.10, 0.25, 0.50];

/// Correct/incorrect counts per (family, theta).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdTable {
    pub thetas: Vec<f64>,
    /// Per family, one (correct, incorrect) pair per theta.
    pub rows: BTreeMap<GeneratorFamily, Vec<(usize, usize)>>,
}

impl ThresholdTable {
    /// CSV columns: family, then correct/incorrect per theta in order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("family");
        for t in &self.thetas {
            out.push_str(&format!(",correct_{t},incorrect_{t}"));
        }
        out.push('\n');
        for (family, cells) in &self.rows {
            out.push_str(family.name());
            for (c, i) in cells {
                out.push_str(&format!(",{c},{i}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Count threshold-correct predictions, grouped by generator family.
pub fn threshold_table(
    preds: &[SignificanceProfile],
    truths: &[SignificanceProfile],
    families: &[GeneratorFamily],
    thetas: &[f64],
) -> Result<ThresholdTable, EvalError> {
    if preds.len() != truths.len() {
        return Err(EvalError::LengthMismatch(preds.len(), truths.len()));
    }
    if preds.len() != families.len() {
        return Err(EvalError::LengthMismatch(preds.len(), families.len()));
    }
    let mut rows: BTreeMap<GeneratorFamily, Vec<(usize, usize)>> = BTreeMap::new();
    for ((pred, truth), family) in preds.iter().zip(truths).zip(families) {
        let cells = rows
            .entry(*family)
            .or_insert_with(|| vec![(0, 0); thetas.len()]);
        for (k, &theta) in thetas.iter().enumerate() {
            if is_correct(pred, truth, theta) {
                cells[k].0 += 1;
            } else {
                cells[k].1 += 1;
            }
        }
    }
    Ok(ThresholdTable {
        thetas: thetas.to_vec(),
        rows,
    })
}

/// What the random baseline draws its "truth" profiles from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineMode {
    /// Both truth and prediction drawn uniformly on the per-group spheres.
    SphereVsSphere,
    /// Random prediction scored against truths sampled from a dataset.
    SphereVsDataset,
}

/// Draw a random profile: isotropic Gaussian per group, normalized to the
/// group spheres.
fn random_profile(rng: &mut ChaCha8Rng) -> SignificanceProfile {
    let mut s = [0.0f64; 8];
    for v in &mut s {
        *v = StandardNormal.sample(rng);
    }
    let z = crate::nullmodel::ZScores { z: s };
    normalize(&z)
}

/// Rate of threshold-correct guesses for the naive random baseline, per
/// theta. Simulations run in fixed-size blocks with per-block seeds, so
/// the result is independent of the worker count.
pub fn baseline_rates(
    thetas: &[f64],
    n_sims: usize,
    seed: u64,
    mode: BaselineMode,
    dataset_truths: &[SignificanceProfile],
) -> Result<Vec<(f64, f64)>, EvalError> {
    if n_sims == 0 {
        return Err(EvalError::EmptyInput("n_sims"));
    }
    if mode == BaselineMode::SphereVsDataset && dataset_truths.is_empty() {
        return Err(EvalError::EmptyInput("dataset truths"));
    }
    const BLOCK: usize = 8192;
    let blocks = n_sims.div_ceil(BLOCK);
    let hit_counts: Vec<Vec<u64>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(b as u64));
            let sims = BLOCK.min(n_sims - b * BLOCK);
            let mut hits = vec![0u64; thetas.len()];
            for _ in 0..sims {
                let truth = match mode {
                    BaselineMode::SphereVsSphere => random_profile(&mut rng),
                    BaselineMode::SphereVsDataset => {
                        use rand::Rng;
                        dataset_truths[rng.gen_range(0..dataset_truths.len())]
                    }
                };
                let pred = random_profile(&mut rng);
                for (k, &theta) in thetas.iter().enumerate() {
                    if is_correct(&pred, &truth, theta) {
                        hits[k] += 1;
                    }
                }
            }
            hits
        })
        .collect();
    let mut totals = vec![0u64; thetas.len()];
    for hits in hit_counts {
        for (t, h) in totals.iter_mut().zip(hits) {
            *t += h;
        }
    }
    Ok(thetas
        .iter()
        .zip(totals)
        .map(|(&theta, hits)| (theta, hits as f64 / n_sims as f64))
        .collect())
}

/// The set of all known true SPs, ordered by record id so nearest-profile
/// ties resolve to the lowest id.
#[derive(Debug, Clone)]
pub struct SpIndex {
    entries: Vec<(String, GeneratorFamily, SignificanceProfile)>,
}

impl SpIndex {
    pub fn from_records(records: &[DatasetRecord]) -> SpIndex {
        let mut entries: Vec<(String, GeneratorFamily, SignificanceProfile)> = records
            .iter()
            .map(|r| (r.id.clone(), r.family, r.profile()))
            .collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        SpIndex { entries }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Family of the nearest true SP by mean absolute difference.
    pub fn nearest_family(&self, sp: &SignificanceProfile) -> GeneratorFamily {
        let mut best = (f64::INFINITY, 0usize);
        for (i, (_, _, truth)) in self.entries.iter().enumerate() {
            let d = sp_distance(sp, truth);
            if d < best.0 {
                best = (d, i);
            }
        }
        self.entries[best.1].1
    }
}

/// Confusion-style agreement counts: rows are true families, columns the
/// family of the nearest true SP to each prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementMatrix {
    pub families: Vec<GeneratorFamily>,
    /// counts[row][col], row = true family, col = matched family.
    pub counts: Vec<Vec<usize>>,
}

impl AgreementMatrix {
    pub fn row_sums(&self) -> Vec<usize> {
        self.counts.iter().map(|row| row.iter().sum()).collect()
    }

    pub fn diagonal_total(&self) -> usize {
        (0..self.families.len()).map(|i| self.counts[i][i]).sum()
    }

    /// CSV: header row of matched families, one row per true family.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("true_family");
        for f in &self.families {
            out.push_str(&format!(",{}", f.name()));
        }
        out.push('\n');
        for (i, f) in self.families.iter().enumerate() {
            out.push_str(f.name());
            for c in &self.counts[i] {
                out.push_str(&format!(",{c}"));
            }
            out.push('\n');
        }
        out
    }

    /// Column-aligned text matrix for quick terminal reading.
    pub fn to_text_matrix(&self) -> String {
        let name_width = self
            .families
            .iter()
            .map(|f| f.name().len())
            .max()
            .unwrap_or(4)
            .max(4);
        let cell = 7usize;
        let mut out = format!("{:name_width$}", "");
        for f in &self.families {
            let short: String = f.name().chars().take(cell - 1).collect();
            out.push_str(&format!(" {short:>w$}", w = cell - 1));
        }
        out.push('\n');
        for (i, f) in self.families.iter().enumerate() {
            out.push_str(&format!("{:name_width$}", f.name()));
            for c in &self.counts[i] {
                out.push_str(&format!(" {c:>w$}", w = cell - 1));
            }
            out.push('\n');
        }
        out
    }
}

/// For each prediction, find the nearest true SP in the index and count
/// the (true family, matched family) pair.
pub fn agreement_heatmap(
    preds: &[SignificanceProfile],
    true_families: &[GeneratorFamily],
    index: &SpIndex,
) -> Result<AgreementMatrix, EvalError> {
    if preds.len() != true_families.len() {
        return Err(EvalError::LengthMismatch(preds.len(), true_families.len()));
    }
    if index.is_empty() {
        return Err(EvalError::EmptyInput("sp index"));
    }
    let mut present: Vec<GeneratorFamily> = GeneratorFamily::ALL
        .into_iter()
        .filter(|f| {
            true_families.contains(f) || index.entries.iter().any(|(_, fam, _)| fam == f)
        })
        .collect();
    present.dedup();
    let pos: BTreeMap<GeneratorFamily, usize> = present
        .iter()
        .enumerate()
        .map(|(i, f)| (*f, i))
        .collect();

    let matched: Vec<GeneratorFamily> = preds
        .par_iter()
        .map(|sp| index.nearest_family(sp))
        .collect();

    let mut counts = vec![vec![0usize; present.len()]; present.len()];
    for (truth, matched_family) in true_families.iter().zip(matched) {
        counts[pos[truth]][pos[&matched_family]] += 1;
    }
    Ok(AgreementMatrix {
        families: present,
        counts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorMetric {
    Squared,
    Absolute,
}

/// The percentile levels reported per pattern.
pub const PERCENTILE_LEVELS: [u8; 5] = [25, 50, 75, 95, 100];

/// Nearest-rank error percentiles, one row per pattern.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercentileReport {
    pub metric: ErrorMetric,
    /// per_pattern[pattern][level], levels in [`PERCENTILE_LEVELS`] order.
    pub per_pattern: Vec<[f64; 5]>,
}

impl PercentileReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("pattern");
        for p in PERCENTILE_LEVELS {
            out.push_str(&format!(",p{p}"));
        }
        out.push('\n');
        for (i, pat) in PatternId::ALL.iter().enumerate() {
            out.push_str(pat.name());
            for v in self.per_pattern[i] {
                out.push_str(&format!(",{}", crate::sp::fmt_f64(v)));
            }
            out.push('\n');
        }
        out
    }
}

/// Nearest-rank percentile: the value at rank `ceil(p/100 · N)` of the
/// sorted sample (1-based), no interpolation.
fn nearest_rank(sorted: &[f64], percentile: u8) -> f64 {
    let n = sorted.len();
    let rank = ((percentile as f64 / 100.0) * n as f64).ceil() as usize;
    sorted[rank.clamp(1, n) - 1]
}

pub fn error_percentiles(
    preds: &[SignificanceProfile],
    truths: &[SignificanceProfile],
    metric: ErrorMetric,
) -> Result<PercentileReport, EvalError> {
    if preds.len() != truths.len() {
        return Err(EvalError::LengthMismatch(preds.len(), truths.len()));
    }
    if preds.is_empty() {
        return Err(EvalError::EmptyInput("predictions"));
    }
    let mut per_pattern = Vec::with_capacity(8);
    for k in 0..8 {
        let mut errors: Vec<f64> = preds
            .iter()
            .zip(truths)
            .map(|(p, t)| {
                let d = (p.s[k] - t.s[k]).abs();
                match metric {
                    ErrorMetric::Squared => d * d,
                    ErrorMetric::Absolute => d,
                }
            })
            .collect();
        errors.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut row = [0.0; 5];
        for (j, p) in PERCENTILE_LEVELS.into_iter().enumerate() {
            row[j] = nearest_rank(&errors, p);
        }
        per_pattern.push(row);
    }
    Ok(PercentileReport {
        metric,
        per_pattern,
    })
}

/// Per-family count statistics in `log1p` space (mean and population
/// variance), gathered at dataset-construction time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountStats {
    pub mean: [f64; 8],
    pub var: [f64; 8],
}

impl CountStats {
    /// Statistics of the records' stored counts, `log1p`-transformed.
    pub fn from_records(records: &[DatasetRecord]) -> Result<CountStats, EvalError> {
        if records.is_empty() {
            return Err(EvalError::EmptyInput("records"));
        }
        let n = records.len() as f64;
        let mut mean = [0.0; 8];
        for r in records {
            for k in 0..8 {
                mean[k] += (r.counts[k] as f64).ln_1p();
            }
        }
        for v in &mut mean {
            *v /= n;
        }
        let mut var = [0.0; 8];
        for r in records {
            for k in 0..8 {
                let d = (r.counts[k] as f64).ln_1p() - mean[k];
                var[k] += d * d;
            }
        }
        for v in &mut var {
            *v /= n;
        }
        Ok(CountStats { mean, var })
    }
}

/// Residual statistics of the count-regression model (σ_z and Var(z),
/// `log1p` space).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualStats {
    pub sigma: [f64; 8],
    pub var: [f64; 8],
}

impl ResidualStats {
    pub fn from_variances(var: [f64; 8]) -> ResidualStats {
        ResidualStats {
            sigma: var.map(f64::sqrt),
            var,
        }
    }
}

/// Approximate the profiles a count-regression output implies without
/// generating control graphs: per pattern,
/// `z_i = ((y_i − E[y_i]) ± σ_z,i) / (Var(y_i)² + Var(z_i)²)^(1/2)`,
/// one candidate per sign combination, each normalized to an SP. A zero
/// denominator degenerates to the sign of `y_i − E[y_i]`.
pub fn approx_sp_from_counts(
    count_model_output: &[f64; 8],
    dataset_stats: &CountStats,
    residual_stats: &ResidualStats,
) -> Vec<SignificanceProfile> {
    // per-pattern candidate z values
    let mut choices: Vec<Vec<f64>> = Vec::with_capacity(8);
    for k in 0..8 {
        let centered = count_model_output[k] - dataset_stats.mean[k];
        let denom =
            (dataset_stats.var[k].powi(2) + residual_stats.var[k].powi(2)).sqrt();
        if denom == 0.0 {
            choices.push(vec![centered.signum() * f64::from(centered != 0.0)]);
        } else if residual_stats.sigma[k] == 0.0 {
            choices.push(vec![centered / denom]);
        } else {
            choices.push(vec![
                (centered + residual_stats.sigma[k]) / denom,
                (centered - residual_stats.sigma[k]) / denom,
            ]);
        }
    }

    let mut candidates = Vec::new();
    let total: usize = choices.iter().map(Vec::len).product();
    for mut idx in 0..total {
        let mut z = [0.0f64; 8];
        for k in 0..8 {
            let opts = &choices[k];
            z[k] = opts[idx % opts.len()];
            idx /= opts.len();
        }
        candidates.push(normalize(&crate::nullmodel::ZScores { z }));
    }
    candidates
}

/// The candidate closest to the truth by mean absolute difference — the
/// most favourable reading of the count-based estimate.
pub fn closest_candidate(
    candidates: &[SignificanceProfile],
    truth: &SignificanceProfile,
) -> Result<SignificanceProfile, EvalError> {
    candidates
        .iter()
        .map(|c| (sp_distance(c, truth), c))
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
        .map(|(_, c)| *c)
        .ok_or(EvalError::EmptyInput("candidates"))
}

/// Wall and core totals of one task, in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaskTimes {
    pub wall_seconds: f64,
    pub core_seconds: f64,
}

/// `(speedup, core_efficiency_gain)` of task A relative to task B: the
/// ratios of wall totals and of core-time totals.
pub fn speedup_report(a: &TaskTimes, b: &TaskTimes) -> Result<(f64, f64), EvalError> {
    if b.wall_seconds <= 0.0 || b.core_seconds <= 0.0 {
        return Err(EvalError::ZeroDenominator("task B totals"));
    }
    Ok((
        a.wall_seconds / b.wall_seconds,
        a.core_seconds / b.core_seconds,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(values: [f64; 8]) -> SignificanceProfile {
        SignificanceProfile { s: values }
    }

    fn unit_sp(seed: u64) -> SignificanceProfile {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        random_profile(&mut rng)
    }

    #[test]
    fn threshold_table_all_exact_predictions() {
        let truths: Vec<_> = (0..6).map(unit_sp).collect();
        let families = vec![GeneratorFamily::Star; 6];
        let table =
            threshold_table(&truths, &truths, &families, &DEFAULT_THETAS).unwrap();
        for cells in table.rows.values() {
            for (c, i) in cells {
                assert_eq!((*c, *i), (6, 0));
            }
        }
    }

    #[test]
    fn threshold_table_negated_predictions_fail_everywhere() {
        let truths: Vec<_> = (0..4).map(unit_sp).collect();
        let preds: Vec<_> = truths.iter().map(|t| sp(t.s.map(|v| -v))).collect();
        let families = vec![GeneratorFamily::Dgm; 4];
        let table = threshold_table(&preds, &truths, &families, &DEFAULT_THETAS).unwrap();
        for cells in table.rows.values() {
            for (c, i) in cells {
                assert_eq!((*c, *i), (0, 4));
            }
        }
    }

    #[test]
    fn threshold_correctness_is_monotone_in_theta() {
        let truths: Vec<_> = (0..40).map(unit_sp).collect();
        let preds: Vec<_> = (100..140).map(unit_sp).collect();
        let families = vec![GeneratorFamily::ErdosRenyi; 40];
        let table = threshold_table(&preds, &truths, &families, &DEFAULT_THETAS).unwrap();
        let cells = &table.rows[&GeneratorFamily::ErdosRenyi];
        for w in cells.windows(2) {
            assert!(w[0].0 <= w[1].0);
        }
    }

    #[test]
    fn threshold_table_rejects_misaligned_input() {
        let truths: Vec<_> = (0..3).map(unit_sp).collect();
        assert!(matches!(
            threshold_table(&truths, &truths[..2], &[], &DEFAULT_THETAS),
            Err(EvalError::LengthMismatch(3, 2))
        ));
    }

    #[test]
    fn baseline_rate_sign_only_matches_analytic() {
        // at theta = 0.5 only signs matter; both draws isotropic means the
        // correct-guess probability is exactly 2^-8
        let rates = baseline_rates(&[0.5], 100_000, 9, BaselineMode::SphereVsSphere, &[])
            .unwrap();
        let p_hat = rates[0].1;
        // 95% Wilson interval must contain 2^-8
        let n = 100_000f64;
        let z = 1.959963984540054f64;
        let center = (p_hat + z * z / (2.0 * n)) / (1.0 + z * z / n);
        let half = z * (p_hat * (1.0 - p_hat) / n + z * z / (4.0 * n * n)).sqrt()
            / (1.0 + z * z / n);
        let target = 2f64.powi(-8);
        assert!(
            (center - half..=center + half).contains(&target),
            "p_hat = {p_hat}, interval = [{}, {}]",
            center - half,
            center + half
        );
    }

    #[test]
    fn baseline_rate_vanishes_for_tiny_theta() {
        let rates = baseline_rates(
            &[1e-6],
            20_000,
            3,
            BaselineMode::SphereVsSphere,
            &[],
        )
        .unwrap();
        assert_eq!(rates[0].1, 0.0);
    }

    #[test]
    fn baseline_is_deterministic_across_block_counts() {
        let a = baseline_rates(&DEFAULT_THETAS.to_vec(), 30_000, 5, BaselineMode::SphereVsSphere, &[])
            .unwrap();
        let b = baseline_rates(&DEFAULT_THETAS.to_vec(), 30_000, 5, BaselineMode::SphereVsSphere, &[])
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn baseline_dataset_mode_needs_truths() {
        assert!(baseline_rates(&[0.5], 10, 1, BaselineMode::SphereVsDataset, &[]).is_err());
        let truths = vec![unit_sp(1), unit_sp(2)];
        let rates =
            baseline_rates(&[0.5], 1000, 1, BaselineMode::SphereVsDataset, &truths).unwrap();
        assert!(rates[0].1 >= 0.0);
    }

    fn fake_record(id: &str, family: GeneratorFamily, profile: SignificanceProfile) -> DatasetRecord {
        DatasetRecord {
            id: id.to_string(),
            family,
            n: 4,
            m: 3,
            edge_path: format!("edges/{id}.edges"),
            counts: [0; 8],
            z: profile.s,
            sp: profile.s,
        }
    }

    #[test]
    fn perfect_predictor_gives_diagonal_heatmap() {
        let families = [
            GeneratorFamily::Star,
            GeneratorFamily::Dgm,
            GeneratorFamily::Barbell,
        ];
        let records: Vec<DatasetRecord> = families
            .iter()
            .enumerate()
            .map(|(i, &f)| fake_record(&format!("r{i}"), f, unit_sp(i as u64)))
            .collect();
        let index = SpIndex::from_records(&records);
        let preds: Vec<_> = records.iter().map(|r| r.profile()).collect();
        let true_families: Vec<_> = records.iter().map(|r| r.family).collect();
        let h = agreement_heatmap(&preds, &true_families, &index).unwrap();
        assert_eq!(h.diagonal_total(), 3);
        assert_eq!(h.row_sums(), vec![1, 1, 1]);
    }

    #[test]
    fn constant_predictor_fills_one_column() {
        let records: Vec<DatasetRecord> = (0..5)
            .map(|i| {
                let fam = if i < 3 {
                    GeneratorFamily::Star
                } else {
                    GeneratorFamily::Dgm
                };
                fake_record(&format!("r{i}"), fam, unit_sp(i as u64))
            })
            .collect();
        let index = SpIndex::from_records(&records);
        let constant = records[0].profile();
        let preds = vec![constant; 5];
        let true_families: Vec<_> = records.iter().map(|r| r.family).collect();
        let h = agreement_heatmap(&preds, &true_families, &index).unwrap();
        let col_of_star = h
            .families
            .iter()
            .position(|f| *f == GeneratorFamily::Star)
            .unwrap();
        for (i, row) in h.counts.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if j == col_of_star {
                    assert_eq!(c, h.row_sums()[i]);
                } else {
                    assert_eq!(c, 0);
                }
            }
        }
    }

    #[test]
    fn heatmap_requires_an_index() {
        let index = SpIndex { entries: vec![] };
        assert!(agreement_heatmap(&[], &[], &index).is_err());
    }

    #[test]
    fn percentiles_zero_for_identical_predictions() {
        let truths: Vec<_> = (0..7).map(unit_sp).collect();
        let rep = error_percentiles(&truths, &truths, ErrorMetric::Squared).unwrap();
        for row in &rep.per_pattern {
            assert_eq!(*row, [0.0; 5]);
        }
    }

    #[test]
    fn percentiles_single_record_collapse() {
        let t = [unit_sp(1)];
        let p = [unit_sp(2)];
        let rep = error_percentiles(&p, &t, ErrorMetric::Absolute).unwrap();
        for row in &rep.per_pattern {
            for v in row {
                assert_eq!(*v, row[0]);
            }
        }
    }

    #[test]
    fn percentiles_are_monotone() {
        let truths: Vec<_> = (0..50).map(unit_sp).collect();
        let preds: Vec<_> = (50..100).map(unit_sp).collect();
        let rep = error_percentiles(&preds, &truths, ErrorMetric::Squared).unwrap();
        for row in &rep.per_pattern {
            for w in row.windows(2) {
                assert!(w[0] <= w[1]);
            }
        }
    }

    #[test]
    fn approx_sp_degenerate_cases() {
        let stats = CountStats {
            mean: [1.0; 8],
            var: [0.5; 8],
        };
        // zero residual spread: exactly one candidate
        let residuals = ResidualStats::from_variances([0.0; 8]);
        let cands = approx_sp_from_counts(&[2.0; 8], &stats, &residuals);
        assert_eq!(cands.len(), 1);

        // y = E[y] and all variances zero: the zero-group profile
        let zero_stats = CountStats {
            mean: [2.0; 8],
            var: [0.0; 8],
        };
        let cands = approx_sp_from_counts(&[2.0; 8], &zero_stats, &residuals);
        assert_eq!(cands.len(), 1);
        assert_eq!(cands[0].s, [0.0; 8]);
    }

    #[test]
    fn approx_sp_candidate_count_is_bounded() {
        let stats = CountStats {
            mean: [0.0; 8],
            var: [1.0; 8],
        };
        let residuals = ResidualStats::from_variances([0.25; 8]);
        let cands = approx_sp_from_counts(&[0.5; 8], &stats, &residuals);
        assert_eq!(cands.len(), 256); // 2^8 sign choices
        let truth = unit_sp(3);
        let best = closest_candidate(&cands, &truth).unwrap();
        for c in &cands {
            assert!(sp_distance(&best, &truth) <= sp_distance(c, &truth) + 1e-15);
        }
    }

    #[test]
    fn speedup_examples() {
        let a = TaskTimes {
            wall_seconds: 100.0,
            core_seconds: 1600.0,
        };
        let b = TaskTimes {
            wall_seconds: 1.0,
            core_seconds: 100.0,
        };
        assert_eq!(speedup_report(&a, &a).unwrap(), (1.0, 1.0));
        let (speedup, core_gain) = speedup_report(&a, &b).unwrap();
        assert_eq!(speedup, 100.0);
        assert_eq!(core_gain, 16.0);
        assert!(speedup_report(&a, &TaskTimes { wall_seconds: 0.0, core_seconds: 1.0 }).is_err());
    }
}
