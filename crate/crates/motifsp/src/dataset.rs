//! Labeled-dataset construction and persistence.
//!
//! A record ties together a generated graph (stored as an edge-list file),
//! its generator family, the exact census, the Z-scores against the
//! degree-preserving null and the normalized significance profile. Records
//! are stored one-JSON-object-per-line; reading revalidates the profile
//! invariants so corrupt labels cannot slip back in.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::census::{CensusError, GraphletCounts};
use crate::generators::GeneratorFamily;
use crate::graph::{Graph, GraphError};
use crate::nullmodel::{zscores_for_graph, NullConfig, ZScores};
use crate::sp::{normalize, SignificanceProfile};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error(transparent)]
    Census(#[from] CensusError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {source}")]
    Malformed {
        line: usize,
        source: serde_json::Error,
    },
    #[error("line {line}: {msg}")]
    Validation { line: usize, msg: String },
    #[error("split ratios must be non-negative and sum to 1, got {0:?}")]
    BadRatios((f64, f64, f64)),
    #[error("family {family} has only {count} records, need at least 3 to split")]
    FamilyTooSmall {
        family: GeneratorFamily,
        count: usize,
    },
}

/// One labeled training unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub id: String,
    pub family: GeneratorFamily,
    pub n: usize,
    pub m: usize,
    /// Path of the edge-list file, relative to the dataset directory.
    pub edge_path: String,
    pub counts: [u64; 8],
    pub z: [f64; 8],
    pub sp: [f64; 8],
}

impl DatasetRecord {
    pub fn counts(&self) -> GraphletCounts {
        GraphletCounts::from_array(self.counts)
    }

    pub fn zscores(&self) -> ZScores {
        ZScores { z: self.z }
    }

    pub fn profile(&self) -> SignificanceProfile {
        SignificanceProfile { s: self.sp }
    }

    fn validate(&self, line: usize) -> Result<(), DatasetError> {
        let sp = self.profile();
        if !sp.check_invariants(1e-9) {
            return Err(DatasetError::Validation {
                line,
                msg: format!("significance profile violates group-norm invariants: {:?}", self.sp),
            });
        }
        let renorm = normalize(&self.zscores());
        for i in 0..8 {
            if (renorm.s[i] - self.sp[i]).abs() > 1e-9 {
                return Err(DatasetError::Validation {
                    line,
                    msg: format!(
                        "stored sp[{i}] = {} disagrees with normalize(z) = {}",
                        self.sp[i], renorm.s[i]
                    ),
                });
            }
        }
        Ok(())
    }
}

/// Labels graphs and persists their edge lists under `out_dir/edges/`.
pub struct Labeler {
    out_dir: PathBuf,
    null: NullConfig,
}

/// Stable 64-bit FNV-1a, used to derive per-record null seeds from ids.
pub(crate) fn fnv1a64(data: &[u8]) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for &b in data {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

impl Labeler {
    pub fn new(out_dir: impl Into<PathBuf>, null: NullConfig) -> Self {
        Labeler {
            out_dir: out_dir.into(),
            null,
        }
    }

    /// Seed of the null-model stream for a record id.
    pub fn null_seed(&self, id: &str) -> u64 {
        self.null.base_seed ^ fnv1a64(id.as_bytes())
    }

    /// Run census → null sampling → Z-scores → normalization, write the
    /// edge list, and return the record.
    pub fn label(
        &self,
        g: &Graph,
        family: GeneratorFamily,
        id: &str,
    ) -> Result<DatasetRecord, DatasetError> {
        let cfg = NullConfig {
            base_seed: self.null_seed(id),
            ..self.null
        };
        let (counts, z) = zscores_for_graph(g, &cfg)?;
        let sp = normalize(&z);

        let edges_dir = self.out_dir.join("edges");
        std::fs::create_dir_all(&edges_dir)?;
        let rel = format!("edges/{id}.edges");
        g.write_edge_list_path(&self.out_dir.join(&rel))?;

        Ok(DatasetRecord {
            id: id.to_string(),
            family,
            n: g.n(),
            m: g.m(),
            edge_path: rel,
            counts: counts.as_array(),
            z: z.z,
            sp: sp.s,
        })
    }

    pub fn out_dir(&self) -> &Path {
        &self.out_dir
    }
}

/// Ids of the train/valid/test partition, stratified per family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub train: Vec<String>,
    pub valid: Vec<String>,
    pub test: Vec<String>,
    pub ratios: (f64, f64, f64),
    pub seed: u64,
}

/// Stratified split: each family is shuffled with a seed derived from
/// `seed` and the family's registry index, then sliced by the ratios.
pub fn split(
    records: &[DatasetRecord],
    ratios: (f64, f64, f64),
    seed: u64,
) -> Result<SplitManifest, DatasetError> {
    let (r_train, r_valid, r_test) = ratios;
    let sum = r_train + r_valid + r_test;
    if r_train < 0.0 || r_valid < 0.0 || r_test < 0.0 || (sum - 1.0).abs() > 1e-9 {
        return Err(DatasetError::BadRatios(ratios));
    }

    let mut per_family: BTreeMap<GeneratorFamily, Vec<&str>> = BTreeMap::new();
    for rec in records {
        per_family.entry(rec.family).or_default().push(&rec.id);
    }
    for (family, ids) in &per_family {
        if ids.len() < 3 {
            return Err(DatasetError::FamilyTooSmall {
                family: *family,
                count: ids.len(),
            });
        }
    }

    let mut manifest = SplitManifest {
        train: Vec::new(),
        valid: Vec::new(),
        test: Vec::new(),
        ratios,
        seed,
    };
    for (family, mut ids) in per_family {
        let family_index = GeneratorFamily::ALL
            .iter()
            .position(|&f| f == family)
            .expect("family is registered") as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(family_index));
        for i in (1..ids.len()).rev() {
            let j = rng.gen_range(0..=i);
            ids.swap(i, j);
        }
        let k = ids.len() as f64;
        // the epsilon absorbs float dust so 10 × (0.7, 0.2, 0.1) is 7/2/1
        let cut_train = (k * r_train + 1e-9).floor() as usize;
        let cut_valid = (k * (r_train + r_valid) + 1e-9).floor() as usize;
        manifest
            .train
            .extend(ids[..cut_train].iter().map(|s| s.to_string()));
        manifest
            .valid
            .extend(ids[cut_train..cut_valid].iter().map(|s| s.to_string()));
        manifest
            .test
            .extend(ids[cut_valid..].iter().map(|s| s.to_string()));
    }
    Ok(manifest)
}

/// Write records as JSON lines.
pub fn write_jsonl<W: Write>(records: &[DatasetRecord], mut sink: W) -> Result<(), DatasetError> {
    for rec in records {
        serde_json::to_writer(&mut sink, rec).map_err(|source| DatasetError::Malformed {
            line: 0,
            source,
        })?;
        sink.write_all(b"\n")?;
    }
    Ok(())
}

/// Read and revalidate JSON-line records.
pub fn read_jsonl<R: BufRead>(source: R) -> Result<Vec<DatasetRecord>, DatasetError> {
    let mut records = Vec::new();
    for (idx, line) in source.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: DatasetRecord =
            serde_json::from_str(&line).map_err(|source| DatasetError::Malformed {
                line: idx + 1,
                source,
            })?;
        rec.validate(idx + 1)?;
        records.push(rec);
    }
    Ok(records)
}

pub fn write_jsonl_path(records: &[DatasetRecord], path: &Path) -> Result<(), DatasetError> {
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    write_jsonl(records, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn read_jsonl_path(path: &Path) -> Result<Vec<DatasetRecord>, DatasetError> {
    let file = std::fs::File::open(path)?;
    read_jsonl(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::PatternId;

    fn desk_labeler(dir: &Path) -> Labeler {
        Labeler::new(dir, NullConfig::desk(42))
    }

    #[test]
    fn triangle_label_has_zero_tri_sp() {
        // the triangle is the unique simple realization of its degrees, so
        // every replicate census equals the observed one and z = 0
        let dir = tempfile::tempdir().unwrap();
        let g = Graph::from_edges(&[(0, 1), (1, 2), (2, 0)], None).unwrap();
        let rec = desk_labeler(dir.path())
            .label(&g, GeneratorFamily::Star, "tri0")
            .unwrap();
        assert_eq!(rec.sp[PatternId::Tri.index()], 0.0);
        assert_eq!(rec.z, [0.0; 8]);
        assert!(dir.path().join("edges/tri0.edges").exists());
    }

    #[test]
    fn labeling_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let labeler = desk_labeler(dir.path());
        let g = Graph::from_edges(&[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)], None).unwrap();
        let a = labeler.label(&g, GeneratorFamily::Star, "s5").unwrap();
        let b = labeler.label(&g, GeneratorFamily::Star, "s5").unwrap();
        assert_eq!(a, b);
        let (n3, n4) = a.profile().group_norms_sq();
        for norm in [n3, n4] {
            assert!(norm.abs() < 1e-9 || (norm - 1.0).abs() < 1e-9, "{norm}");
        }
    }

    fn fake_record(id: &str, family: GeneratorFamily) -> DatasetRecord {
        DatasetRecord {
            id: id.to_string(),
            family,
            n: 3,
            m: 2,
            edge_path: format!("edges/{id}.edges"),
            counts: [1, 0, 0, 0, 0, 0, 0, 0],
            z: [1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            sp: {
                let r = 1.0 / 2f64.sqrt();
                [r, -r, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
            },
        }
    }

    #[test]
    fn split_is_stratified_and_deterministic() {
        let mut records = Vec::new();
        for fam in [GeneratorFamily::Star, GeneratorFamily::Dgm] {
            for i in 0..10 {
                records.push(fake_record(&format!("{fam}-{i}"), fam));
            }
        }
        let a = split(&records, (0.7, 0.2, 0.1), 5).unwrap();
        let b = split(&records, (0.7, 0.2, 0.1), 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.train.len(), 14); // 7 per family
        assert_eq!(a.valid.len(), 4);
        assert_eq!(a.test.len(), 2);

        // disjoint and exhaustive
        let mut all: Vec<&String> = a.train.iter().chain(&a.valid).chain(&a.test).collect();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), records.len());
    }

    #[test]
    fn split_matches_reference_corpus_arithmetic() {
        // 3490 records for each of the 11 non-deterministic families at
        // 0.7/0.2/0.1 puts 26873 graphs in train and 7678 in valid
        let mut records = Vec::new();
        for fam in GeneratorFamily::NONDETERMINISTIC {
            for i in 0..3490 {
                records.push(fake_record(&format!("{fam}-{i}"), fam));
            }
        }
        let manifest = split(&records, (0.7, 0.2, 0.1), 0).unwrap();
        assert_eq!(manifest.train.len(), 26873);
        assert_eq!(manifest.valid.len(), 7678);
        assert_eq!(manifest.test.len(), 3490 * 11 - 26873 - 7678);
    }

    #[test]
    fn split_rejects_tiny_families() {
        let records = vec![
            fake_record("a", GeneratorFamily::Star),
            fake_record("b", GeneratorFamily::Star),
        ];
        assert!(matches!(
            split(&records, (0.7, 0.2, 0.1), 0),
            Err(DatasetError::FamilyTooSmall { .. })
        ));
    }

    #[test]
    fn split_rejects_bad_ratios() {
        let records: Vec<DatasetRecord> = (0..5)
            .map(|i| fake_record(&format!("r{i}"), GeneratorFamily::Star))
            .collect();
        assert!(matches!(
            split(&records, (0.7, 0.2, 0.2), 0),
            Err(DatasetError::BadRatios(_))
        ));
    }

    #[test]
    fn jsonl_round_trip() {
        let records: Vec<DatasetRecord> = (0..4)
            .map(|i| fake_record(&format!("r{i}"), GeneratorFamily::Barbell))
            .collect();
        let mut buf = Vec::new();
        write_jsonl(&records, &mut buf).unwrap();
        let back = read_jsonl(buf.as_slice()).unwrap();
        assert_eq!(records, back);
    }

    #[test]
    fn jsonl_rejects_wrong_array_length() {
        let line = r#"{"id":"x","family":"star","n":3,"m":2,"edge_path":"e","counts":[0,0,0,0,0,0,0],"z":[0,0,0,0,0,0,0,0],"sp":[0,0,0,0,0,0,0,0]}"#;
        assert!(matches!(
            read_jsonl(line.as_bytes()),
            Err(DatasetError::Malformed { line: 1, .. })
        ));
    }

    #[test]
    fn jsonl_rejects_broken_group_norm() {
        let mut rec = fake_record("x", GeneratorFamily::Star);
        rec.sp[0] = 0.93; // group-3 squared norm is now 0.93² + 0.5
        let mut buf = Vec::new();
        write_jsonl(&[rec], &mut buf).unwrap();
        assert!(matches!(
            read_jsonl(buf.as_slice()),
            Err(DatasetError::Validation { line: 1, .. })
        ));
    }

    #[test]
    fn jsonl_rejects_missing_field() {
        let line = r#"{"id":"x","family":"star","n":3,"m":2}"#;
        assert!(read_jsonl(line.as_bytes()).is_err());
    }
}
