//! Dataset construction, seeded splitting, training, evaluation, timing and
//! SMV export: the workflow that turns the exact checker into labeled data
//! and measures the predictor against it.

mod csvio;
mod report;
mod smv;

pub use csvio::{dataset_to_csv, load_dataset, records_from_csv, save_dataset};
pub use report::{BenchmarkResult, ClassCounts, ExperimentReport, TestPrediction};
pub use smv::{export_smv, parse_smv_transitions};

use crate::checker::{check, CheckError};
use crate::features::{featurize, FeatureConfig, FeatureError, FeatureVector};
use crate::gbrt::{GbrtError, GbrtModel, GbrtParams};
use crate::kripke::{decode_kripke, encode_kripke, random_kripke, KripkeError, KripkeStructure};
use crate::ltl::{parse_ltl, random_formula, LtlFormula, LtlParseError};
use crate::rng::{indexed_unit, SplitMix64};
use serde::{Deserialize, Serialize};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Kripke(#[from] KripkeError),
    #[error(transparent)]
    Parse(#[from] LtlParseError),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Gbrt(#[from] GbrtError),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("csv line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("train split is empty; lower the fraction or enlarge the dataset")]
    EmptyTrainSet,
    #[error("test split is empty; use a fraction below 1")]
    EmptyTestSet,
    #[error("pair limit {limit} exceeds the {available} available pairs")]
    PairLimit { limit: usize, available: usize },
    #[error("split fraction {0} must be in (0, 1]")]
    BadFraction(f64),
    #[error("cannot infer dataset geometry: {0}")]
    MetaInference(String),
    #[error("SMV export supports at most 10 states and 3 propositions, got {n_states} states and {n_props}")]
    SmvUnsupported { n_states: u16, n_props: u8 },
    #[error("malformed SMV text: {0}")]
    SmvParse(String),
}

/// Geometry shared by every structure of a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KripkeGeometry {
    pub n_states: u16,
    pub n_props: u8,
    pub n_transitions: usize,
}

/// Generator seeds for a dataset build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSeeds {
    pub kripke_seed: u64,
    pub formula_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub n_states: u16,
    pub n_props: u8,
    pub n_transitions: usize,
    pub formula_len: usize,
    pub kripke_seed: u64,
    pub formula_seed: u64,
}

impl DatasetMeta {
    pub fn feature_config(&self) -> FeatureConfig {
        FeatureConfig {
            n_states: self.n_states,
            n_props: self.n_props,
            n_transitions: self.n_transitions,
            max_formula_tokens: self.formula_len,
        }
    }
}

/// One labeled pair: structure text, formula text, verdict bit, and the wall
/// time the exact check took.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub k_text: String,
    pub f_text: String,
    pub r: bool,
    pub check_time: f64,
}

/// Records ordered by (structure index, formula index) of the generating
/// pair grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub meta: DatasetMeta,
    pub records: Vec<Record>,
}

/// Generate structures and formulas, run the exact checker over the first
/// `pair_limit` pairs in lexicographic (structure, formula) order, and
/// record verdicts with per-check wall times. Record content is fully
/// determined by the seeds; only the times vary between runs.
pub fn build_dataset(
    n_kripke: usize,
    n_formulas: usize,
    formula_len: usize,
    geometry: KripkeGeometry,
    pair_limit: usize,
    seeds: GenSeeds,
) -> Result<Dataset, PipelineError> {
    let available = n_kripke * n_formulas;
    if pair_limit > available {
        return Err(PipelineError::PairLimit {
            limit: pair_limit,
            available,
        });
    }
    let mut kripke_rng = SplitMix64::new(seeds.kripke_seed);
    let mut structures = Vec::with_capacity(n_kripke);
    for _ in 0..n_kripke {
        structures.push(random_kripke(
            geometry.n_states,
            geometry.n_props,
            geometry.n_transitions,
            &mut kripke_rng,
        )?);
    }
    let mut formula_rng = SplitMix64::new(seeds.formula_seed);
    let mut formulas = Vec::with_capacity(n_formulas);
    for _ in 0..n_formulas {
        formulas.push(random_formula(
            formula_len,
            geometry.n_props.min(3),
            &mut formula_rng,
        ));
    }
    let mut records = Vec::with_capacity(pair_limit);
    'outer: for k in &structures {
        for f in &formulas {
            if records.len() == pair_limit {
                break 'outer;
            }
            let started = Instant::now();
            let verdict = check(k, f)?;
            let check_time = started.elapsed().as_secs_f64();
            records.push(Record {
                k_text: encode_kripke(k)?,
                f_text: f.to_string(),
                r: verdict.holds,
                check_time,
            });
        }
    }
    Ok(Dataset {
        meta: DatasetMeta {
            n_states: geometry.n_states,
            n_props: geometry.n_props,
            n_transitions: geometry.n_transitions,
            formula_len,
            kripke_seed: seeds.kripke_seed,
            formula_seed: seeds.formula_seed,
        },
        records,
    })
}

/// Seeded per-record train membership.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitParams {
    pub seed: u64,
    pub fraction: f64,
}

impl SplitParams {
    /// Record `index` lands in the training set iff its seeded uniform draw
    /// is below the fraction.
    pub fn in_train(&self, index: usize) -> bool {
        indexed_unit(self.seed, index as u64) < self.fraction
    }
}

/// Partition a dataset into train and test, preserving record order.
pub fn split_dataset(d: &Dataset, p: &SplitParams) -> Result<(Dataset, Dataset), PipelineError> {
    if !(p.fraction > 0.0 && p.fraction <= 1.0) {
        return Err(PipelineError::BadFraction(p.fraction));
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (i, record) in d.records.iter().enumerate() {
        if p.in_train(i) {
            train.push(record.clone());
        } else {
            test.push(record.clone());
        }
    }
    Ok((
        Dataset {
            meta: d.meta,
            records: train,
        },
        Dataset {
            meta: d.meta,
            records: test,
        },
    ))
}

fn decode_record(
    record: &Record,
    meta: &DatasetMeta,
) -> Result<(KripkeStructure, LtlFormula), PipelineError> {
    let k = decode_kripke(&record.k_text, meta.n_states, meta.n_props)?;
    let f = parse_ltl(&record.f_text)?;
    Ok((k, f))
}

fn featurize_records(
    records: &[Record],
    meta: &DatasetMeta,
) -> Result<Vec<FeatureVector>, PipelineError> {
    let cfg = meta.feature_config();
    records
        .iter()
        .map(|record| {
            let (k, f) = decode_record(record, meta)?;
            Ok(featurize(&k, &f, &cfg)?)
        })
        .collect()
}

/// Mean seconds per classification, measured over at least 1000 batched
/// calls so sub-microsecond predictors still time meaningfully.
fn time_classify(model: &GbrtModel, data: &[FeatureVector]) -> Result<f64, PipelineError> {
    assert!(!data.is_empty());
    let reps = 1000usize.div_ceil(data.len());
    let started = Instant::now();
    let mut live = 0usize;
    for _ in 0..reps {
        for x in data {
            live += std::hint::black_box(model.classify(x)?) as usize;
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    std::hint::black_box(live);
    Ok(elapsed / (reps * data.len()) as f64)
}

/// Split, train, classify the held-out records, and assemble the report
/// with accuracy, timing means and speedup ratios.
pub fn run_experiment(
    d: &Dataset,
    p: &SplitParams,
    g: &GbrtParams,
) -> Result<ExperimentReport, PipelineError> {
    if d.records.is_empty() {
        return Err(PipelineError::EmptyDataset);
    }
    let (train, test) = split_dataset(d, p)?;
    if train.records.is_empty() {
        return Err(PipelineError::EmptyTrainSet);
    }
    if test.records.is_empty() {
        return Err(PipelineError::EmptyTestSet);
    }
    let mut warnings = Vec::new();
    let train_x = featurize_records(&train.records, &d.meta)?;
    let train_y: Vec<bool> = train.records.iter().map(|r| r.r).collect();
    if train_y.iter().all(|&b| b) || train_y.iter().all(|&b| !b) {
        warnings.push(
            "training split contains a single class; the model degenerates to its intercept"
                .to_string(),
        );
    }
    let layout = d.meta.feature_config().layout_tag();
    let model = GbrtModel::fit_with_layout(&train_x, &train_y, g, Some(layout))?;

    let test_x = featurize_records(&test.records, &d.meta)?;
    let mut predictions = Vec::with_capacity(test.records.len());
    let mut correct = 0usize;
    for (i, (x, record)) in test_x.iter().zip(&test.records).enumerate() {
        let predicted = model.classify(x)?;
        if predicted == record.r {
            correct += 1;
        }
        predictions.push(TestPrediction {
            record_index: i,
            predicted,
            actual: record.r,
        });
    }
    let accuracy = correct as f64 / test.records.len() as f64;
    let t1_mean = d.records.iter().map(|r| r.check_time).sum::<f64>() / d.records.len() as f64;
    let t2_mean = time_classify(&model, &test_x)?;
    let yes = d.records.iter().filter(|r| r.r).count();
    let (ratio_t2_over_t1, ratio_t1_over_t2) = report::ratios(t1_mean, t2_mean);
    Ok(ExperimentReport {
        formula_len: d.meta.formula_len,
        n_train: train.records.len(),
        n_test: test.records.len(),
        accuracy,
        t1_mean,
        t2_mean,
        ratio_t2_over_t1,
        ratio_t1_over_t2,
        class_counts: ClassCounts {
            yes,
            no: d.records.len() - yes,
        },
        predictions,
        warnings,
        model,
    })
}

/// Time the predictor over a whole dataset and compare with its stored
/// exact-check times.
pub fn benchmark(d: &Dataset, model: &GbrtModel) -> Result<BenchmarkResult, PipelineError> {
    if d.records.is_empty() {
        return Err(PipelineError::EmptyDataset);
    }
    let data = featurize_records(&d.records, &d.meta)?;
    let t1_mean = d.records.iter().map(|r| r.check_time).sum::<f64>() / d.records.len() as f64;
    let t2_mean = time_classify(model, &data)?;
    let (ratio_t2_over_t1, ratio_t1_over_t2) = report::ratios(t1_mean, t2_mean);
    Ok(BenchmarkResult {
        formula_len: d.meta.formula_len,
        n_records: d.records.len(),
        t1_mean,
        t2_mean,
        ratio_t2_over_t1,
        ratio_t1_over_t2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_geometry() -> KripkeGeometry {
        KripkeGeometry {
            n_states: 3,
            n_props: 3,
            n_transitions: 4,
        }
    }

    #[test]
    fn dataset_content_is_seed_deterministic() {
        let seeds = GenSeeds {
            kripke_seed: 10,
            formula_seed: 20,
        };
        let a = build_dataset(4, 4, 5, tiny_geometry(), 10, seeds).unwrap();
        let b = build_dataset(4, 4, 5, tiny_geometry(), 10, seeds).unwrap();
        assert_eq!(a.records.len(), 10);
        for (x, y) in a.records.iter().zip(&b.records) {
            assert_eq!(x.k_text, y.k_text);
            assert_eq!(x.f_text, y.f_text);
            assert_eq!(x.r, y.r);
        }
    }

    #[test]
    fn minimal_dataset_has_one_record() {
        let d = build_dataset(
            1,
            1,
            1,
            KripkeGeometry {
                n_states: 1,
                n_props: 3,
                n_transitions: 1,
            },
            1,
            GenSeeds {
                kripke_seed: 9,
                formula_seed: 9,
            },
        )
        .unwrap();
        assert_eq!(d.records.len(), 1);
    }

    #[test]
    fn pair_limit_checked() {
        let r = build_dataset(
            2,
            2,
            3,
            tiny_geometry(),
            5,
            GenSeeds {
                kripke_seed: 1,
                formula_seed: 2,
            },
        );
        assert!(matches!(r, Err(PipelineError::PairLimit { .. })));
    }

    #[test]
    fn split_fraction_one_keeps_everything_in_train() {
        let d = build_dataset(
            2,
            2,
            3,
            tiny_geometry(),
            4,
            GenSeeds {
                kripke_seed: 3,
                formula_seed: 4,
            },
        )
        .unwrap();
        let (train, test) = split_dataset(
            &d,
            &SplitParams {
                seed: 1988,
                fraction: 1.0,
            },
        )
        .unwrap();
        assert_eq!(train.records.len(), 4);
        assert!(test.records.is_empty());
    }

    #[test]
    fn split_membership_is_reproducible_and_partitions() {
        let d = build_dataset(
            3,
            3,
            4,
            tiny_geometry(),
            9,
            GenSeeds {
                kripke_seed: 5,
                formula_seed: 6,
            },
        )
        .unwrap();
        let p = SplitParams {
            seed: 1988,
            fraction: 0.5,
        };
        let (train_a, test_a) = split_dataset(&d, &p).unwrap();
        let (train_b, test_b) = split_dataset(&d, &p).unwrap();
        assert_eq!(train_a, train_b);
        assert_eq!(test_a, test_b);
        assert_eq!(train_a.records.len() + test_a.records.len(), 9);
        let other = split_dataset(
            &d,
            &SplitParams {
                seed: 926,
                fraction: 0.5,
            },
        )
        .unwrap();
        // different seeds generally disagree on membership
        assert!(other.0.records.len() != train_a.records.len() || other.0 != train_a);
    }

    #[test]
    fn learnable_verdict_reaches_full_accuracy() {
        // replace verdicts with a function of the first label bit; the
        // learner must recover it exactly
        let mut d = build_dataset(
            12,
            4,
            3,
            tiny_geometry(),
            48,
            GenSeeds {
                kripke_seed: 7,
                formula_seed: 8,
            },
        )
        .unwrap();
        for record in &mut d.records {
            record.r = record.k_text.as_bytes()[0] == b'1';
        }
        let report = run_experiment(
            &d,
            &SplitParams {
                seed: 1988,
                fraction: 0.75,
            },
            &GbrtParams::default(),
        )
        .unwrap();
        assert_eq!(report.accuracy, 1.0);
        assert_eq!(report.n_train + report.n_test, 48);
        let recomputed = report
            .predictions
            .iter()
            .filter(|p| p.predicted == p.actual)
            .count() as f64
            / report.n_test as f64;
        assert_eq!(report.accuracy, recomputed);
    }

    #[test]
    fn memorization_case_is_perfect() {
        let mut d = build_dataset(
            6,
            4,
            3,
            tiny_geometry(),
            24,
            GenSeeds {
                kripke_seed: 70,
                formula_seed: 80,
            },
        )
        .unwrap();
        for record in &mut d.records {
            record.r = record.k_text.as_bytes()[0] == b'1';
        }
        // duplicate every record so the test half repeats the train half
        let copy = d.records.clone();
        d.records.extend(copy);
        let report = run_experiment(
            &d,
            &SplitParams {
                seed: 4,
                fraction: 0.5,
            },
            &GbrtParams::default(),
        )
        .unwrap();
        assert_eq!(report.accuracy, 1.0);
    }

    #[test]
    fn single_class_training_is_warned_about() {
        let mut d = build_dataset(
            4,
            4,
            3,
            tiny_geometry(),
            16,
            GenSeeds {
                kripke_seed: 90,
                formula_seed: 91,
            },
        )
        .unwrap();
        for record in &mut d.records {
            record.r = true;
        }
        let report = run_experiment(
            &d,
            &SplitParams {
                seed: 3,
                fraction: 0.6,
            },
            &GbrtParams::default(),
        )
        .unwrap();
        assert!(!report.warnings.is_empty());
        assert_eq!(report.accuracy, 1.0);
    }

    #[test]
    fn empty_test_split_is_an_error() {
        let d = build_dataset(
            2,
            2,
            3,
            tiny_geometry(),
            4,
            GenSeeds {
                kripke_seed: 30,
                formula_seed: 40,
            },
        )
        .unwrap();
        let r = run_experiment(
            &d,
            &SplitParams {
                seed: 1,
                fraction: 1.0,
            },
            &GbrtParams::default(),
        );
        assert!(matches!(r, Err(PipelineError::EmptyTestSet)));
    }

    #[test]
    fn benchmark_reports_reciprocal_ratios() {
        let d = build_dataset(
            3,
            3,
            4,
            tiny_geometry(),
            9,
            GenSeeds {
                kripke_seed: 50,
                formula_seed: 60,
            },
        )
        .unwrap();
        let report = run_experiment(
            &d,
            &SplitParams {
                seed: 2,
                fraction: 0.6,
            },
            &GbrtParams {
                n_trees: 5,
                ..GbrtParams::default()
            },
        )
        .unwrap();
        let bench = benchmark(&d, &report.model).unwrap();
        assert!(bench.t1_mean > 0.0 && bench.t2_mean > 0.0);
        let product = bench.ratio_t1_over_t2 * bench.ratio_t2_over_t1;
        assert!((product - 1.0).abs() < 1e-9);
    }
}
