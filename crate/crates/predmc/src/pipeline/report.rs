//! Experiment and benchmark reports, machine-readable plus a table form.

use crate::gbrt::GbrtModel;
use serde::Serialize;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClassCounts {
    pub yes: usize,
    pub no: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TestPrediction {
    /// Index of the record inside the test split, in split order.
    pub record_index: usize,
    pub predicted: bool,
    pub actual: bool,
}

/// Everything one training-and-evaluation run produces. The per-record
/// predictions stay in the report so the accuracy is recomputable from it.
#[derive(Debug, Serialize)]
pub struct ExperimentReport {
    pub formula_len: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub accuracy: f64,
    pub t1_mean: f64,
    pub t2_mean: f64,
    pub ratio_t2_over_t1: f64,
    pub ratio_t1_over_t2: f64,
    pub class_counts: ClassCounts,
    pub predictions: Vec<TestPrediction>,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub model: GbrtModel,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// `(t2/t1, t1/t2)` as consistent reciprocals.
pub(crate) fn ratios(t1: f64, t2: f64) -> (f64, f64) {
    (t2 / t1, t1 / t2)
}

fn timing_table(
    f: &mut fmt::Formatter<'_>,
    formula_len: usize,
    t1: f64,
    t2: f64,
    t2_over_t1: f64,
    t1_over_t2: f64,
) -> fmt::Result {
    writeln!(
        f,
        "{:<8} {:<16} {:<16} {:<12} {:<12}",
        "L", "t1 (s)", "t2 (s)", "t2/t1", "t1/t2"
    )?;
    writeln!(
        f,
        "{:<8} {:<16.9} {:<16.9} {:<12} {:<12.1}",
        formula_len,
        t1,
        t2,
        format!("{:.6}%", t2_over_t1 * 100.0),
        t1_over_t2,
    )
}

impl fmt::Display for ExperimentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "records: {} train / {} test   classes: {} yes / {} no",
            self.n_train, self.n_test, self.class_counts.yes, self.class_counts.no
        )?;
        writeln!(f, "accuracy: {:.4}", self.accuracy)?;
        timing_table(
            f,
            self.formula_len,
            self.t1_mean,
            self.t2_mean,
            self.ratio_t2_over_t1,
            self.ratio_t1_over_t2,
        )?;
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

/// Timing-only comparison over a whole dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchmarkResult {
    pub formula_len: usize,
    pub n_records: usize,
    pub t1_mean: f64,
    pub t2_mean: f64,
    pub ratio_t2_over_t1: f64,
    pub ratio_t1_over_t2: f64,
}

impl BenchmarkResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("benchmark serializes")
    }
}

impl fmt::Display for BenchmarkResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "records: {}", self.n_records)?;
        timing_table(
            f,
            self.formula_len,
            self.t1_mean,
            self.t2_mean,
            self.ratio_t2_over_t1,
            self.ratio_t1_over_t2,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratios_are_reciprocal() {
        let (a, b) = ratios(0.015, 0.000038);
        assert!((a * b - 1.0).abs() < 1e-12);
        assert!((b - 394.7368421052632).abs() < 1e-9);
        let (c, d) = ratios(1.0, 1.0);
        assert_eq!(c, 1.0);
        assert_eq!(d, 1.0);
    }

    #[test]
    fn table_layout_mentions_both_ratios() {
        let bench = BenchmarkResult {
            formula_len: 25,
            n_records: 405,
            t1_mean: 0.015,
            t2_mean: 0.000038,
            ratio_t2_over_t1: 0.000038 / 0.015,
            ratio_t1_over_t2: 0.015 / 0.000038,
        };
        let text = bench.to_string();
        assert!(text.contains("t2/t1"));
        assert!(text.contains("t1/t2"));
        assert!(text.contains("394.7"));
    }
}
