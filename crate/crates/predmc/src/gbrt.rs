//! Gradient boosted regression trees for binary classification.
//!
//! Stagewise additive modeling under binomial deviance: labels map to
//! {-1, +1}, the intercept is half the log odds, each stage fits a
//! least-squares tree to the logistic pseudo-residuals and replaces leaf
//! values with one Newton step. The final score is
//! `intercept + learning_rate * sum(tree outputs)` and classification
//! thresholds the logistic of twice the score. Training is fully
//! deterministic for fixed inputs and parameters.

mod tree;

pub use tree::{RegressionTree, TreeNode};

use crate::features::FeatureVector;
use serde::{Deserialize, Serialize};
use thiserror::Error;

const MODEL_FORMAT: &str = "predmc-gbrt";
const MODEL_VERSION: u32 = 1;
const INTERCEPT_CLAMP: f64 = 10.0;

#[derive(Debug, Error, PartialEq)]
pub enum GbrtError {
    #[error("training set is empty")]
    EmptyTraining,
    #[error("feature and label counts differ: {x} vs {y}")]
    LengthMismatch { x: usize, y: usize },
    #[error("feature vectors have inconsistent lengths")]
    RaggedFeatures,
    #[error("invalid parameter: {0}")]
    BadParams(&'static str),
    #[error("input layout {got:?} does not match the model layout {expected:?}")]
    LayoutMismatch { expected: String, got: String },
    #[error("model document is not valid: {0}")]
    BadDocument(String),
    #[error("unsupported model document: format {format:?} version {version}")]
    UnsupportedVersion { format: String, version: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbrtParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub min_leaf: usize,
    pub threshold: f64,
    /// Reserved for future stochastic variants; recorded, never drawn from.
    pub seed: u64,
}

impl Default for GbrtParams {
    fn default() -> Self {
        GbrtParams {
            n_trees: 100,
            max_depth: 4,
            learning_rate: 0.1,
            min_leaf: 1,
            threshold: 0.5,
            seed: 0,
        }
    }
}

impl GbrtParams {
    fn validate(&self) -> Result<(), GbrtError> {
        if self.n_trees == 0 {
            return Err(GbrtError::BadParams("n_trees must be at least 1"));
        }
        if self.max_depth == 0 {
            return Err(GbrtError::BadParams("max_depth must be at least 1"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(GbrtError::BadParams("learning_rate must be in (0, 1]"));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(GbrtError::BadParams("threshold must be in (0, 1)"));
        }
        if self.min_leaf == 0 {
            return Err(GbrtError::BadParams("min_leaf must be at least 1"));
        }
        Ok(())
    }
}

/// Fitted additive ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct GbrtModel {
    intercept: f64,
    trees: Vec<RegressionTree>,
    learning_rate: f64,
    threshold: f64,
    feature_layout: String,
    feature_len: usize,
}

impl GbrtModel {
    /// Train on feature rows and binary labels.
    ///
    /// A single-class input degenerates cleanly: the intercept clamps to
    /// +-10 and no trees are fitted.
    pub fn fit(
        data: &[FeatureVector],
        labels: &[bool],
        params: &GbrtParams,
    ) -> Result<GbrtModel, GbrtError> {
        Self::fit_with_layout(data, labels, params, None)
    }

    /// Like [`GbrtModel::fit`] with an explicit layout tag to freeze into
    /// the model; defaults to the feature length.
    pub fn fit_with_layout(
        data: &[FeatureVector],
        labels: &[bool],
        params: &GbrtParams,
        layout: Option<String>,
    ) -> Result<GbrtModel, GbrtError> {
        params.validate()?;
        if data.is_empty() {
            return Err(GbrtError::EmptyTraining);
        }
        if data.len() != labels.len() {
            return Err(GbrtError::LengthMismatch {
                x: data.len(),
                y: labels.len(),
            });
        }
        let width = data[0].len();
        if data.iter().any(|x| x.len() != width) {
            return Err(GbrtError::RaggedFeatures);
        }
        let y: Vec<f64> = labels.iter().map(|&b| if b { 1.0 } else { -1.0 }).collect();
        let n = y.len() as f64;
        let mean = y.iter().sum::<f64>() / n;
        let single_class = labels.iter().all(|&b| b) || labels.iter().all(|&b| !b);
        let intercept = if single_class {
            if labels[0] {
                INTERCEPT_CLAMP
            } else {
                -INTERCEPT_CLAMP
            }
        } else {
            (0.5 * ((1.0 + mean) / (1.0 - mean)).ln()).clamp(-INTERCEPT_CLAMP, INTERCEPT_CLAMP)
        };
        let mut model = GbrtModel {
            intercept,
            trees: Vec::new(),
            learning_rate: params.learning_rate,
            threshold: params.threshold,
            feature_layout: layout.unwrap_or_else(|| format!("f{width}")),
            feature_len: width,
        };
        if single_class {
            return Ok(model);
        }
        let mut score: Vec<f64> = vec![intercept; y.len()];
        let mut residuals = vec![0.0; y.len()];
        for _ in 0..params.n_trees {
            for i in 0..y.len() {
                residuals[i] = 2.0 * y[i] / (1.0 + (2.0 * y[i] * score[i]).exp());
            }
            let tree = RegressionTree::fit(
                data,
                &residuals,
                params.max_depth,
                params.min_leaf,
                |samples| newton_step(samples, &residuals),
            );
            for (i, x) in data.iter().enumerate() {
                score[i] += params.learning_rate * tree.predict(x.as_slice());
            }
            model.trees.push(tree);
        }
        Ok(model)
    }

    /// Raw additive score: intercept plus the rate-weighted tree outputs.
    pub fn predict_score(&self, x: &FeatureVector) -> Result<f64, GbrtError> {
        if x.len() != self.feature_len {
            return Err(GbrtError::LayoutMismatch {
                expected: format!("{} values ({})", self.feature_len, self.feature_layout),
                got: format!("{} values", x.len()),
            });
        }
        let trees: f64 = self.trees.iter().map(|t| t.predict(x.as_slice())).sum();
        Ok(self.intercept + self.learning_rate * trees)
    }

    /// 1 exactly when the logistic of twice the score exceeds the threshold.
    pub fn classify(&self, x: &FeatureVector) -> Result<bool, GbrtError> {
        let score = self.predict_score(x)?;
        Ok(logistic(2.0 * score) > self.threshold)
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    pub fn feature_layout(&self) -> &str {
        &self.feature_layout
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Training deviance after the intercept and after each stage, for
    /// monotonicity checks on well-behaved data.
    pub fn staged_deviance(&self, data: &[FeatureVector], labels: &[bool]) -> Vec<f64> {
        let y: Vec<f64> = labels.iter().map(|&b| if b { 1.0 } else { -1.0 }).collect();
        let mut score: Vec<f64> = vec![self.intercept; y.len()];
        let deviance = |score: &[f64]| -> f64 {
            score
                .iter()
                .zip(&y)
                .map(|(&f, &yy)| (1.0 + (-2.0 * yy * f).exp()).ln())
                .sum()
        };
        let mut out = vec![deviance(&score)];
        for tree in &self.trees {
            for (i, x) in data.iter().enumerate() {
                score[i] += self.learning_rate * tree.predict(x.as_slice());
            }
            out.push(deviance(&score));
        }
        out
    }

    /// Versioned human-readable model document.
    pub fn serialize(&self) -> String {
        let doc = ModelDoc {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            intercept: self.intercept,
            learning_rate: self.learning_rate,
            threshold: self.threshold,
            feature_layout: self.feature_layout.clone(),
            feature_len: self.feature_len,
            trees: self.trees.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("model serializes")
    }

    pub fn deserialize(text: &str) -> Result<GbrtModel, GbrtError> {
        let doc: ModelDoc =
            serde_json::from_str(text).map_err(|e| GbrtError::BadDocument(e.to_string()))?;
        if doc.format != MODEL_FORMAT || doc.version != MODEL_VERSION {
            return Err(GbrtError::UnsupportedVersion {
                format: doc.format,
                version: doc.version,
            });
        }
        Ok(GbrtModel {
            intercept: doc.intercept,
            trees: doc.trees,
            learning_rate: doc.learning_rate,
            threshold: doc.threshold,
            feature_layout: doc.feature_layout,
            feature_len: doc.feature_len,
        })
    }
}

/// Newton leaf update for binomial deviance over the samples in a leaf.
fn newton_step(samples: &[usize], residuals: &[f64]) -> f64 {
    let num: f64 = samples.iter().map(|&i| residuals[i]).sum();
    let den: f64 = samples
        .iter()
        .map(|&i| residuals[i].abs() * (2.0 - residuals[i].abs()))
        .sum();
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    format: String,
    version: u32,
    intercept: f64,
    learning_rate: f64,
    threshold: f64,
    feature_layout: String,
    feature_len: usize,
    trees: Vec<RegressionTree>,
}
