//! Least-squares regression trees grown greedily on residuals.

use crate::features::FeatureVector;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        left: u32,
        right: u32,
    },
    Leaf {
        value: f64,
    },
}

/// Binary regression tree; node 0 is the root. Samples with a feature value
/// at or below a split threshold go left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    pub nodes: Vec<TreeNode>,
}

impl RegressionTree {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                TreeNode::Leaf { value } => return *value,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if x[*feature] <= *threshold {
                        *left as usize
                    } else {
                        *right as usize
                    };
                }
            }
        }
    }

    /// Grow a tree on `targets` by squared-error reduction. Thresholds are
    /// midpoints of adjacent distinct feature values; ties in gain resolve
    /// to the lowest feature index, then the smallest threshold. Leaf values
    /// come from `leaf_value` over the samples that reach the leaf.
    pub(crate) fn fit(
        data: &[FeatureVector],
        targets: &[f64],
        max_depth: usize,
        min_leaf: usize,
        leaf_value: impl Fn(&[usize]) -> f64,
    ) -> RegressionTree {
        let mut tree = RegressionTree { nodes: Vec::new() };
        let samples: Vec<usize> = (0..data.len()).collect();
        grow(
            &mut tree.nodes,
            data,
            targets,
            samples,
            0,
            max_depth,
            min_leaf,
            &leaf_value,
        );
        tree
    }
}

struct BestSplit {
    gain: f64,
    feature: usize,
    threshold: f64,
}

#[allow(clippy::too_many_arguments)]
fn grow(
    nodes: &mut Vec<TreeNode>,
    data: &[FeatureVector],
    targets: &[f64],
    samples: Vec<usize>,
    depth: usize,
    max_depth: usize,
    min_leaf: usize,
    leaf_value: &impl Fn(&[usize]) -> f64,
) -> u32 {
    let id = nodes.len() as u32;
    nodes.push(TreeNode::Leaf { value: 0.0 });
    let split = if depth < max_depth && samples.len() >= 2 * min_leaf {
        best_split(data, targets, &samples, min_leaf)
    } else {
        None
    };
    match split {
        None => {
            nodes[id as usize] = TreeNode::Leaf {
                value: leaf_value(&samples),
            };
        }
        Some(best) => {
            let (left_samples, right_samples): (Vec<usize>, Vec<usize>) = samples
                .iter()
                .partition(|&&i| data[i].0[best.feature] <= best.threshold);
            let left = grow(
                nodes,
                data,
                targets,
                left_samples,
                depth + 1,
                max_depth,
                min_leaf,
                leaf_value,
            );
            let right = grow(
                nodes,
                data,
                targets,
                right_samples,
                depth + 1,
                max_depth,
                min_leaf,
                leaf_value,
            );
            nodes[id as usize] = TreeNode::Split {
                feature: best.feature,
                threshold: best.threshold,
                left,
                right,
            };
        }
    }
    id
}

/// Scan features in ascending index and thresholds in ascending value,
/// keeping the first strictly best gain, so ties break as documented. Pure
/// nodes (all targets equal) never split; impure nodes take the best valid
/// candidate even at zero gain, which lets deeper levels separate patterns
/// no single cut improves.
fn best_split(
    data: &[FeatureVector],
    targets: &[f64],
    samples: &[usize],
    min_leaf: usize,
) -> Option<BestSplit> {
    let first = targets[samples[0]];
    if samples.iter().all(|&i| targets[i] == first) {
        return None;
    }
    let n = samples.len() as f64;
    let total: f64 = samples.iter().map(|&i| targets[i]).sum();
    let base = total * total / n;
    let n_features = data[samples[0]].len();
    let mut best: Option<BestSplit> = None;
    let mut order: Vec<usize> = samples.to_vec();
    for feature in 0..n_features {
        order.sort_unstable_by(|&a, &b| {
            data[a].0[feature]
                .partial_cmp(&data[b].0[feature])
                .expect("feature values must not be NaN")
                .then(a.cmp(&b))
        });
        let mut left_sum = 0.0;
        for (pos, &i) in order.iter().enumerate().take(order.len() - 1) {
            left_sum += targets[i];
            let here = data[i].0[feature];
            let next = data[order[pos + 1]].0[feature];
            if here == next {
                continue;
            }
            let n_left = pos + 1;
            let n_right = order.len() - n_left;
            if n_left < min_leaf || n_right < min_leaf {
                continue;
            }
            let right_sum = total - left_sum;
            let gain =
                left_sum * left_sum / n_left as f64 + right_sum * right_sum / n_right as f64 - base;
            if best.as_ref().is_none_or(|b| gain > b.gain) {
                best = Some(BestSplit {
                    gain,
                    feature,
                    threshold: (here + next) / 2.0,
                });
            }
        }
    }
    best
}
