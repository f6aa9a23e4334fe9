//! CART classification tree with Gini splits over a random feature subset.

use crate::data::Label;
use crate::nn::Matrix;
use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Leaf {
        /// Sample counts `[normal, anomalous]` reaching the leaf.
        counts: [usize; 2],
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        counts: [usize; 2],
        /// `n_node·gini(node) − n_left·gini(left) − n_right·gini(right)`.
        weighted_decrease: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
    /// Root sample count, used to normalize impurity decreases.
    pub samples: usize,
}

pub(crate) struct TreeParams {
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub features_per_split: usize,
}

fn gini(counts: [usize; 2]) -> f64 {
    let n = (counts[0] + counts[1]) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let p = counts[1] as f64 / n;
    2.0 * p * (1.0 - p)
}

fn class_counts(labels: &[Label], samples: &[usize]) -> [usize; 2] {
    let mut c = [0, 0];
    for &i in samples {
        c[labels[i].as_u8() as usize] += 1;
    }
    c
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    decrease: f64,
}

impl DecisionTree {
    pub(crate) fn fit(x: &Matrix, labels: &[Label], samples: Vec<usize>, params: &TreeParams, rng: &mut Rng) -> Self {
        let mut tree = DecisionTree {
            nodes: Vec::new(),
            samples: samples.len(),
        };
        tree.grow(x, labels, samples, 0, params, rng);
        tree
    }

    fn grow(&mut self, x: &Matrix, labels: &[Label], samples: Vec<usize>, depth: usize, params: &TreeParams, rng: &mut Rng) -> usize {
        let id = self.nodes.len();
        let counts = class_counts(labels, &samples);
        self.nodes.push(Node::Leaf { counts });
        let pure = counts[0] == 0 || counts[1] == 0;
        if pure || depth >= params.max_depth || samples.len() < params.min_samples_split {
            return id;
        }
        let Some(best) = best_split(x, labels, &samples, counts, params.features_per_split, rng) else {
            return id;
        };
        let (left, right): (Vec<usize>, Vec<usize>) = samples
            .into_iter()
            .partition(|&i| x.get(i, best.feature) <= best.threshold);
        let left_id = self.grow(x, labels, left, depth + 1, params, rng);
        let right_id = self.grow(x, labels, right, depth + 1, params, rng);
        self.nodes[id] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left: left_id,
            right: right_id,
            counts,
            weighted_decrease: best.decrease,
        };
        id
    }

    pub fn leaf_counts(&self, row: &[f64]) -> [usize; 2] {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                Node::Leaf { counts } => return *counts,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => id = if row[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    /// Majority class of the leaf; ties go to normal.
    pub fn predict_row(&self, row: &[f64]) -> Label {
        let c = self.leaf_counts(row);
        if c[1] > c[0] {
            Label::Anomalous
        } else {
            Label::Normal
        }
    }

    /// Total weighted impurity decrease per feature, divided by the root count.
    pub fn impurity_decrease(&self, features: usize) -> Vec<f64> {
        let mut out = vec![0.0; features];
        for node in &self.nodes {
            if let Node::Split {
                feature,
                weighted_decrease,
                ..
            } = node
            {
                out[*feature] += weighted_decrease / self.samples as f64;
            }
        }
        out
    }
}

/// Best Gini split over a random subset of features. Candidate thresholds are
/// midpoints between consecutive distinct values. Ties keep the lowest feature
/// index, then the lowest threshold.
fn best_split(
    x: &Matrix,
    labels: &[Label],
    samples: &[usize],
    counts: [usize; 2],
    features_per_split: usize,
    rng: &mut Rng,
) -> Option<BestSplit> {
    let mut features: Vec<usize> = (0..x.cols()).collect();
    rng.shuffle(&mut features);
    features.truncate(features_per_split.clamp(1, x.cols()));
    features.sort_unstable();

    let n = samples.len();
    let parent = n as f64 * gini(counts);
    let mut best: Option<BestSplit> = None;
    let mut column: Vec<(f64, usize)> = Vec::with_capacity(n);
    for &f in &features {
        column.clear();
        column.extend(samples.iter().map(|&i| (x.get(i, f), labels[i].as_u8() as usize)));
        column.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut left = [0usize; 2];
        for k in 0..n - 1 {
            left[column[k].1] += 1;
            let (v, next) = (column[k].0, column[k + 1].0);
            if v == next {
                continue;
            }
            let right = [counts[0] - left[0], counts[1] - left[1]];
            let nl = (k + 1) as f64;
            let nr = (n - k - 1) as f64;
            let decrease = parent - nl * gini(left) - nr * gini(right);
            if decrease > 1e-12 && best.as_ref().map_or(true, |b| decrease > b.decrease) {
                best = Some(BestSplit {
                    feature: f,
                    threshold: 0.5 * (v + next),
                    decrease,
                });
            }
        }
    }
    best
}
