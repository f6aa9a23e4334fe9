//! Random forest used to rank features by mean decrease in Gini impurity.

mod tree;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use tree::{DecisionTree, Node};

use crate::data::Label;
use crate::error::{Error, Result};
use crate::io;
use crate::nn::Matrix;
use crate::rng::Rng;
use tree::TreeParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestConfig {
    pub tree_count: usize,
    pub max_depth: usize,
    pub min_samples_split: usize,
    /// Defaults to `⌈√p⌉` when unset.
    pub features_per_split: Option<usize>,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            tree_count: 100,
            max_depth: 12,
            min_samples_split: 2,
            features_per_split: None,
            bootstrap: true,
            seed: 42,
        }
    }
}

impl ForestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tree_count == 0 {
            return Err(Error::Config("tree_count must be at least 1".into()));
        }
        if self.max_depth == 0 {
            return Err(Error::Config("max_depth must be at least 1".into()));
        }
        if self.features_per_split == Some(0) {
            return Err(Error::Config("features_per_split must be at least 1".into()));
        }
        Ok(())
    }

    pub fn features_per_split_for(&self, features: usize) -> usize {
        self.features_per_split
            .unwrap_or_else(|| (features as f64).sqrt().ceil() as usize)
            .clamp(1, features.max(1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomForest {
    pub trees: Vec<DecisionTree>,
    pub features: usize,
    pub config: ForestConfig,
    /// Out-of-bag accuracy, when bootstrapping left every row out of some tree.
    pub oob_accuracy: Option<f64>,
}

fn majority(votes: [usize; 2]) -> Label {
    if votes[1] > votes[0] {
        Label::Anomalous
    } else {
        Label::Normal
    }
}

impl RandomForest {
    pub fn fit(x: &Matrix, labels: &[Label], config: &ForestConfig) -> Result<Self> {
        config.validate()?;
        if x.rows() != labels.len() {
            return Err(Error::dimension("forest fit", format!("{} labels", x.rows()), labels.len()));
        }
        if x.rows() < 2 {
            return Err(Error::Degenerate(format!("forest needs at least 2 rows, got {}", x.rows())));
        }
        if labels.iter().all(|&l| l == labels[0]) {
            return Err(Error::Degenerate(format!("all rows are {:?}; both classes are required", labels[0])));
        }
        let n = x.rows();
        let params = TreeParams {
            max_depth: config.max_depth,
            min_samples_split: config.min_samples_split.max(2),
            features_per_split: config.features_per_split_for(x.cols()),
        };
        let mut trees = Vec::with_capacity(config.tree_count);
        let mut oob_votes = vec![[0usize; 2]; n];
        for t in 0..config.tree_count {
            let mut rng = Rng::substream(config.seed, t as u64);
            let samples: Vec<usize> = if config.bootstrap {
                (0..n).map(|_| rng.below(n)).collect()
            } else {
                (0..n).collect()
            };
            let tree = DecisionTree::fit(x, labels, samples.clone(), &params, &mut rng);
            if config.bootstrap {
                let mut in_bag = vec![false; n];
                samples.iter().for_each(|&i| in_bag[i] = true);
                for i in (0..n).filter(|&i| !in_bag[i]) {
                    oob_votes[i][tree.predict_row(x.row(i)).as_u8() as usize] += 1;
                }
            }
            trees.push(tree);
        }
        let scored: Vec<usize> = (0..n).filter(|&i| oob_votes[i] != [0, 0]).collect();
        let oob_accuracy = (!scored.is_empty()).then(|| {
            scored.iter().filter(|&&i| majority(oob_votes[i]) == labels[i]).count() as f64 / scored.len() as f64
        });
        Ok(Self {
            trees,
            features: x.cols(),
            config: config.clone(),
            oob_accuracy,
        })
    }

    /// Majority vote over trees; ties go to normal.
    pub fn predict(&self, rows: &Matrix) -> Result<Vec<Label>> {
        if rows.cols() != self.features {
            return Err(Error::dimension("forest predict", format!("{} features", self.features), rows.cols()));
        }
        Ok((0..rows.rows())
            .map(|r| {
                let mut votes = [0usize; 2];
                for tree in &self.trees {
                    votes[tree.predict_row(rows.row(r)).as_u8() as usize] += 1;
                }
                majority(votes)
            })
            .collect())
    }

    /// Mean decrease in impurity: each tree's decreases are normalized to sum
    /// to 1, averaged over trees, then renormalized.
    pub fn feature_importance(&self, feature_names: &[String]) -> ImportanceReport {
        let mut total = vec![0.0; self.features];
        for tree in &self.trees {
            let dec = tree.impurity_decrease(self.features);
            let sum: f64 = dec.iter().sum();
            if sum > 0.0 {
                for (t, d) in total.iter_mut().zip(&dec) {
                    *t += d / sum;
                }
            }
        }
        let sum: f64 = total.iter().sum();
        if sum > 0.0 {
            total.iter_mut().for_each(|v| *v /= sum);
        }
        ImportanceReport::new(feature_names.to_vec(), total, self.config.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceReport {
    pub feature_names: Vec<String>,
    pub importances: Vec<f64>,
    /// Feature indices, most important first; ties by index.
    pub ranking: Vec<usize>,
    pub config: ForestConfig,
}

impl ImportanceReport {
    pub fn new(feature_names: Vec<String>, importances: Vec<f64>, config: ForestConfig) -> Self {
        let mut ranking: Vec<usize> = (0..importances.len()).collect();
        ranking.sort_by(|&a, &b| importances[b].total_cmp(&importances[a]).then(a.cmp(&b)));
        Self {
            feature_names,
            importances,
            ranking,
            config,
        }
    }

    pub fn top(&self) -> Option<usize> {
        self.ranking.first().copied()
    }

    /// `feature,importance,rank` in rank order, with the forest settings in the preamble.
    pub fn write_csv<W: Write>(&self, writer: W, fingerprint: &str) -> Result<()> {
        let settings = serde_json::to_string(&self.config)?;
        let mut w = io::commented_csv_writer(writer, &[("config_fingerprint", fingerprint), ("forest", &settings)])?;
        w.write_record(["feature", "importance", "rank"])?;
        for (rank, &i) in self.ranking.iter().enumerate() {
            let name = self.feature_names.get(i).cloned().unwrap_or_else(|| format!("feature_{i}"));
            w.write_record([name, io::fmt_f64(self.importances[i]), (rank + 1).to_string()])?;
        }
        w.flush().map_err(|e| Error::io("importance", e))
    }
}
