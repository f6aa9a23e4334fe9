//! Tabular augmentation by additive uniform noise: each noisy copy adds an
//! independent draw from `U[0, σ_f]` to every feature `f`, where `σ_f` is the
//! population standard deviation of `f` over the training rows.

use serde::{Deserialize, Serialize};

use crate::data::{ProcessedDataset, RowOrigin, Split};
use crate::error::{Error, Result};
use crate::nn::Matrix;
use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AugmentConfig {
    pub copies_per_row: usize,
    pub include_originals: bool,
    pub seed: u64,
}

impl Default for AugmentConfig {
    /// 31 copies of ~5.9k rows gives ~188k rows, the closest integer setting
    /// to the ~187k-row augmented set this pipeline is modelled on.
    fn default() -> Self {
        Self {
            copies_per_row: 31,
            include_originals: true,
            seed: 42,
        }
    }
}

impl AugmentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.copies_per_row == 0 && !self.include_originals {
            return Err(Error::EmptyOutput(
                "zero copies without originals would produce no training rows".into(),
            ));
        }
        Ok(())
    }
}

/// Population standard deviation (divides by N).
pub fn feature_std(values: &[f64]) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::Argument(format!(
            "standard deviation needs at least 2 values, got {}",
            values.len()
        )));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Ok(var.sqrt())
}

/// `σ_f` for every feature over the dataset's training rows.
pub fn training_std(dataset: &ProcessedDataset) -> Result<Vec<f64>> {
    let train = dataset.split_indices(Split::Train);
    let rows = dataset.features.select_rows(&train);
    (0..rows.cols()).map(|c| feature_std(&rows.column(c))).collect()
}

/// Grows the training split with noisy copies. Test rows pass through once,
/// unchanged; no copies of them are made. Each training row's copies come from
/// its own substream, so the result does not depend on processing order.
pub fn augment(dataset: &ProcessedDataset, config: &AugmentConfig) -> Result<ProcessedDataset> {
    config.validate()?;
    dataset.check_consistent()?;
    let sigma = training_std(dataset)?;
    let cols = dataset.features.cols();

    let mut data = Vec::new();
    let mut labels = Vec::new();
    let mut split = Vec::new();
    let mut origins: Vec<RowOrigin> = Vec::new();
    let mut push = |row: &[f64], i: usize, copy: usize| {
        data.extend_from_slice(row);
        labels.push(dataset.labels[i]);
        split.push(dataset.split[i]);
        origins.push(RowOrigin {
            copy,
            ..dataset.origins[i].clone()
        });
    };

    let mut noisy = vec![0.0; cols];
    for i in 0..dataset.len() {
        let row = dataset.features.row(i);
        if dataset.split[i] == Split::Test {
            push(row, i, dataset.origins[i].copy);
            continue;
        }
        if config.include_originals {
            push(row, i, dataset.origins[i].copy);
        }
        let mut rng = Rng::substream(config.seed, i as u64);
        for copy in 1..=config.copies_per_row {
            for ((dst, &v), &s) in noisy.iter_mut().zip(row).zip(&sigma) {
                *dst = v + s * rng.uniform();
            }
            push(&noisy, i, copy);
        }
    }

    Ok(ProcessedDataset {
        feature_names: dataset.feature_names.clone(),
        features: Matrix::from_vec(labels.len(), cols, data)?,
        labels,
        split,
        origins,
        scaler: None,
        label_rules: dataset.label_rules.clone(),
    })
}
