//! Stage functions shared by the command-line tool and the test suites.

use std::path::Path;

use crate::config::RunConfig;
use crate::data::{clean, load_csv, stratified_split, DropTally, ProcessedDataset, Rejection, Scaler, Schema, Split};
use crate::error::{Error, Result};
use crate::gan::{self, calibrate_threshold, AnomalyScore, GanConfig, SavedModel, TrainingTrace};
use crate::metrics::{confusion, EvalReport, ThresholdMode};
use crate::nn::Matrix;
use crate::Label;

#[derive(Debug, Clone)]
pub struct Preprocessed {
    pub dataset: ProcessedDataset,
    pub rejections: Vec<Rejection>,
    pub dropped: DropTally,
}

/// Load, clean, derive, label and split a raw consumption log.
pub fn preprocess(raw: &Path, config: &RunConfig) -> Result<Preprocessed> {
    let report = load_csv(raw, &Schema::default())?;
    let (records, dropped) = clean(&report.records);
    let mut dataset = ProcessedDataset::from_records(&records, &config.labels)?;
    dataset.split = stratified_split(&dataset.labels, config.test_fraction, config.seed)?;
    Ok(Preprocessed {
        dataset,
        rejections: report.rejections,
        dropped,
    })
}

/// Fits a scaler on the training split and trains on its normal rows.
pub fn train_model(dataset: &ProcessedDataset, gan: &GanConfig, config_fingerprint: &str) -> Result<(SavedModel, TrainingTrace)> {
    let train_rows = dataset.split_indices(Split::Train);
    let scaler = Scaler::fit(&dataset.features, &train_rows)?;
    let normal: Vec<usize> = train_rows.into_iter().filter(|&i| dataset.labels[i] == Label::Normal).collect();
    if normal.is_empty() {
        return Err(Error::Precondition("training split has no normal rows".into()));
    }
    let data = scaler.transform(&dataset.features.select_rows(&normal))?;
    let config = gan.clone().with_feature_dim(dataset.feature_names.len());
    let (model, trace) = gan::train(&config, &data)?;
    let saved = SavedModel::new(
        model,
        scaler,
        dataset.feature_names.clone(),
        0.5,
        config_fingerprint.to_string(),
        dataset.label_rules.fingerprint(),
    );
    Ok((saved, trace))
}

fn check_compatible(dataset: &ProcessedDataset, saved: &SavedModel) -> Result<()> {
    if dataset.feature_names != saved.feature_names {
        return Err(Error::Schema(format!(
            "dataset features [{}] differ from model features [{}]",
            dataset.feature_names.join(", "),
            saved.feature_names.join(", ")
        )));
    }
    Ok(())
}

/// Scores the listed rows with the saved scaler and discriminator.
pub fn score_rows(dataset: &ProcessedDataset, saved: &SavedModel, rows: &[usize], threshold: f64) -> Result<Vec<AnomalyScore>> {
    check_compatible(dataset, saved)?;
    let scaled = saved.scaler.transform(&dataset.features.select_rows(rows))?;
    gan::score(&saved.model, &scaled, threshold)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdChoice {
    Fixed(f64),
    /// F1-maximizing threshold on the original training rows.
    Calibrated,
}

/// Evaluates on the original (non-augmented) test rows.
pub fn evaluate(
    dataset: &ProcessedDataset,
    saved: &SavedModel,
    choice: ThresholdChoice,
    dataset_name: &str,
    config_fingerprint: &str,
) -> Result<EvalReport> {
    let test = dataset.original_indices(Split::Test);
    if test.is_empty() {
        return Err(Error::Precondition("dataset has no test rows".into()));
    }
    let (threshold, mode) = match choice {
        ThresholdChoice::Fixed(t) => (t, ThresholdMode::Fixed),
        ThresholdChoice::Calibrated => {
            let train = dataset.original_indices(Split::Train);
            if train.is_empty() {
                return Err(Error::Precondition("calibration needs training rows".into()));
            }
            let scores: Vec<f64> = score_rows(dataset, saved, &train, 0.5)?.iter().map(|s| s.anomaly_score).collect();
            (calibrate_threshold(&scores, &dataset.labels_at(&train))?, ThresholdMode::Calibrated)
        }
    };
    let predicted: Vec<Label> = score_rows(dataset, saved, &test, threshold)?.iter().map(|s| s.predicted).collect();
    let cm = confusion(&dataset.labels_at(&test), &predicted)?;
    Ok(EvalReport::new(
        dataset_name,
        config_fingerprint,
        dataset.label_rules.fingerprint(),
        threshold,
        mode,
        cm,
    ))
}

/// Scaled copy of the listed rows, for ad hoc inspection.
pub fn scaled_rows(dataset: &ProcessedDataset, scaler: &Scaler, rows: &[usize]) -> Result<Matrix> {
    scaler.transform(&dataset.features.select_rows(rows))
}
