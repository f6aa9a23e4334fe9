use serde::{Deserialize, Serialize};

use super::model::GanModel;
use crate::data::Label;
use crate::error::{Error, Result};
use crate::metrics::{confusion, MetricValue};
use crate::nn::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnomalyScore {
    /// `D(x)`.
    pub probability_real: f64,
    /// `1 − D(x)`.
    pub anomaly_score: f64,
    pub predicted: Label,
    pub threshold: f64,
}

impl AnomalyScore {
    pub fn new(probability_real: f64, threshold: f64) -> Self {
        let anomaly_score = 1.0 - probability_real;
        let predicted = if anomaly_score > threshold {
            Label::Anomalous
        } else {
            Label::Normal
        };
        Self {
            probability_real,
            anomaly_score,
            predicted,
            threshold,
        }
    }
}

fn check_threshold(threshold: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::Argument(format!("threshold {threshold} outside [0, 1]")));
    }
    Ok(())
}

/// Scores each row with the discriminator in inference mode. Rows are
/// independent, so order has no effect on any row's score.
pub fn score(model: &GanModel, rows: &Matrix, threshold: f64) -> Result<Vec<AnomalyScore>> {
    check_threshold(threshold)?;
    model.check_features(rows, "score")?;
    Ok(model
        .discriminate(rows)?
        .into_iter()
        .map(|p| AnomalyScore::new(p, threshold))
        .collect())
}

/// Threshold on the anomaly score that maximizes F1 against `labels`.
///
/// Candidates are 0, 1 and midpoints between consecutive distinct scores;
/// ties go to the smallest threshold.
pub fn calibrate_threshold(anomaly_scores: &[f64], labels: &[Label]) -> Result<f64> {
    if anomaly_scores.len() != labels.len() {
        return Err(Error::Argument(format!(
            "{} scores for {} labels",
            anomaly_scores.len(),
            labels.len()
        )));
    }
    if anomaly_scores.is_empty() {
        return Err(Error::Argument("threshold calibration needs at least one row".into()));
    }
    let mut sorted: Vec<f64> = anomaly_scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let mut candidates = vec![0.0];
    candidates.extend(sorted.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    candidates.push(1.0);

    let mut best = (f64::NEG_INFINITY, 0.0);
    for t in candidates {
        let predicted: Vec<Label> = anomaly_scores
            .iter()
            .map(|&s| if s > t { Label::Anomalous } else { Label::Normal })
            .collect();
        let cm = confusion(labels, &predicted)?;
        let f1 = match cm.f1() {
            MetricValue::Value(v) => v,
            MetricValue::Undefined { .. } => 0.0,
        };
        if f1 > best.0 {
            best = (f1, t);
        }
    }
    Ok(best.1)
}
