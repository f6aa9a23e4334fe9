//! Confusion matrix and the four classification metrics, with "anomalous" as
//! the positive class. A metric with a zero denominator is reported as
//! undefined with a reason instead of NaN or a silent zero.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::data::Label;
use crate::error::{Error, Result};
use crate::io;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricValue {
    Value(f64),
    Undefined { undefined: String },
}

impl MetricValue {
    fn ratio(num: u64, den: u64, reason: &str) -> Self {
        if den == 0 {
            MetricValue::Undefined {
                undefined: reason.to_string(),
            }
        } else {
            MetricValue::Value(num as f64 / den as f64)
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            MetricValue::Value(v) => Some(*v),
            MetricValue::Undefined { .. } => None,
        }
    }

    pub fn display(&self) -> String {
        match self {
            MetricValue::Value(v) => io::fmt_f64(*v),
            MetricValue::Undefined { undefined } => format!("undefined ({undefined})"),
        }
    }
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }

    /// `(TP + TN) / (TP + FP + TN + FN)`.
    pub fn accuracy(&self) -> MetricValue {
        MetricValue::ratio(self.tp + self.tn, self.total(), "no rows evaluated")
    }

    /// `TP / (TP + FN)`.
    pub fn recall(&self) -> MetricValue {
        MetricValue::ratio(self.tp, self.tp + self.fn_, "no positive rows")
    }

    /// `TP / (TP + FP)`.
    pub fn precision(&self) -> MetricValue {
        MetricValue::ratio(self.tp, self.tp + self.fp, "no positive predictions")
    }

    pub fn f1(&self) -> MetricValue {
        match (self.precision(), self.recall()) {
            (MetricValue::Value(p), MetricValue::Value(r)) => f1_score(p, r),
            (MetricValue::Undefined { undefined }, _) | (_, MetricValue::Undefined { undefined }) => {
                MetricValue::Undefined { undefined }
            }
        }
    }
}

/// Harmonic mean `2·P·R / (P + R)`.
pub fn f1_score(precision: f64, recall: f64) -> MetricValue {
    if precision + recall == 0.0 {
        MetricValue::Undefined {
            undefined: "precision and recall are both zero".into(),
        }
    } else {
        MetricValue::Value(2.0 * precision * recall / (precision + recall))
    }
}

pub fn confusion(truth: &[Label], predicted: &[Label]) -> Result<ConfusionMatrix> {
    if truth.len() != predicted.len() {
        return Err(Error::Argument(format!(
            "{} true labels vs {} predictions",
            truth.len(),
            predicted.len()
        )));
    }
    let mut cm = ConfusionMatrix::default();
    for (t, p) in truth.iter().zip(predicted) {
        match (t, p) {
            (Label::Anomalous, Label::Anomalous) => cm.tp += 1,
            (Label::Normal, Label::Normal) => cm.tn += 1,
            (Label::Normal, Label::Anomalous) => cm.fp += 1,
            (Label::Anomalous, Label::Normal) => cm.fn_ += 1,
        }
    }
    Ok(cm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdMode {
    Fixed,
    Calibrated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub dataset: String,
    pub config_fingerprint: String,
    pub label_rules_fingerprint: String,
    pub threshold: f64,
    pub threshold_mode: ThresholdMode,
    pub rows: u64,
    pub confusion: ConfusionMatrix,
    pub accuracy: MetricValue,
    pub precision: MetricValue,
    pub recall: MetricValue,
    pub f1: MetricValue,
}

impl EvalReport {
    pub fn new(
        dataset: impl Into<String>,
        config_fingerprint: impl Into<String>,
        label_rules_fingerprint: impl Into<String>,
        threshold: f64,
        threshold_mode: ThresholdMode,
        confusion: ConfusionMatrix,
    ) -> Self {
        Self {
            dataset: dataset.into(),
            config_fingerprint: config_fingerprint.into(),
            label_rules_fingerprint: label_rules_fingerprint.into(),
            threshold,
            threshold_mode,
            rows: confusion.total(),
            accuracy: confusion.accuracy(),
            precision: confusion.precision(),
            recall: confusion.recall(),
            f1: confusion.f1(),
            confusion,
        }
    }
}

/// Side-by-side metric table (`Metrics,<a>,<b>`) in the row order
/// Accuracy Score, Precision, Recall, F1 Score. Reports whose label rules
/// differ are not comparable.
pub fn write_comparison<W: Write>(a: &EvalReport, b: &EvalReport, a_name: &str, b_name: &str, writer: W) -> Result<()> {
    if a.label_rules_fingerprint != b.label_rules_fingerprint {
        return Err(Error::Domain(format!(
            "reports use different label rules ({} vs {})",
            a.label_rules_fingerprint, b.label_rules_fingerprint
        )));
    }
    let mut w = io::commented_csv_writer(
        writer,
        &[
            ("config_fingerprint_a", &a.config_fingerprint),
            ("config_fingerprint_b", &b.config_fingerprint),
            ("label_rules_fingerprint", &a.label_rules_fingerprint),
        ],
    )?;
    w.write_record(["Metrics", a_name, b_name])?;
    let rows: [(&str, &MetricValue, &MetricValue); 4] = [
        ("Accuracy Score", &a.accuracy, &b.accuracy),
        ("Precision", &a.precision, &b.precision),
        ("Recall", &a.recall, &b.recall),
        ("F1 Score", &a.f1, &b.f1),
    ];
    for (name, x, y) in rows {
        w.write_record([name.to_string(), x.display(), y.display()])?;
    }
    w.flush().map_err(|e| Error::io("comparison", e))
}

/// Raw `(threshold, confusion)` rows for external curve analysis.
pub fn threshold_sweep(anomaly_scores: &[f64], truth: &[Label], thresholds: &[f64]) -> Result<Vec<(f64, ConfusionMatrix)>> {
    thresholds
        .iter()
        .map(|&t| {
            let predicted: Vec<Label> = anomaly_scores
                .iter()
                .map(|&s| if s > t { Label::Anomalous } else { Label::Normal })
                .collect();
            Ok((t, confusion(truth, &predicted)?))
        })
        .collect()
}
