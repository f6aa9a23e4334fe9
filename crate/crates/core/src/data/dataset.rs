use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::features::derive_features;
use super::label::{label, LabelRuleSet};
use super::load::DATE_FORMAT;
use super::record::{feature_vector, FuelRecord, Label, FEATURE_NAMES};
use super::scale::Scaler;
use crate::error::{Error, Result};
use crate::io;
use crate::nn::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            other => Err(Error::Argument(format!("unknown split '{other}'"))),
        }
    }
}

/// Where a dataset row came from. `copy` is 0 for original rows and
/// `1..=copies` for augmented copies of `source_row`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowOrigin {
    pub source_row: usize,
    pub copy: usize,
    pub site_id: String,
    pub visit_date: NaiveDate,
}

/// Labeled feature matrix in raw units, with split assignment and (once
/// fitted) the training-split scaler.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessedDataset {
    pub feature_names: Vec<String>,
    pub features: Matrix,
    pub labels: Vec<Label>,
    pub split: Vec<Split>,
    pub origins: Vec<RowOrigin>,
    pub scaler: Option<Scaler>,
    pub label_rules: LabelRuleSet,
}

impl ProcessedDataset {
    /// Derives features and labels for cleaned records. Every row starts in
    /// the training split.
    pub fn from_records(records: &[FuelRecord], rules: &LabelRuleSet) -> Result<Self> {
        rules.validate()?;
        let mut rows = Vec::with_capacity(records.len());
        let mut labels = Vec::with_capacity(records.len());
        let mut origins = Vec::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            let derived = derive_features(r)?;
            rows.push(feature_vector(r, &derived));
            labels.push(label(r, &derived, rules));
            origins.push(RowOrigin {
                source_row: i,
                copy: 0,
                site_id: r.site_id.clone(),
                visit_date: r.visit_date,
            });
        }
        let features = if rows.is_empty() {
            Matrix::zeros(0, FEATURE_NAMES.len())
        } else {
            Matrix::from_rows(&rows)?
        };
        Ok(Self {
            feature_names: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
            features,
            split: vec![Split::Train; labels.len()],
            labels,
            origins,
            scaler: None,
            label_rules: rules.clone(),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|n| n == name)
    }

    pub fn indices_where(&self, mut keep: impl FnMut(usize) -> bool) -> Vec<usize> {
        (0..self.len()).filter(|&i| keep(i)).collect()
    }

    pub fn split_indices(&self, split: Split) -> Vec<usize> {
        self.indices_where(|i| self.split[i] == split)
    }

    /// Original (non-augmented) rows of a split.
    pub fn original_indices(&self, split: Split) -> Vec<usize> {
        self.indices_where(|i| self.split[i] == split && self.origins[i].copy == 0)
    }

    pub fn count(&self, label: Label) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    pub fn anomaly_share(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.count(Label::Anomalous) as f64 / self.len() as f64
    }

    pub fn labels_at(&self, indices: &[usize]) -> Vec<Label> {
        indices.iter().map(|&i| self.labels[i]).collect()
    }

    /// Keeps only the listed rows, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            feature_names: self.feature_names.clone(),
            features: self.features.select_rows(indices),
            labels: self.labels_at(indices),
            split: indices.iter().map(|&i| self.split[i]).collect(),
            origins: indices.iter().map(|&i| self.origins[i].clone()).collect(),
            scaler: self.scaler.clone(),
            label_rules: self.label_rules.clone(),
        }
    }

    pub fn check_consistent(&self) -> Result<()> {
        let n = self.len();
        if self.features.rows() != n || self.split.len() != n || self.origins.len() != n {
            return Err(Error::Argument(format!(
                "dataset columns disagree: {} feature rows, {} labels, {} split entries, {} origins",
                self.features.rows(),
                n,
                self.split.len(),
                self.origins.len()
            )));
        }
        if self.features.cols() != self.feature_names.len() {
            return Err(Error::dimension(
                "dataset",
                format!("{} feature columns", self.feature_names.len()),
                self.features.cols(),
            ));
        }
        Ok(())
    }

    /// Writes the dataset as CSV: a `#` preamble with the run fingerprint and
    /// label rules, then `source_row,copy,site_id,visit_date,split,label,<features>`.
    pub fn write_csv(&self, path: &Path, fingerprint: &str) -> Result<()> {
        self.check_consistent()?;
        let rules_json = serde_json::to_string(&self.label_rules)?;
        let rules_fp = self.label_rules.fingerprint();
        let rules_text = self.label_rules.describe();
        let mut w = io::commented_csv_writer(
            io::create(path)?,
            &[
                ("config_fingerprint", fingerprint),
                ("label_rules_fingerprint", &rules_fp),
                ("label_rules_text", &rules_text),
                ("label_rules", &rules_json),
            ],
        )?;
        let mut header = vec!["source_row", "copy", "site_id", "visit_date", "split", "label"];
        header.extend(self.feature_names.iter().map(String::as_str));
        w.write_record(&header)?;
        for i in 0..self.len() {
            let o = &self.origins[i];
            let mut row = vec![
                o.source_row.to_string(),
                o.copy.to_string(),
                o.site_id.clone(),
                o.visit_date.format(DATE_FORMAT).to_string(),
                self.split[i].as_str().to_string(),
                self.labels[i].as_u8().to_string(),
            ];
            row.extend(self.features.row(i).iter().map(|&v| io::fmt_f64(v)));
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let preamble = io::read_preamble(path)?;
        let label_rules = match io::preamble_value(&preamble, "label_rules") {
            Some(json) => serde_json::from_str(&json)?,
            None => return Err(Error::Schema(format!("{}: missing label_rules preamble", path.display()))),
        };
        let mut rdr = io::csv_reader(io::open(path)?);
        let header = rdr.headers()?.clone();
        const FIXED: [&str; 6] = ["source_row", "copy", "site_id", "visit_date", "split", "label"];
        if header.len() < FIXED.len() || header.iter().take(FIXED.len()).ne(FIXED.iter().copied()) {
            return Err(Error::Schema(format!(
                "{}: dataset header must start with {}",
                path.display(),
                FIXED.join(",")
            )));
        }
        let feature_names: Vec<String> = header.iter().skip(FIXED.len()).map(str::to_string).collect();
        let mut data = Vec::new();
        let mut labels = Vec::new();
        let mut split = Vec::new();
        let mut origins = Vec::new();
        for (n, row) in rdr.records().enumerate() {
            let row = row?;
            let bad = |what: &str| Error::Schema(format!("{}: data row {}: bad {what}", path.display(), n + 1));
            let parse_usize = |i: usize, what: &str| row[i].parse::<usize>().map_err(|_| bad(what));
            origins.push(RowOrigin {
                source_row: parse_usize(0, "source_row")?,
                copy: parse_usize(1, "copy")?,
                site_id: row[2].to_string(),
                visit_date: NaiveDate::parse_from_str(&row[3], DATE_FORMAT).map_err(|_| bad("visit_date"))?,
            });
            split.push(Split::parse(&row[4])?);
            labels.push(Label::from_u8(row[5].parse().map_err(|_| bad("label"))?)?);
            for v in row.iter().skip(FIXED.len()) {
                data.push(v.parse::<f64>().map_err(|_| bad("feature value"))?);
            }
        }
        let features = Matrix::from_vec(labels.len(), feature_names.len(), data)?;
        let ds = Self {
            feature_names,
            features,
            labels,
            split,
            origins,
            scaler: None,
            label_rules,
        };
        ds.check_consistent()?;
        Ok(ds)
    }
}
