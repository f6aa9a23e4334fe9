use std::path::Path;

use serde::{Deserialize, Serialize};

use super::GanModel;
use crate::data::Scaler;
use crate::error::{Error, Result};
use crate::io;

pub const MODEL_FORMAT: &str = "fuelgan-model";
pub const MODEL_VERSION: u32 = 1;

/// A trained model plus everything needed to score new rows consistently.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavedModel {
    pub format: String,
    pub version: u32,
    pub config_fingerprint: String,
    pub label_rules_fingerprint: String,
    pub feature_names: Vec<String>,
    pub scaler: Scaler,
    pub threshold: f64,
    pub model: GanModel,
}

impl SavedModel {
    pub fn new(
        model: GanModel,
        scaler: Scaler,
        feature_names: Vec<String>,
        threshold: f64,
        config_fingerprint: String,
        label_rules_fingerprint: String,
    ) -> Self {
        Self {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            config_fingerprint,
            label_rules_fingerprint,
            feature_names,
            scaler,
            threshold,
            model,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        io::write_json(path, self)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let saved: SavedModel = io::read_json(path)?;
        if saved.format != MODEL_FORMAT || saved.version != MODEL_VERSION {
            return Err(Error::Schema(format!(
                "{}: unsupported model format {} v{}",
                path.display(),
                saved.format,
                saved.version
            )));
        }
        let n = saved.feature_names.len();
        if saved.model.feature_dim() != n || saved.scaler.features() != n {
            return Err(Error::dimension(
                "saved model",
                format!("{n} features"),
                format!("model {} / scaler {}", saved.model.feature_dim(), saved.scaler.features()),
            ));
        }
        Ok(saved)
    }
}
