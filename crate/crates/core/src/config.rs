//! Whole-run configuration and content fingerprints.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::augment::AugmentConfig;
use crate::data::LabelRuleSet;
use crate::error::{Error, Result};
use crate::forest::ForestConfig;
use crate::gan::GanConfig;
use crate::synth::SynthConfig;

/// First 16 hex digits of the SHA-256 of the value's JSON encoding.
pub fn fingerprint<T: Serialize>(value: &T) -> String {
    let json = serde_json::to_vec(value).expect("config types always serialize");
    let digest = Sha256::digest(&json);
    hex::encode(&digest[..8])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvaluateConfig {
    /// Fixed threshold on the anomaly score `1 − D(x)`.
    pub threshold: f64,
    /// Pick the F1-maximizing threshold on the original training rows instead.
    pub calibrate: bool,
}

impl Default for EvaluateConfig {
    fn default() -> Self {
        Self {
            threshold: 0.5,
            calibrate: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub seed: u64,
    pub test_fraction: f64,
    pub synth: SynthConfig,
    pub labels: LabelRuleSet,
    pub augment: AugmentConfig,
    pub forest: ForestConfig,
    pub gan: GanConfig,
    pub evaluate: EvaluateConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            test_fraction: 0.2,
            synth: SynthConfig::default(),
            labels: LabelRuleSet::default(),
            augment: AugmentConfig::default(),
            forest: ForestConfig::default(),
            gan: GanConfig::default(),
            evaluate: EvaluateConfig::default(),
        }
    }
}

impl RunConfig {
    /// Sets the run seed and every stage seed to `seed`.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.synth.seed = seed;
        self.augment.seed = seed;
        self.forest.seed = seed;
        self.gan.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::Config(format!("test_fraction {} must lie in (0, 1)", self.test_fraction)));
        }
        self.synth.validate()?;
        self.labels.validate()?;
        self.augment.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.forest.validate()?;
        self.gan.validate()?;
        if !(0.0..=1.0).contains(&self.evaluate.threshold) {
            return Err(Error::Config(format!("threshold {} outside [0, 1]", self.evaluate.threshold)));
        }
        Ok(())
    }

    pub fn fingerprint(&self) -> String {
        fingerprint(self)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let config: RunConfig = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fingerprint_is_stable_and_sensitive() {
        let a = RunConfig::default();
        assert_eq!(a.fingerprint(), RunConfig::default().fingerprint());
        assert_eq!(a.fingerprint().len(), 16);
        assert_ne!(a.fingerprint(), a.clone().with_seed(1).fingerprint());
    }

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn partial_file() {
        let c: RunConfig = serde_json::from_str(r#"{"seed": 3, "gan": {"iterations": 10}}"#).unwrap();
        assert_eq!(c.seed, 3);
        assert_eq!(c.gan.iterations, 10);
        assert_eq!(c.gan.batch_size, 64);
    }
}
