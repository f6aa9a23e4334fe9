use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::AdamConfig;

pub const GENERATOR_DEPTH: usize = 5;
pub const DISCRIMINATOR_DEPTH: usize = 6;

/// Objective the generator descends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorLoss {
    /// `mean ln(1 − D(G(z)))`, the original zero-sum objective.
    #[default]
    Minimax,
    /// `−mean ln D(G(z))`, stronger gradients while D rejects fakes confidently.
    NonSaturating,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GanConfig {
    pub latent_dim: usize,
    pub feature_dim: usize,
    /// Five widths; the last must equal `feature_dim`.
    pub generator_widths: Vec<usize>,
    /// Six widths; the last must be 1.
    pub discriminator_widths: Vec<usize>,
    pub dropout_rate: f64,
    /// Discriminator updates per generator update.
    pub k: usize,
    pub batch_size: usize,
    pub iterations: usize,
    pub adam: AdamConfig,
    pub sgd_learning_rate: f64,
    pub generator_loss: GeneratorLoss,
    pub seed: u64,
}

/// Generator Adam step size. At 1e-3 the generator outpaces the SGD
/// discriminator and wanders instead of settling on the data.
pub const GENERATOR_LEARNING_RATE: f64 = 1e-4;

impl Default for GanConfig {
    fn default() -> Self {
        Self::for_features(8)
    }
}

impl GanConfig {
    /// Default hyperparameters for `feature_dim` features.
    pub fn for_features(feature_dim: usize) -> Self {
        Self {
            latent_dim: 32,
            feature_dim,
            generator_widths: vec![64, 128, 128, 64, feature_dim],
            discriminator_widths: vec![128, 64, 64, 32, 16, 1],
            dropout_rate: 0.3,
            k: 1,
            batch_size: 64,
            iterations: 2000,
            adam: AdamConfig {
                learning_rate: GENERATOR_LEARNING_RATE,
                ..AdamConfig::default()
            },
            sgd_learning_rate: 0.01,
            generator_loss: GeneratorLoss::Minimax,
            seed: 42,
        }
    }

    /// Re-targets the generator output layer to `feature_dim`.
    pub fn with_feature_dim(mut self, feature_dim: usize) -> Self {
        self.feature_dim = feature_dim;
        if let Some(last) = self.generator_widths.last_mut() {
            *last = feature_dim;
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.generator_widths.len() != GENERATOR_DEPTH {
            return fail(format!(
                "generator needs {GENERATOR_DEPTH} dense layers, got {} widths",
                self.generator_widths.len()
            ));
        }
        if self.discriminator_widths.len() != DISCRIMINATOR_DEPTH {
            return fail(format!(
                "discriminator needs {DISCRIMINATOR_DEPTH} dense layers, got {} widths",
                self.discriminator_widths.len()
            ));
        }
        if self.generator_widths.last() != Some(&self.feature_dim) {
            return fail(format!(
                "generator output width {:?} must equal feature_dim {}",
                self.generator_widths.last(),
                self.feature_dim
            ));
        }
        if self.discriminator_widths.last() != Some(&1) {
            return fail("discriminator output width must be 1".into());
        }
        if self.generator_widths.iter().chain(&self.discriminator_widths).any(|&w| w == 0) {
            return fail("layer widths must be positive".into());
        }
        if self.latent_dim == 0 || self.feature_dim == 0 {
            return fail("latent_dim and feature_dim must be positive".into());
        }
        if self.k == 0 {
            return fail("k must be at least 1".into());
        }
        if self.batch_size == 0 {
            return fail("batch_size must be at least 1".into());
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return fail(format!("dropout rate {} outside [0, 1)", self.dropout_rate));
        }
        if !(self.sgd_learning_rate >= 0.0 && self.sgd_learning_rate.is_finite()) {
            return fail(format!("sgd learning rate {} must be non-negative", self.sgd_learning_rate));
        }
        self.adam.validate()
    }
}
