use serde::{Deserialize, Serialize};

use super::config::GanConfig;
use crate::error::{Error, Result};
use crate::nn::{clamped_ln, Activation, DenseLayer, DropoutSpec, Layer, Matrix, Network};
use crate::rng::Rng;

/// Generator `G: ℝᵈ → ℝⁿ` and discriminator `D: ℝⁿ → (0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GanModel {
    pub config: GanConfig,
    pub generator: Network,
    pub discriminator: Network,
}

impl GanModel {
    /// Builds both networks. Generator layers are all tanh. Discriminator
    /// hidden layers are leaky ReLU, each followed by dropout, and the head is
    /// a sigmoid.
    pub fn build(config: &GanConfig, rng: &mut Rng) -> Result<Self> {
        config.validate()?;
        let mut generator = Vec::with_capacity(config.generator_widths.len());
        let mut inputs = config.latent_dim;
        for &width in &config.generator_widths {
            generator.push(Layer::Dense(DenseLayer::initialized(inputs, width, Activation::Tanh, rng)));
            inputs = width;
        }

        let dropout = DropoutSpec::new(config.dropout_rate)?;
        let mut discriminator = Vec::with_capacity(2 * config.discriminator_widths.len());
        let mut inputs = config.feature_dim;
        let last = config.discriminator_widths.len() - 1;
        for (i, &width) in config.discriminator_widths.iter().enumerate() {
            if i == last {
                discriminator.push(Layer::Dense(DenseLayer::initialized(inputs, width, Activation::Sigmoid, rng)));
            } else {
                discriminator.push(Layer::Dense(DenseLayer::initialized(inputs, width, Activation::LeakyRelu, rng)));
                discriminator.push(Layer::Dropout(dropout));
            }
            inputs = width;
        }

        Ok(Self {
            config: config.clone(),
            generator: Network::new(generator),
            discriminator: Network::new(discriminator),
        })
    }

    pub fn feature_dim(&self) -> usize {
        self.config.feature_dim
    }

    pub fn check_features(&self, rows: &Matrix, context: &'static str) -> Result<()> {
        if rows.cols() != self.feature_dim() {
            return Err(Error::dimension(
                context,
                format!("{} feature columns", self.feature_dim()),
                format!("{} columns", rows.cols()),
            ));
        }
        Ok(())
    }

    /// `G(z)`.
    pub fn generate(&self, noise: &Matrix) -> Result<Matrix> {
        self.generator.predict(noise)
    }

    /// `D(x)` with dropout disabled, one probability per row.
    pub fn discriminate(&self, rows: &Matrix) -> Result<Vec<f64>> {
        self.check_features(rows, "discriminate")?;
        Ok(self.discriminator.predict(rows)?.into_vec())
    }
}

/// `m × d` matrix of i.i.d. standard-normal draws.
pub fn sample_latent(m: usize, d: usize, rng: &mut Rng) -> Result<Matrix> {
    if m == 0 || d == 0 {
        return Err(Error::Argument(format!("latent batch must be non-empty, got {m}x{d}")));
    }
    Ok(Matrix::from_fn(m, d, |_, _| rng.normal()))
}

/// Batch estimate of `V(D, G) = mean ln D(x) + mean ln(1 − D(G(z)))`, with the
/// discriminator in inference mode and clamped logarithms.
pub fn value_function(model: &GanModel, real: &Matrix, noise: &Matrix) -> Result<f64> {
    if real.rows() == 0 || noise.rows() == 0 {
        return Err(Error::Argument("value function needs non-empty real and noise batches".into()));
    }
    let d_real = model.discriminate(real)?;
    let d_fake = model.discriminate(&model.generate(noise)?)?;
    Ok(value_from_probabilities(&d_real, &d_fake))
}

pub(crate) fn value_from_probabilities(d_real: &[f64], d_fake: &[f64]) -> f64 {
    let real_term = d_real.iter().map(|&p| clamped_ln(p)).sum::<f64>() / d_real.len() as f64;
    let fake_term = d_fake.iter().map(|&p| clamped_ln(1.0 - p)).sum::<f64>() / d_fake.len() as f64;
    real_term + fake_term
}
