//! Alternating adversarial training: `k` discriminator updates, then one
//! generator update, per outer iteration.

use serde::{Deserialize, Serialize};

use super::config::{GanConfig, GeneratorLoss};
use super::model::{sample_latent, value_from_probabilities, GanModel};
use crate::error::{Error, Result};
use crate::nn::{bce_gradient, bce_loss, clamped_ln, clamped_ln_derivative, AdamState, Direction, Gradients, Matrix, SgdState};
use crate::rng::Rng;

/// Tolerance on the `[−1, 1]` input range check.
pub const SCALED_RANGE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub discriminator_loss: f64,
    pub generator_loss: f64,
    pub value: f64,
    pub mean_real_probability: f64,
    pub mean_fake_probability: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingTrace {
    pub entries: Vec<TraceEntry>,
}

impl TrainingTrace {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn last(&self) -> Option<&TraceEntry> {
        self.entries.last()
    }

    pub fn discriminator_losses(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.discriminator_loss).collect()
    }

    pub fn generator_losses(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.generator_loss).collect()
    }

    /// CSV with columns `iteration,d_loss,g_loss,value,mean_d_real,mean_d_fake`.
    pub fn write_csv<W: std::io::Write>(&self, writer: W, fingerprint: &str) -> Result<()> {
        let mut out = crate::io::commented_csv_writer(writer, &[("config_fingerprint", fingerprint)])?;
        out.write_record(["iteration", "d_loss", "g_loss", "value", "mean_d_real", "mean_d_fake"])?;
        for e in &self.entries {
            out.write_record([
                e.iteration.to_string(),
                crate::io::fmt_f64(e.discriminator_loss),
                crate::io::fmt_f64(e.generator_loss),
                crate::io::fmt_f64(e.value),
                crate::io::fmt_f64(e.mean_real_probability),
                crate::io::fmt_f64(e.mean_fake_probability),
            ])?;
        }
        out.flush().map_err(|e| Error::io("trace", e))?;
        Ok(())
    }
}

/// Progress notifications emitted by [`train_with_observer`].
#[derive(Debug, Clone, Copy)]
pub enum TrainEvent<'a> {
    DiscriminatorUpdate { loss: f64 },
    GeneratorUpdate { loss: f64 },
    IterationEnd(&'a TraceEntry),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorStep {
    pub loss: f64,
    /// `D(G(z))` per noise row before the update, dropout off.
    pub fake_probabilities: Vec<f64>,
}

impl GeneratorStep {
    pub fn mean_fake_probability(&self) -> f64 {
        self.fake_probabilities.iter().sum::<f64>() / self.fake_probabilities.len() as f64
    }
}

/// Owns a model plus its two optimizers and the training stream.
#[derive(Debug, Clone)]
pub struct GanTrainer {
    model: GanModel,
    generator_optimizer: AdamState,
    discriminator_optimizer: SgdState,
    rng: Rng,
}

impl GanTrainer {
    pub fn new(model: GanModel, rng: Rng) -> Result<Self> {
        model.config.validate()?;
        let shapes: Vec<usize> = model.generator.parameters().iter().map(|p| p.len()).collect();
        Ok(Self {
            generator_optimizer: AdamState::new(model.config.adam, &shapes),
            discriminator_optimizer: SgdState::new(model.config.sgd_learning_rate)?,
            model,
            rng,
        })
    }

    pub fn model(&self) -> &GanModel {
        &self.model
    }

    pub fn into_model(self) -> GanModel {
        self.model
    }

    pub fn rng(&self) -> &Rng {
        &self.rng
    }

    /// Discriminator gradients of `BCE(D(real), 1) + BCE(D(fake), 0)` and the
    /// loss value, with dropout active. The loss is the negated batch objective
    /// `(1/m) Σ [ln D(x) + ln(1 − D(G(z)))]`, so descending it ascends that objective.
    pub fn discriminator_gradients(&mut self, real: &Matrix, fake: &Matrix) -> Result<(f64, Gradients)> {
        self.model.check_features(real, "discriminator_step real batch")?;
        self.model.check_features(fake, "discriminator_step fake batch")?;
        let disc = &self.model.discriminator;
        let real_cache = disc.forward(real, true, &mut self.rng)?;
        let fake_cache = disc.forward(fake, true, &mut self.rng)?;
        let p_real = real_cache.output().expect("forward output");
        let p_fake = fake_cache.output().expect("forward output");
        let ones = Matrix::filled(real.rows(), 1, 1.0);
        let zeros = Matrix::zeros(fake.rows(), 1);
        let loss = bce_loss(p_real, &ones)? + bce_loss(p_fake, &zeros)?;

        let (mut grads, _) = disc.backward(&real_cache, &bce_gradient(p_real, &ones)?)?;
        let (fake_grads, _) = disc.backward(&fake_cache, &bce_gradient(p_fake, &zeros)?)?;
        for (g, f) in grads.layers.iter_mut().zip(&fake_grads.layers) {
            for (a, b) in g.weights.as_mut_slice().iter_mut().zip(f.weights.as_slice()) {
                *a += b;
            }
            for (a, b) in g.biases.iter_mut().zip(&f.biases) {
                *a += b;
            }
        }
        Ok((loss, grads))
    }

    /// One SGD update of the discriminator on `real` against `m` fresh fakes.
    /// Returns the pre-update loss. Generator parameters are not touched.
    pub fn discriminator_step(&mut self, real: &Matrix) -> Result<f64> {
        self.model.check_features(real, "discriminator_step")?;
        let config = &self.model.config;
        let noise = sample_latent(config.batch_size, config.latent_dim, &mut self.rng)?;
        let fake = self.model.generate(&noise)?;
        let (loss, grads) = self.discriminator_gradients(real, &fake)?;
        let mut params = self.model.discriminator.parameters_mut();
        self.discriminator_optimizer
            .step(&mut params, &grads.tensors(), Direction::Descend)?;
        Ok(loss)
    }

    /// Generator loss and gradients for a given noise batch, discriminator in
    /// inference mode.
    pub fn generator_gradients(&self, noise: &Matrix) -> Result<(f64, Vec<f64>, Gradients)> {
        // Generator has no dropout layers, so the stream is never consumed here.
        let mut unused = Rng::new(0);
        let gen_cache = self.model.generator.forward(noise, true, &mut unused)?;
        let fake = gen_cache.output().expect("forward output");
        let disc_cache = self.model.discriminator.forward(fake, false, &mut unused)?;
        let p = disc_cache.output().expect("forward output");
        let m = p.rows() as f64;

        let (loss, upstream): (f64, Vec<f64>) = match self.model.config.generator_loss {
            GeneratorLoss::Minimax => (
                p.as_slice().iter().map(|&v| clamped_ln(1.0 - v)).sum::<f64>() / m,
                p.as_slice().iter().map(|&v| -clamped_ln_derivative(1.0 - v) / m).collect(),
            ),
            GeneratorLoss::NonSaturating => (
                -p.as_slice().iter().map(|&v| clamped_ln(v)).sum::<f64>() / m,
                p.as_slice().iter().map(|&v| -clamped_ln_derivative(v) / m).collect(),
            ),
        };
        let upstream = Matrix::from_vec(p.rows(), 1, upstream)?;
        let (_, d_fake) = self.model.discriminator.backward(&disc_cache, &upstream)?;
        let (grads, _) = self.model.generator.backward(&gen_cache, &d_fake)?;
        Ok((loss, p.as_slice().to_vec(), grads))
    }

    /// One Adam update of the generator. Discriminator parameters are not touched.
    pub fn generator_step(&mut self) -> Result<GeneratorStep> {
        let config = &self.model.config;
        let noise = sample_latent(config.batch_size, config.latent_dim, &mut self.rng)?;
        let (loss, fake_probabilities, grads) = self.generator_gradients(&noise)?;
        let mut params = self.model.generator.parameters_mut();
        self.generator_optimizer.step(&mut params, &grads.tensors())?;
        Ok(GeneratorStep {
            loss,
            fake_probabilities,
        })
    }

    /// `m` rows drawn uniformly with replacement.
    pub fn sample_batch(&mut self, data: &Matrix) -> Matrix {
        let indices: Vec<usize> = (0..self.model.config.batch_size)
            .map(|_| self.rng.below(data.rows()))
            .collect();
        data.select_rows(&indices)
    }
}

fn check_training_data(config: &GanConfig, data: &Matrix) -> Result<()> {
    if data.cols() != config.feature_dim {
        return Err(Error::dimension(
            "train",
            format!("{} feature columns", config.feature_dim),
            format!("{} columns", data.cols()),
        ));
    }
    if data.rows() < config.batch_size {
        return Err(Error::Argument(format!(
            "{} training rows cannot fill one batch of {}",
            data.rows(),
            config.batch_size
        )));
    }
    if let Some((i, v)) = data
        .as_slice()
        .iter()
        .enumerate()
        .find(|(_, v)| !v.is_finite() || v.abs() > 1.0 + SCALED_RANGE_TOLERANCE)
    {
        return Err(Error::Precondition(format!(
            "training data must be scaled to [-1, 1]; row {} holds {v}",
            i / data.cols()
        )));
    }
    Ok(())
}

/// Trains a fresh model on `data` (rows already scaled to `[−1, 1]`).
pub fn train(config: &GanConfig, data: &Matrix) -> Result<(GanModel, TrainingTrace)> {
    train_with_observer(config, data, |_| {})
}

pub fn train_with_observer(
    config: &GanConfig,
    data: &Matrix,
    mut observer: impl FnMut(TrainEvent<'_>),
) -> Result<(GanModel, TrainingTrace)> {
    config.validate()?;
    check_training_data(config, data)?;
    let mut rng = Rng::new(config.seed);
    let model = GanModel::build(config, &mut rng)?;
    let mut trainer = GanTrainer::new(model, rng)?;
    let mut trace = TrainingTrace::default();

    for iteration in 0..config.iterations {
        let mut d_loss = 0.0;
        let mut last_real = None;
        for _ in 0..config.k {
            let real = trainer.sample_batch(data);
            let loss = trainer.discriminator_step(&real)?;
            observer(TrainEvent::DiscriminatorUpdate { loss });
            d_loss += loss;
            last_real = Some(real);
        }
        let real = last_real.expect("k >= 1");
        let step = trainer.generator_step()?;
        observer(TrainEvent::GeneratorUpdate { loss: step.loss });

        // Post-discriminator-update D(x), pre-generator-update D(G(z)): the
        // same discriminator parameters see both batches.
        let d_real = trainer.model().discriminate(&real)?;
        let mean_real = d_real.iter().sum::<f64>() / d_real.len() as f64;
        let value = value_from_probabilities(&d_real, &step.fake_probabilities);
        let entry = TraceEntry {
            iteration,
            discriminator_loss: d_loss / config.k as f64,
            generator_loss: step.loss,
            value,
            mean_real_probability: mean_real,
            mean_fake_probability: step.mean_fake_probability(),
        };
        if ![entry.discriminator_loss, entry.generator_loss, entry.value].iter().all(|v| v.is_finite()) {
            return Err(Error::State(format!("non-finite training statistics at iteration {iteration}")));
        }
        observer(TrainEvent::IterationEnd(&entry));
        trace.entries.push(entry);
    }
    Ok((trainer.into_model(), trace))
}
