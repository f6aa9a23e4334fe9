//! Generator/discriminator pair, adversarial training and discriminator-based
//! anomaly scoring.

mod config;
mod model;
mod saved;
mod score;
mod train;

pub use config::{GanConfig, GeneratorLoss, DISCRIMINATOR_DEPTH, GENERATOR_DEPTH, GENERATOR_LEARNING_RATE};
pub use model::{sample_latent, value_function, GanModel};
pub use saved::SavedModel;
pub use score::{calibrate_threshold, score, AnomalyScore};
pub use train::{train, train_with_observer, GanTrainer, GeneratorStep, TraceEntry, TrainEvent, TrainingTrace};
