//! Anomaly detection for generator fuel-consumption records with a GAN
//! discriminator as the scorer, plus the surrounding tabular pipeline.

pub mod augment;
pub mod config;
pub mod data;
pub mod error;
pub mod forest;
pub mod gan;
pub mod io;
pub mod metrics;
pub mod nn;
pub mod pipeline;
pub mod rng;
pub mod synth;

pub use config::{fingerprint, RunConfig};
pub use data::{Label, ProcessedDataset};
pub use error::{Error, ErrorCategory, Result};
pub use nn::Matrix;
pub use rng::Rng;
