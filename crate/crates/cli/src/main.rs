//! `fuelgan`: one subcommand per pipeline stage, plus `pipeline` to chain them.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fuelgan_core::ErrorCategory;

#[derive(Debug, Parser)]
#[command(name = "fuelgan", version, about = "GAN anomaly detection for generator fuel-consumption logs")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Run configuration (JSON). Missing fields take their defaults.
    #[arg(long, global = true, env = "FUELGAN_CONFIG")]
    pub config: Option<PathBuf>,
    /// Overrides every seed in the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the effective configuration as JSON.
    Config {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a synthetic raw consumption log and its metadata.
    Synth {
        #[arg(long)]
        out: PathBuf,
    },
    /// Clean, derive, label and split a raw log.
    Preprocess {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Rejected and dropped rows; defaults to `<out>.rejections.csv`.
        #[arg(long)]
        rejections_out: Option<PathBuf>,
    },
    /// Add noisy copies of the training rows.
    Augment {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Random-forest feature importance.
    Importance {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Pearson correlation matrix of the features.
    Correlate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Running-time-per-day plot data.
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
        /// `scatter-running-time` or `time-series-running-time`.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the GAN on the normal training rows.
    Train {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        model_out: PathBuf,
        #[arg(long)]
        trace_out: PathBuf,
    },
    /// Evaluate on the original test rows.
    Evaluate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        threshold: ThresholdArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-row anomaly scores.
    Score {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        model: PathBuf,
        /// Defaults to the threshold stored with the model.
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Side-by-side metrics of two evaluation reports.
    Compare {
        #[arg(long)]
        report_a: PathBuf,
        #[arg(long)]
        report_b: PathBuf,
        #[arg(long, default_value = "Without Augmentation")]
        name_a: String,
        #[arg(long, default_value = "With Augmentation")]
        name_b: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// synth → preprocess → importance → correlate → augment → train ×2 → evaluate ×2 → compare.
    Pipeline {
        #[arg(long)]
        out_dir: PathBuf,
        /// Use an existing raw log instead of generating one.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[command(flatten)]
        threshold: ThresholdArgs,
    },
}

#[derive(Debug, Clone, Copy, Args)]
#[group(multiple = false)]
pub struct ThresholdArgs {
    /// Fixed threshold on the anomaly score 1 − D(x).
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Choose the F1-maximizing threshold on the original training rows.
    #[arg(long)]
    pub calibrate: bool,
}

fn exit_code(category: ErrorCategory) -> u8 {
    match category {
        ErrorCategory::Io => 2,
        ErrorCategory::Config => 3,
        ErrorCategory::Domain => 4,
    }
}

fn report(category: ErrorCategory, message: &str) -> ExitCode {
    let message = message.replace(['\n', '\r'], " ");
    eprintln!("error category={} message={message}", category.as_str());
    ExitCode::from(exit_code(category))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            return report(ErrorCategory::Config, text.lines().next().unwrap_or("invalid arguments"));
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(e.category(), &e.to_string()),
    }
}
