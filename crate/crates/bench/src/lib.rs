//! Fixtures shared by the benchmarks.

use fuelgan_core::config::RunConfig;
use fuelgan_core::data::{clean, load_csv_from_reader, stratified_split, Schema};
use fuelgan_core::nn::{Activation, DenseLayer, DropoutSpec, Layer, Network};
use fuelgan_core::{synth, Matrix, ProcessedDataset, Rng};

/// The default synthetic log, cleaned, labeled and split.
pub fn synthetic_dataset() -> ProcessedDataset {
    let config = RunConfig::default();
    let output = synth::generate(&config.synth, &config.fingerprint()).expect("synthetic log");
    let report = load_csv_from_reader(output.csv.as_slice(), &Schema::default()).expect("load");
    let (records, _) = clean(&report.records);
    let mut dataset = ProcessedDataset::from_records(&records, &config.labels).expect("dataset");
    dataset.split = stratified_split(&dataset.labels, config.test_fraction, config.seed).expect("split");
    dataset
}

/// A discriminator-shaped stack: leaky-relu layers with dropout and a sigmoid head.
pub fn dense_stack(input: usize, widths: &[usize], rng: &mut Rng) -> Network {
    let mut layers = Vec::new();
    let mut fan_in = input;
    for (i, &w) in widths.iter().enumerate() {
        let head = i + 1 == widths.len();
        let act = if head { Activation::Sigmoid } else { Activation::LeakyRelu };
        layers.push(Layer::Dense(DenseLayer::initialized(fan_in, w, act, rng)));
        if !head {
            layers.push(Layer::Dropout(DropoutSpec::new(0.3).expect("dropout rate")));
        }
        fan_in = w;
    }
    Network::new(layers)
}

pub fn uniform_matrix(rows: usize, cols: usize, rng: &mut Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.uniform_in(-1.0, 1.0))
}
