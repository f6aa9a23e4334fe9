use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use fuelgan_bench::{dense_stack, synthetic_dataset, uniform_matrix};
use fuelgan_core::augment::{augment, AugmentConfig};
use fuelgan_core::data::{correlation_matrix, Split};
use fuelgan_core::forest::{ForestConfig, RandomForest};
use fuelgan_core::gan::{GanConfig, GanModel, GanTrainer};
use fuelgan_core::{Matrix, Rng};

fn dense(c: &mut Criterion) {
    let mut rng = Rng::new(1);
    let net = dense_stack(8, &[128, 64, 64, 32, 16, 1], &mut rng);
    let input = uniform_matrix(64, 8, &mut rng);
    let upstream = Matrix::from_fn(64, 1, |_, _| 1.0);
    c.bench_function("dense forward 64x8", |b| {
        b.iter(|| net.forward(black_box(&input), true, &mut rng).unwrap())
    });
    let cache = net.forward(&input, true, &mut rng).unwrap();
    c.bench_function("dense backward 64x8", |b| b.iter(|| net.backward(black_box(&cache), &upstream).unwrap()));
}

fn gan_step(c: &mut Criterion) {
    let mut rng = Rng::new(2);
    let data = uniform_matrix(4000, 8, &mut rng);
    let config = GanConfig::for_features(8);
    let model = GanModel::build(&config, &mut rng).unwrap();
    let mut trainer = GanTrainer::new(model, rng).unwrap();
    c.bench_function("gan iteration m=64", |b| {
        b.iter(|| {
            let batch = trainer.sample_batch(&data);
            trainer.discriminator_step(&batch).unwrap();
            trainer.generator_step().unwrap()
        })
    });
}

fn data_stages(c: &mut Criterion) {
    let dataset = synthetic_dataset();
    c.bench_function("augment 31 copies", |b| {
        b.iter(|| augment(black_box(&dataset), &AugmentConfig::default()).unwrap())
    });
    c.bench_function("correlation 8 features", |b| {
        b.iter(|| correlation_matrix(black_box(&dataset.features)).unwrap())
    });
    let train = dataset.split_indices(Split::Train);
    let x = dataset.features.select_rows(&train);
    let labels = dataset.labels_at(&train);
    let config = ForestConfig {
        tree_count: 20,
        ..ForestConfig::default()
    };
    let mut group = c.benchmark_group("forest");
    group.sample_size(10);
    group.bench_function("fit 20 trees", |b| {
        b.iter(|| RandomForest::fit(black_box(&x), &labels, &config).unwrap())
    });
    group.finish();
}

criterion_group!(benches, dense, gan_step, data_stages);
criterion_main!(benches);
