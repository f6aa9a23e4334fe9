use fuelgan_core::gan::{
    sample_latent, train, train_with_observer, value_function, GanConfig, GanModel, GanTrainer, GeneratorLoss, TrainEvent,
};
use fuelgan_core::nn::{bce_loss, check_gradients, relative_error, Layer, Matrix, Network};
use fuelgan_core::{Error, Rng};

fn tiny_config() -> GanConfig {
    GanConfig {
        latent_dim: 3,
        feature_dim: 2,
        generator_widths: vec![4, 4, 4, 4, 2],
        discriminator_widths: vec![4, 4, 4, 4, 3, 1],
        batch_size: 6,
        ..GanConfig::default()
    }
}

fn toy_rows(rows: usize, seed: u64) -> Matrix {
    let mut rng = Rng::new(seed);
    Matrix::from_fn(rows, 2, |_, _| rng.uniform_in(-0.8, 0.8))
}

fn gaussian_rows(rows: usize, seed: u64) -> Matrix {
    let mut rng = Rng::new(seed);
    let mean = [0.3, -0.2];
    let sd = 0.05f64.sqrt();
    let mut data = Vec::with_capacity(rows * 2);
    while data.len() < rows * 2 {
        let x = [mean[0] + sd * rng.normal(), mean[1] + sd * rng.normal()];
        if x.iter().all(|v| v.abs() <= 1.0) {
            data.extend_from_slice(&x);
        }
    }
    Matrix::from_vec(rows, 2, data).unwrap()
}

fn trainer(config: &GanConfig, seed: u64) -> GanTrainer {
    let mut rng = Rng::new(seed);
    let model = GanModel::build(config, &mut rng).unwrap();
    GanTrainer::new(model, rng).unwrap()
}

#[test]
fn discriminator_step_leaves_generator_untouched() {
    let config = tiny_config();
    let mut t = trainer(&config, 1);
    let before = t.model().generator.clone();
    let disc_before = t.model().discriminator.clone();
    let real = toy_rows(6, 2);
    t.discriminator_step(&real).unwrap();
    assert_eq!(t.model().generator, before);
    assert_ne!(t.model().discriminator, disc_before);
}

#[test]
fn generator_step_leaves_discriminator_untouched() {
    let config = tiny_config();
    let mut t = trainer(&config, 3);
    let disc = t.model().discriminator.clone();
    let gen = t.model().generator.clone();
    t.generator_step().unwrap();
    assert_eq!(t.model().discriminator, disc);
    assert_ne!(t.model().generator, gen);
}

#[test]
fn zero_learning_rates_freeze_parameters() {
    let mut config = tiny_config();
    config.sgd_learning_rate = 0.0;
    config.adam.learning_rate = 0.0;
    let mut t = trainer(&config, 4);
    let before = t.model().clone();
    let loss = t.discriminator_step(&toy_rows(6, 5)).unwrap();
    assert!(loss.is_finite() && loss > 0.0);
    t.generator_step().unwrap();
    assert_eq!(t.model(), &before);
}

#[test]
fn discriminator_loss_matches_independent_forward() {
    let config = tiny_config();
    let mut t = trainer(&config, 6);
    let real = toy_rows(6, 7);
    let fake = toy_rows(6, 8);
    // Replay the trainer's dropout stream on an untouched copy.
    let mut replay = t.rng().clone();
    let disc = t.model().discriminator.clone();
    let (loss, _) = t.discriminator_gradients(&real, &fake).unwrap();
    let p_real = disc.forward(&real, true, &mut replay).unwrap().output().unwrap().clone();
    let p_fake = disc.forward(&fake, true, &mut replay).unwrap().output().unwrap().clone();
    let expected = bce_loss(&p_real, &Matrix::filled(6, 1, 1.0)).unwrap() + bce_loss(&p_fake, &Matrix::zeros(6, 1)).unwrap();
    assert!((loss - expected).abs() <= 1e-12, "{loss} vs {expected}");
}

#[test]
fn discriminator_gradient_is_negated_objective_gradient() {
    // Loss = -(mean ln D(x) + mean ln(1 - D(G(z)))). Check against finite
    // differences of V on a dropout-free discriminator.
    let mut config = tiny_config();
    config.dropout_rate = 0.0;
    let mut t = trainer(&config, 9);
    let real = toy_rows(6, 10);
    let fake = toy_rows(6, 11);
    let (_, grads) = t.discriminator_gradients(&real, &fake).unwrap();
    let analytic: Vec<f64> = grads.tensors().into_iter().flatten().copied().collect();

    let objective = |disc: &Network| {
        let pr = disc.predict(&real).unwrap();
        let pf = disc.predict(&fake).unwrap();
        let m = 6.0;
        pr.as_slice().iter().map(|p| p.ln()).sum::<f64>() / m + pf.as_slice().iter().map(|p| (1.0 - p).ln()).sum::<f64>() / m
    };
    let mut probe = t.model().discriminator.clone();
    let h = 1e-5;
    let mut k = 0;
    for ti in 0..probe.parameters().len() {
        for j in 0..probe.parameters()[ti].len() {
            let orig = probe.parameters()[ti][j];
            probe.parameters_mut()[ti][j] = orig + h;
            let plus = objective(&probe);
            probe.parameters_mut()[ti][j] = orig - h;
            let minus = objective(&probe);
            probe.parameters_mut()[ti][j] = orig;
            let ascent = (plus - minus) / (2.0 * h);
            assert!(relative_error(analytic[k], -ascent, 1e-7) <= 1e-4, "param {k}: {} vs {}", analytic[k], -ascent);
            k += 1;
        }
    }
}

#[test]
fn generator_gradient_matches_finite_differences_through_discriminator() {
    for mode in [GeneratorLoss::Minimax, GeneratorLoss::NonSaturating] {
        let config = GanConfig {
            generator_loss: mode,
            ..tiny_config()
        };
        let t = trainer(&config, 12);
        let noise = sample_latent(6, 3, &mut Rng::new(13)).unwrap();
        let (loss, _, grads) = t.generator_gradients(&noise).unwrap();
        let analytic: Vec<f64> = grads.tensors().into_iter().flatten().copied().collect();
        let disc = t.model().discriminator.clone();
        let objective = |gen: &Network| {
            let p = disc.predict(&gen.predict(&noise).unwrap()).unwrap();
            let s: f64 = match mode {
                GeneratorLoss::Minimax => p.as_slice().iter().map(|v| (1.0 - v).ln()).sum(),
                GeneratorLoss::NonSaturating => -p.as_slice().iter().map(|v| v.ln()).sum::<f64>(),
            };
            s / 6.0
        };
        assert!((objective(&t.model().generator) - loss).abs() < 1e-12);
        let mut probe = t.model().generator.clone();
        let h = 1e-5;
        let mut k = 0;
        for ti in 0..probe.parameters().len() {
            for j in 0..probe.parameters()[ti].len() {
                let orig = probe.parameters()[ti][j];
                probe.parameters_mut()[ti][j] = orig + h;
                let plus = objective(&probe);
                probe.parameters_mut()[ti][j] = orig - h;
                let minus = objective(&probe);
                probe.parameters_mut()[ti][j] = orig;
                let numeric = (plus - minus) / (2.0 * h);
                assert!(relative_error(analytic[k], numeric, 1e-7) <= 1e-4, "{mode:?} param {k}");
                k += 1;
            }
        }
    }
}

#[test]
fn discriminator_network_gradients_with_frozen_dropout() {
    let config = tiny_config();
    let mut model = GanModel::build(&config, &mut Rng::new(14)).unwrap();
    // Zero biases put fully-dropped rows exactly on the leaky-relu kink.
    let mut rng = Rng::new(29);
    for layer in &mut model.discriminator.layers {
        if let Layer::Dense(d) = layer {
            d.biases.iter_mut().for_each(|b| *b = rng.uniform_in(-0.5, 0.5));
        }
    }
    assert!(model.discriminator.layers.iter().any(|l| matches!(l, Layer::Dropout(_))));
    let input = toy_rows(5, 15);
    let weights = Matrix::from_fn(5, 1, |r, _| 0.3 + 0.1 * r as f64);
    let report = check_gradients(&model.discriminator, &input, &weights, &Rng::new(16), 1e-5, 1e-7).unwrap();
    assert!(report.max_relative_error <= 1e-4, "{report:?}");
}

#[test]
fn loop_accounting() {
    let config = GanConfig {
        k: 2,
        iterations: 5,
        ..tiny_config()
    };
    let (mut d, mut g, mut ends) = (0, 0, 0);
    let (_, trace) = train_with_observer(&config, &toy_rows(20, 17), |e| match e {
        TrainEvent::DiscriminatorUpdate { .. } => d += 1,
        TrainEvent::GeneratorUpdate { .. } => g += 1,
        TrainEvent::IterationEnd(_) => ends += 1,
    })
    .unwrap();
    assert_eq!((d, g, ends), (10, 5, 5));
    assert_eq!(trace.len(), 5);
    for (i, e) in trace.entries.iter().enumerate() {
        assert_eq!(e.iteration, i);
    }
}

#[test]
fn zero_iterations_returns_fresh_model() {
    let config = GanConfig {
        iterations: 0,
        ..tiny_config()
    };
    let (model, trace) = train(&config, &toy_rows(20, 18)).unwrap();
    assert!(trace.is_empty());
    let fresh = GanModel::build(&config, &mut Rng::new(config.seed)).unwrap();
    assert_eq!(model, fresh);
}

#[test]
fn training_is_deterministic() {
    let config = GanConfig {
        iterations: 20,
        ..tiny_config()
    };
    let data = toy_rows(30, 19);
    let (a, ta) = train(&config, &data).unwrap();
    let (b, tb) = train(&config, &data).unwrap();
    assert_eq!(a, b);
    assert_eq!(ta, tb);
}

#[test]
fn training_preconditions() {
    let config = tiny_config();
    let mut data = toy_rows(20, 20);
    data.set(3, 1, 1.5);
    assert!(matches!(train(&config, &data), Err(Error::Precondition(_))));
    assert!(matches!(train(&config, &toy_rows(3, 21)), Err(Error::Argument(_))));
    assert!(matches!(train(&config, &Matrix::zeros(20, 3)), Err(Error::Dimension { .. })));
}

#[test]
fn value_function_matches_term_by_term_evaluation() {
    let config = tiny_config();
    let model = GanModel::build(&config, &mut Rng::new(22)).unwrap();
    let real = toy_rows(4, 23);
    let noise = sample_latent(4, 3, &mut Rng::new(24)).unwrap();
    let v = value_function(&model, &real, &noise).unwrap();
    let pr = model.discriminate(&real).unwrap();
    let pf = model.discriminate(&model.generate(&noise).unwrap()).unwrap();
    let mut expected = 0.0;
    for p in &pr {
        expected += p.ln() / 4.0;
    }
    for p in &pf {
        expected += (1.0 - p).ln() / 4.0;
    }
    assert!((v - expected).abs() <= 1e-12);
}

#[test]
fn toy_gaussian_convergence_and_separation() {
    let config = GanConfig::for_features(2);
    let data = gaussian_rows(4000, 25);
    let (model, trace) = train(&config, &data).unwrap();
    assert_eq!(trace.len(), 2000);

    let noise = sample_latent(10_000, config.latent_dim, &mut Rng::new(26)).unwrap();
    let fake = model.generate(&noise).unwrap();
    let means = fake.column_means();
    assert!((means[0] - 0.3).abs() <= 0.1, "{means:?}");
    assert!((means[1] + 0.2).abs() <= 0.1, "{means:?}");

    let held_out = gaussian_rows(1000, 27);
    let d_real = model.discriminate(&held_out).unwrap();
    let mean_d = d_real.iter().sum::<f64>() / d_real.len() as f64;
    assert!((0.3..=0.7).contains(&mean_d), "mean D(x) {mean_d}");

    let losses = trace.discriminator_losses();
    let variance = |xs: &[f64]| {
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
    };
    assert!(variance(&losses[losses.len() - 100..]) < variance(&losses[..100]));

    // Points 10 standard deviations out, in random directions.
    let sd = 0.05f64.sqrt();
    let mut rng = Rng::new(28);
    let far = Matrix::from_fn(100, 2, |_, c| {
        let sign = if rng.bernoulli(0.5) { 1.0 } else { -1.0 };
        [0.3, -0.2][c] + sign * 10.0 * sd
    });
    let far_score = 1.0 - model.discriminate(&far).unwrap().iter().sum::<f64>() / 100.0;
    assert!(far_score > 1.0 - mean_d, "far {far_score} vs held-out {}", 1.0 - mean_d);
}
