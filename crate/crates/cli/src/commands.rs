use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use fuelgan_core::augment::augment;
use fuelgan_core::config::RunConfig;
use fuelgan_core::data::{correlation_matrix, export_plot_data, write_rejections, PlotKind, ProcessedDataset, Rejection};
use fuelgan_core::forest::RandomForest;
use fuelgan_core::gan::SavedModel;
use fuelgan_core::io;
use fuelgan_core::metrics::{write_comparison, EvalReport};
use fuelgan_core::pipeline::{self, ThresholdChoice};
use fuelgan_core::{synth, Error, Result};

use crate::{Cli, Command, ThresholdArgs};

struct Context {
    config: RunConfig,
    fingerprint: String,
}

fn load_config(path: Option<&Path>, seed: Option<u64>) -> Result<Context> {
    let mut config = match path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = seed {
        config = config.with_seed(seed);
    }
    config.validate()?;
    let fingerprint = config.fingerprint();
    Ok(Context { config, fingerprint })
}

pub fn run(cli: Cli) -> Result<()> {
    let ctx = load_config(cli.global.config.as_deref(), cli.global.seed)?;
    match cli.command {
        Command::Config { out } => {
            let json = serde_json::to_string_pretty(&ctx.config)?;
            match out {
                Some(path) => io::write_json(&path, &ctx.config)?,
                None => writeln!(std::io::stdout(), "{json}").map_err(|e| Error::io("stdout", e))?,
            }
            eprintln!("config_fingerprint: {}", ctx.fingerprint);
            Ok(())
        }
        Command::Synth { out } => synth_cmd(&ctx, &out),
        Command::Preprocess {
            input,
            out,
            rejections_out,
        } => {
            let rejections_out = rejections_out.unwrap_or_else(|| suffixed(&out, ".rejections.csv"));
            preprocess_cmd(&ctx, &input, &out, &rejections_out).map(|_| ())
        }
        Command::Augment { input, out } => augment_cmd(&ctx, &input, &out),
        Command::Importance { input, out } => importance_cmd(&ctx, &input, &out),
        Command::Correlate { input, out } => correlate_cmd(&ctx, &input, &out),
        Command::Plot { input, kind, out } => {
            let kind: PlotKind = kind.parse()?;
            let dataset = ProcessedDataset::read_csv(&input)?;
            export_plot_data(&dataset, kind, io::create(&out)?, &ctx.fingerprint)
        }
        Command::Train {
            input,
            model_out,
            trace_out,
        } => train_cmd(&ctx, &input, &model_out, &trace_out),
        Command::Evaluate {
            input,
            model,
            threshold,
            out,
        } => evaluate_cmd(&ctx, &input, &model, threshold, &out).map(|_| ()),
        Command::Score {
            input,
            model,
            threshold,
            out,
        } => score_cmd(&ctx, &input, &model, threshold, &out),
        Command::Compare {
            report_a,
            report_b,
            name_a,
            name_b,
            out,
        } => compare_cmd(&report_a, &report_b, &name_a, &name_b, &out),
        Command::Pipeline {
            out_dir,
            input,
            threshold,
        } => pipeline_cmd(&ctx, &out_dir, input.as_deref(), threshold),
    }
}

fn suffixed(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(suffix);
    path.with_file_name(name)
}

fn dataset_name(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn synth_cmd(ctx: &Context, out: &Path) -> Result<()> {
    let output = synth::generate(&ctx.config.synth, &ctx.fingerprint)?;
    synth::write(&output, out)?;
    let c = &output.metadata.counts;
    eprintln!(
        "synth: {} rows ({} defective, {} anomalous) -> {}",
        c.emitted_rows,
        c.defect_rows,
        c.anomalies,
        out.display()
    );
    Ok(())
}

fn preprocess_cmd(ctx: &Context, input: &Path, out: &Path, rejections_out: &Path) -> Result<ProcessedDataset> {
    let pre = pipeline::preprocess(input, &ctx.config)?;
    pre.dataset.write_csv(out, &ctx.fingerprint)?;
    let mut rejected: Vec<Rejection> = pre.rejections.clone();
    rejected.extend(pre.dropped.dropped.iter().map(|(line, reason)| Rejection {
        line: *line,
        reason: format!("dropped: {}", reason.as_str()),
    }));
    rejected.sort_by_key(|r| r.line);
    write_rejections(rejections_out, &rejected, &ctx.fingerprint)?;
    eprintln!(
        "preprocess: {} rows kept ({} rejected, {} dropped), anomaly share {:.4} -> {}",
        pre.dataset.len(),
        pre.rejections.len(),
        pre.dropped.total(),
        pre.dataset.anomaly_share(),
        out.display()
    );
    Ok(pre.dataset)
}

fn augment_cmd(ctx: &Context, input: &Path, out: &Path) -> Result<()> {
    let dataset = ProcessedDataset::read_csv(input)?;
    let augmented = augment(&dataset, &ctx.config.augment)?;
    augmented.write_csv(out, &ctx.fingerprint)?;
    eprintln!("augment: {} -> {} rows -> {}", dataset.len(), augmented.len(), out.display());
    Ok(())
}

fn importance_cmd(ctx: &Context, input: &Path, out: &Path) -> Result<()> {
    let dataset = ProcessedDataset::read_csv(input)?;
    let forest = RandomForest::fit(&dataset.features, &dataset.labels, &ctx.config.forest)?;
    let report = forest.feature_importance(&dataset.feature_names);
    report.write_csv(io::create(out)?, &ctx.fingerprint)?;
    if let Some(top) = report.top() {
        eprintln!("importance: top feature {} ({:.4})", report.feature_names[top], report.importances[top]);
    }
    Ok(())
}

fn correlate_cmd(ctx: &Context, input: &Path, out: &Path) -> Result<()> {
    let dataset = ProcessedDataset::read_csv(input)?;
    let corr = correlation_matrix(&dataset.features)?;
    for &c in &corr.constant_features {
        eprintln!("warning: feature {} is constant; its correlations are reported as 0", dataset.feature_names[c]);
    }
    let mut w = io::commented_csv_writer(io::create(out)?, &[("config_fingerprint", &ctx.fingerprint)])?;
    let mut header = vec!["feature".to_string()];
    header.extend(dataset.feature_names.iter().cloned());
    w.write_record(&header)?;
    for (i, name) in dataset.feature_names.iter().enumerate() {
        let mut row = vec![name.clone()];
        row.extend(corr.matrix.row(i).iter().map(|&v| io::fmt_f64(v)));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io(out, e))
}

fn train_cmd(ctx: &Context, input: &Path, model_out: &Path, trace_out: &Path) -> Result<()> {
    let dataset = ProcessedDataset::read_csv(input)?;
    let (saved, trace) = pipeline::train_model(&dataset, &ctx.config.gan, &ctx.fingerprint)?;
    saved.save(model_out)?;
    trace.write_csv(io::create(trace_out)?, &ctx.fingerprint)?;
    match trace.last() {
        Some(last) => eprintln!(
            "train: {} iterations, final d_loss {:.4}, g_loss {:.4}, mean D(x) {:.4} -> {}",
            trace.len(),
            last.discriminator_loss,
            last.generator_loss,
            last.mean_real_probability,
            model_out.display()
        ),
        None => eprintln!("train: 0 iterations -> {}", model_out.display()),
    }
    Ok(())
}

fn threshold_choice(ctx: &Context, args: ThresholdArgs) -> Result<ThresholdChoice> {
    let choice = match (args.threshold, args.calibrate) {
        (Some(t), _) => ThresholdChoice::Fixed(t),
        (None, true) => ThresholdChoice::Calibrated,
        (None, false) if ctx.config.evaluate.calibrate => ThresholdChoice::Calibrated,
        (None, false) => ThresholdChoice::Fixed(ctx.config.evaluate.threshold),
    };
    if let ThresholdChoice::Fixed(t) = choice {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Config(format!("threshold {t} outside [0, 1]")));
        }
    }
    Ok(choice)
}

fn evaluate_cmd(ctx: &Context, input: &Path, model: &Path, threshold: ThresholdArgs, out: &Path) -> Result<EvalReport> {
    let dataset = ProcessedDataset::read_csv(input)?;
    let saved = SavedModel::load(model)?;
    let choice = threshold_choice(ctx, threshold)?;
    let report = pipeline::evaluate(&dataset, &saved, choice, &dataset_name(input), &ctx.fingerprint)?;
    io::write_json(out, &report)?;
    eprintln!(
        "evaluate: {} rows, threshold {:.4}, accuracy {} -> {}",
        report.rows,
        report.threshold,
        report.accuracy.display(),
        out.display()
    );
    Ok(report)
}

fn score_cmd(ctx: &Context, input: &Path, model: &Path, threshold: Option<f64>, out: &Path) -> Result<()> {
    let dataset = ProcessedDataset::read_csv(input)?;
    let saved = SavedModel::load(model)?;
    let threshold = threshold.unwrap_or(saved.threshold);
    let rows: Vec<usize> = (0..dataset.len()).collect();
    let scores = pipeline::score_rows(&dataset, &saved, &rows, threshold)?;
    let mut w = io::commented_csv_writer(
        io::create(out)?,
        &[
            ("config_fingerprint", &ctx.fingerprint),
            ("model_config_fingerprint", &saved.config_fingerprint),
        ],
    )?;
    w.write_record([
        "source_row",
        "copy",
        "split",
        "label",
        "probability_real",
        "anomaly_score",
        "predicted",
        "threshold",
    ])?;
    for (i, s) in scores.iter().enumerate() {
        let o = &dataset.origins[i];
        w.write_record([
            o.source_row.to_string(),
            o.copy.to_string(),
            dataset.split[i].as_str().to_string(),
            dataset.labels[i].as_u8().to_string(),
            io::fmt_f64(s.probability_real),
            io::fmt_f64(s.anomaly_score),
            s.predicted.as_u8().to_string(),
            io::fmt_f64(s.threshold),
        ])?;
    }
    w.flush().map_err(|e| Error::io(out, e))
}

fn compare_cmd(a: &Path, b: &Path, name_a: &str, name_b: &str, out: &Path) -> Result<()> {
    let ra: EvalReport = io::read_json(a)?;
    let rb: EvalReport = io::read_json(b)?;
    write_comparison(&ra, &rb, name_a, name_b, io::create(out)?)
}

fn pipeline_cmd(ctx: &Context, out_dir: &Path, input: Option<&Path>, threshold: ThresholdArgs) -> Result<()> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let path = |name: &str| out_dir.join(name);
    io::write_json(&path("config.json"), &ctx.config)?;
    let raw = match input {
        Some(p) => p.to_path_buf(),
        None => {
            synth_cmd(ctx, &path("raw.csv"))?;
            path("raw.csv")
        }
    };
    preprocess_cmd(ctx, &raw, &path("dataset.csv"), &path("rejections.csv"))?;
    importance_cmd(ctx, &path("dataset.csv"), &path("importance.csv"))?;
    correlate_cmd(ctx, &path("dataset.csv"), &path("correlation.csv"))?;
    augment_cmd(ctx, &path("dataset.csv"), &path("augmented.csv"))?;
    for name in ["dataset", "augmented"] {
        train_cmd(
            ctx,
            &path(&format!("{name}.csv")),
            &path(&format!("{name}.model.json")),
            &path(&format!("{name}.trace.csv")),
        )?;
        evaluate_cmd(
            ctx,
            &path(&format!("{name}.csv")),
            &path(&format!("{name}.model.json")),
            threshold,
            &path(&format!("{name}.eval.json")),
        )?;
    }
    compare_cmd(
        &path("dataset.eval.json"),
        &path("augmented.eval.json"),
        "Without Augmentation",
        "With Augmentation",
        &path("comparison.csv"),
    )?;
    eprintln!("pipeline: artifacts in {}", out_dir.display());
    Ok(())
}
