//! Deterministic synthetic consumption logs in the raw input schema.
//!
//! Each clean row models one visit to a generator site:
//! - `consumption_rate` (L/h) scales with generator capacity,
//! - `consumption_his` is the metered running time times that rate,
//! - `quantity_consumed_between_visits` is the tank draw-down, which matches
//!   `consumption_his` within ±5% for honest rows,
//! - `maximum_consumption_per_day` is the rate at 24 h/day.
//!
//! Anomalies come from two mechanisms: an inflated running-time meter
//! (running time per day above 24 h) and excess tank draw-down (daily
//! draw-down above the 24 h maximum). A small share of extra rows is
//! corrupted to exercise ingestion and cleaning.

use chrono::{Days, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::data::{Field, DATE_FORMAT};
use crate::error::{Error, Result};
use crate::io;
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnomalyMechanism {
    /// Running time per day above 24 h; tank draw-down honest.
    RunningTimeOnly,
    /// Tank draw-down above the daily maximum; running time honest.
    DrawDownOnly,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Defect {
    /// Empty running-time cell.
    MissingValue,
    /// Non-numeric consumption cell; rejected at load time.
    NonNumeric,
    /// Negative tank level.
    NegativeQuantity,
    /// Zero days in the period.
    ZeroDays,
}

/// Shares of each mechanism among anomalous rows; normalized on use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnomalyMix {
    pub running_time_only: f64,
    pub draw_down_only: f64,
    pub both: f64,
}

impl Default for AnomalyMix {
    fn default() -> Self {
        Self {
            running_time_only: 0.6,
            draw_down_only: 0.3,
            both: 0.1,
        }
    }
}

/// Value ranges the generator draws from. Uniform unless noted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthDistributions {
    /// Honest running hours per day.
    pub normal_hours_per_day: (f64, f64),
    /// Metered hours per day on inflated-meter rows.
    pub inflated_hours_per_day: (f64, f64),
    /// Inclusive range of days between visits.
    pub days: (u32, u32),
    /// Generator sizes in kVA, picked uniformly.
    pub capacity_tiers_kva: Vec<f64>,
    /// Liters per hour per kVA, times a uniform ±10% jitter.
    pub liters_per_hour_per_kva: f64,
    /// Relative mismatch between draw-down and metered consumption on honest rows.
    pub draw_down_noise: f64,
    /// Draw-down excess over the 24 h maximum on excess rows.
    pub excess_factor: (f64, f64),
    pub tank_left_liters: (f64, f64),
    pub power_types: Vec<String>,
}

impl Default for SynthDistributions {
    fn default() -> Self {
        Self {
            normal_hours_per_day: (6.0, 20.0),
            inflated_hours_per_day: (40.0, 56.0),
            days: (3, 14),
            capacity_tiers_kva: vec![10.0, 15.0, 20.0, 30.0, 40.0],
            liters_per_hour_per_kva: 0.2,
            draw_down_noise: 0.05,
            excess_factor: (2.5, 4.0),
            tank_left_liters: (50.0, 800.0),
            power_types: vec!["Generator".into(), "Hybrid Solar".into(), "Grid + Generator".into()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    /// Rows that survive cleaning.
    pub record_count: usize,
    pub anomaly_rate: f64,
    /// Share of defective rows in the emitted file.
    pub defect_rate: f64,
    pub site_count: usize,
    pub start_date: NaiveDate,
    pub end_date: NaiveDate,
    pub mix: AnomalyMix,
    pub distributions: SynthDistributions,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            record_count: 5905,
            anomaly_rate: 0.3512,
            defect_rate: 105.0 / 6010.0,
            site_count: 120,
            start_date: NaiveDate::from_ymd_opt(2017, 9, 1).expect("valid date"),
            end_date: NaiveDate::from_ymd_opt(2018, 8, 31).expect("valid date"),
            mix: AnomalyMix::default(),
            distributions: SynthDistributions::default(),
            seed: 42,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.record_count == 0 {
            return fail("record_count must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.anomaly_rate) {
            return fail(format!("anomaly_rate {} outside [0, 1]", self.anomaly_rate));
        }
        if !(0.0..1.0).contains(&self.defect_rate) {
            return fail(format!("defect_rate {} outside [0, 1)", self.defect_rate));
        }
        if self.site_count == 0 {
            return fail("site_count must be at least 1".into());
        }
        if self.end_date < self.start_date {
            return fail("end_date precedes start_date".into());
        }
        let m = &self.mix;
        if [m.running_time_only, m.draw_down_only, m.both].iter().any(|&v| v < 0.0)
            || m.running_time_only + m.draw_down_only + m.both <= 0.0
        {
            return fail("anomaly mix shares must be non-negative with a positive sum".into());
        }
        let d = &self.distributions;
        if d.days.0 == 0 || d.days.1 < d.days.0 {
            return fail(format!("days range {:?} must satisfy 1 <= lo <= hi", d.days));
        }
        if d.normal_hours_per_day.1 > 24.0 || d.normal_hours_per_day.0 < 0.0 {
            return fail("normal hours per day must lie within [0, 24]".into());
        }
        if d.inflated_hours_per_day.0 <= 24.0 {
            return fail("inflated hours per day must exceed 24".into());
        }
        if d.normal_hours_per_day.1 * (1.0 + d.draw_down_noise) >= 24.0 {
            return fail("honest draw-down could exceed the 24 h maximum; lower hours or noise".into());
        }
        if d.excess_factor.0 <= 1.0 {
            return fail("excess factor must exceed 1".into());
        }
        if d.capacity_tiers_kva.is_empty() || d.capacity_tiers_kva.iter().any(|&c| c <= 0.0) {
            return fail("capacity tiers must be positive and non-empty".into());
        }
        if d.power_types.is_empty() {
            return fail("at least one power type is required".into());
        }
        Ok(())
    }

    pub fn defect_count(&self) -> usize {
        (self.record_count as f64 * self.defect_rate / (1.0 - self.defect_rate)).round() as usize
    }

    pub fn anomaly_count(&self) -> usize {
        (self.record_count as f64 * self.anomaly_rate).round() as usize
    }
}

/// Ground truth for one emitted data row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowTruth {
    /// 1-based line in the emitted CSV.
    pub line: u64,
    pub anomaly: Option<AnomalyMechanism>,
    pub defect: Option<Defect>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthCounts {
    pub emitted_rows: usize,
    pub defect_rows: usize,
    pub clean_rows: usize,
    pub anomalies: usize,
    pub running_time_only: usize,
    pub draw_down_only: usize,
    pub both: usize,
}

/// Companion metadata describing how a file was generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthMetadata {
    pub config: SynthConfig,
    pub config_fingerprint: String,
    pub synth_fingerprint: String,
    pub counts: SynthCounts,
}

#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub csv: Vec<u8>,
    pub truth: Vec<RowTruth>,
    pub metadata: SynthMetadata,
}

struct Row {
    site: String,
    date: NaiveDate,
    power_type: String,
    capacity: f64,
    running_time: f64,
    consumption_his: f64,
    days: u32,
    draw_down: f64,
    tank_left: f64,
    max_per_day: f64,
    rate: f64,
}

fn mechanism_counts(anomalies: usize, mix: &AnomalyMix) -> (usize, usize, usize) {
    let total = mix.running_time_only + mix.draw_down_only + mix.both;
    let r1 = (anomalies as f64 * mix.running_time_only / total).round() as usize;
    let both = ((anomalies as f64 * mix.both / total).round() as usize).min(anomalies - r1.min(anomalies));
    let r1 = r1.min(anomalies);
    (r1, anomalies - r1 - both, both)
}

fn draw_row(config: &SynthConfig, rng: &mut Rng, mechanism: Option<AnomalyMechanism>, date: NaiveDate) -> Row {
    let d = &config.distributions;
    let site = format!("S{:04}", rng.below(config.site_count) + 1);
    let power_type = d.power_types[rng.below(d.power_types.len())].clone();
    let capacity = d.capacity_tiers_kva[rng.below(d.capacity_tiers_kva.len())];
    let rate = capacity * d.liters_per_hour_per_kva * rng.uniform_in(0.9, 1.1);
    let days = d.days.0 + rng.below((d.days.1 - d.days.0 + 1) as usize) as u32;
    let honest_hours = rng.uniform_in(d.normal_hours_per_day.0, d.normal_hours_per_day.1);
    let inflated = matches!(mechanism, Some(AnomalyMechanism::RunningTimeOnly | AnomalyMechanism::Both));
    let excess = matches!(mechanism, Some(AnomalyMechanism::DrawDownOnly | AnomalyMechanism::Both));
    let metered_hours = if inflated {
        rng.uniform_in(d.inflated_hours_per_day.0, d.inflated_hours_per_day.1)
    } else {
        honest_hours
    };
    let noise = rng.uniform_in(1.0 - d.draw_down_noise, 1.0 + d.draw_down_noise);
    let excess_factor = rng.uniform_in(d.excess_factor.0, d.excess_factor.1);
    let tank_left = rng.uniform_in(d.tank_left_liters.0, d.tank_left_liters.1);

    let days_f = f64::from(days);
    let running_time = metered_hours * days_f;
    let max_per_day = rate * 24.0;
    let draw_down = if excess {
        max_per_day * days_f * excess_factor
    } else {
        rate * honest_hours * days_f * noise
    };
    Row {
        site,
        date,
        power_type,
        capacity,
        running_time,
        consumption_his: rate * running_time,
        days,
        draw_down,
        tank_left,
        max_per_day,
        rate,
    }
}

fn cells(row: &Row, defect: Option<Defect>) -> Vec<String> {
    let f = |v: f64| format!("{v:.2}");
    let mut out = vec![
        row.site.clone(),
        row.date.format(DATE_FORMAT).to_string(),
        row.power_type.clone(),
        f(row.capacity),
        f(row.running_time),
        f(row.consumption_his),
        row.days.to_string(),
        f(row.draw_down),
        f(row.tank_left),
        f(row.max_per_day),
        f(row.rate),
    ];
    match defect {
        None => {}
        Some(Defect::MissingValue) => out[4].clear(),
        Some(Defect::NonNumeric) => out[5] = "n/a".into(),
        Some(Defect::NegativeQuantity) => out[8] = format!("-{}", out[8]),
        Some(Defect::ZeroDays) => out[6] = "0".into(),
    }
    out
}

/// Generates a raw CSV plus per-row ground truth. The file opens with a `#`
/// preamble carrying `run_fingerprint` and the generator config fingerprint.
pub fn generate(config: &SynthConfig, run_fingerprint: &str) -> Result<SynthOutput> {
    config.validate()?;
    let mut rng = Rng::new(config.seed);
    let clean = config.record_count;
    let defects = config.defect_count();
    let total = clean + defects;

    let anomalies = config.anomaly_count();
    let (r1, r2, both) = mechanism_counts(anomalies, &config.mix);
    let mut mechanisms: Vec<Option<AnomalyMechanism>> = Vec::with_capacity(clean);
    mechanisms.extend(std::iter::repeat(Some(AnomalyMechanism::RunningTimeOnly)).take(r1));
    mechanisms.extend(std::iter::repeat(Some(AnomalyMechanism::DrawDownOnly)).take(r2));
    mechanisms.extend(std::iter::repeat(Some(AnomalyMechanism::Both)).take(both));
    mechanisms.resize(clean, None);
    rng.shuffle(&mut mechanisms);

    let mut is_defect = vec![false; total];
    is_defect[..defects].iter_mut().for_each(|d| *d = true);
    rng.shuffle(&mut is_defect);

    let span = (config.end_date - config.start_date).num_days() as u64 + 1;
    let synth_fingerprint = crate::config::fingerprint(config);
    let preamble = [("config_fingerprint", run_fingerprint), ("synth_fingerprint", synth_fingerprint.as_str())];
    let mut writer = io::commented_csv_writer(Vec::new(), &preamble)?;
    writer.write_record(Field::ALL.iter().map(|f| f.default_header()))?;

    let kinds = [Defect::MissingValue, Defect::NonNumeric, Defect::NegativeQuantity, Defect::ZeroDays];
    let mut truth = Vec::with_capacity(total);
    let mut next_clean = 0;
    let mut next_defect = 0;
    for (i, &defective) in is_defect.iter().enumerate() {
        let date = config.start_date + Days::new(i as u64 * span / total as u64);
        let (mechanism, defect) = if defective {
            let kind = kinds[next_defect % kinds.len()];
            next_defect += 1;
            (None, Some(kind))
        } else {
            let m = mechanisms[next_clean];
            next_clean += 1;
            (m, None)
        };
        let row = draw_row(config, &mut rng, mechanism, date);
        writer.write_record(cells(&row, defect))?;
        truth.push(RowTruth {
            line: (preamble.len() + i + 2) as u64,
            anomaly: mechanism,
            defect,
        });
    }
    let csv = writer
        .into_inner()
        .map_err(|e| Error::io("synthetic csv", std::io::Error::other(e.to_string())))?;

    Ok(SynthOutput {
        csv,
        truth,
        metadata: SynthMetadata {
            config: config.clone(),
            config_fingerprint: run_fingerprint.to_string(),
            synth_fingerprint,
            counts: SynthCounts {
                emitted_rows: total,
                defect_rows: defects,
                clean_rows: clean,
                anomalies,
                running_time_only: r1,
                draw_down_only: r2,
                both,
            },
        },
    })
}

/// Writes the CSV and a `<path>.meta.json` companion. Returns the companion path.
pub fn write(output: &SynthOutput, path: &std::path::Path) -> Result<std::path::PathBuf> {
    use std::io::Write;
    let mut w = io::create(path)?;
    w.write_all(&output.csv).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))?;
    let meta_path = metadata_path(path);
    io::write_json(&meta_path, &output.metadata)?;
    Ok(meta_path)
}

pub fn metadata_path(path: &std::path::Path) -> std::path::PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".meta.json");
    path.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_counts() {
        let c = SynthConfig::default();
        assert_eq!(c.defect_count(), 105);
        assert_eq!(c.anomaly_count(), 2074);
        let (r1, r2, both) = mechanism_counts(2074, &c.mix);
        assert_eq!(r1 + r2 + both, 2074);
        assert_eq!(both, 207);
    }

    #[test]
    fn deterministic_bytes() {
        let c = SynthConfig {
            record_count: 300,
            ..SynthConfig::default()
        };
        assert_eq!(generate(&c, "fp").unwrap().csv, generate(&c, "fp").unwrap().csv);
        let other = SynthConfig { seed: 7, ..c.clone() };
        assert_ne!(generate(&c, "fp").unwrap().csv, generate(&other, "fp").unwrap().csv);
    }

    #[test]
    fn invalid_configs() {
        assert!(SynthConfig { anomaly_rate: 1.5, ..Default::default() }.validate().is_err());
        assert!(SynthConfig { record_count: 0, ..Default::default() }.validate().is_err());
        let mut c = SynthConfig::default();
        c.distributions.normal_hours_per_day = (6.0, 23.5);
        assert!(c.validate().is_err());
    }
}
