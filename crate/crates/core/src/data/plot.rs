use std::io::Write;
use std::str::FromStr;

use super::dataset::ProcessedDataset;
use super::record::RUNNING_TIME_PER_DAY;
use super::load::DATE_FORMAT;
use crate::error::{Error, Result};
use crate::io;

/// Reference line drawn on running-time plots.
pub const DAILY_HOURS_REFERENCE: f64 = 24.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    ScatterRunningTime,
    TimeSeriesRunningTime,
}

impl FromStr for PlotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scatter-running-time" => Ok(PlotKind::ScatterRunningTime),
            "time-series-running-time" => Ok(PlotKind::TimeSeriesRunningTime),
            other => Err(Error::Argument(format!(
                "unknown plot kind '{other}' (expected scatter-running-time or time-series-running-time)"
            ))),
        }
    }
}

/// Writes running-time-per-day plot data: one row per dataset row with its
/// label and a constant 24-hour reference column. Time-series output is
/// ordered by visit date (stable on ties).
pub fn export_plot_data<W: Write>(dataset: &ProcessedDataset, kind: PlotKind, writer: W, fingerprint: &str) -> Result<()> {
    let col = dataset
        .feature_index("running_time_per_day")
        .unwrap_or(RUNNING_TIME_PER_DAY);
    let mut w = io::commented_csv_writer(writer, &[("config_fingerprint", fingerprint)])?;
    let reference = io::fmt_f64(DAILY_HOURS_REFERENCE);
    match kind {
        PlotKind::ScatterRunningTime => {
            w.write_record(["index", "running_time_per_day", "label", "reference_hours"])?;
            for i in 0..dataset.len() {
                w.write_record([
                    i.to_string(),
                    io::fmt_f64(dataset.features.get(i, col)),
                    dataset.labels[i].as_u8().to_string(),
                    reference.clone(),
                ])?;
            }
        }
        PlotKind::TimeSeriesRunningTime => {
            w.write_record(["visit_date", "site_id", "running_time_per_day", "label", "reference_hours"])?;
            let mut order: Vec<usize> = (0..dataset.len()).collect();
            order.sort_by_key(|&i| dataset.origins[i].visit_date);
            for i in order {
                let o = &dataset.origins[i];
                w.write_record([
                    o.visit_date.format(DATE_FORMAT).to_string(),
                    o.site_id.clone(),
                    io::fmt_f64(dataset.features.get(i, col)),
                    dataset.labels[i].as_u8().to_string(),
                    reference.clone(),
                ])?;
            }
        }
    }
    w.flush().map_err(|e| Error::io("plot data", e))
}
