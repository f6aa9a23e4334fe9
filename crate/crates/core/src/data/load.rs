//! Raw consumption-log ingestion. Bad rows are reported, never fatal.

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::record::{Field, RawRecord};
use crate::error::{Error, Result};
use crate::io;

pub const DATE_FORMAT: &str = "%Y-%m-%d";

/// Maps each field to its header text. Matching ignores case, spaces and
/// punctuation, so `"Running Time"` also matches `running_time`.
#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    headers: Vec<(Field, String)>,
}

impl Default for Schema {
    fn default() -> Self {
        Self {
            headers: Field::ALL.iter().map(|&f| (f, f.default_header().to_string())).collect(),
        }
    }
}

impl Schema {
    pub fn with_header(mut self, field: Field, header: impl Into<String>) -> Self {
        let header = header.into();
        for entry in &mut self.headers {
            if entry.0 == field {
                entry.1 = header.clone();
            }
        }
        self
    }

    pub fn headers(&self) -> impl Iterator<Item = &str> {
        self.headers.iter().map(|(_, h)| h.as_str())
    }

    fn resolve(&self, header_row: &csv::StringRecord) -> Result<HashMap<Field, usize>> {
        let positions: HashMap<String, usize> = header_row
            .iter()
            .enumerate()
            .map(|(i, h)| (normalize_header(h), i))
            .collect();
        let mut out = HashMap::new();
        let mut missing = Vec::new();
        for (field, header) in &self.headers {
            match positions.get(&normalize_header(header)) {
                Some(&i) => {
                    out.insert(*field, i);
                }
                None if field.is_mandatory() => missing.push(header.clone()),
                None => {}
            }
        }
        if !missing.is_empty() {
            return Err(Error::Schema(format!("missing mandatory column(s): {}", missing.join(", "))));
        }
        Ok(out)
    }
}

fn normalize_header(h: &str) -> String {
    h.chars().filter(|c| c.is_alphanumeric()).flat_map(char::to_lowercase).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LoadReport {
    pub records: Vec<RawRecord>,
    pub rejections: Vec<Rejection>,
}

pub fn load_csv(path: &Path, schema: &Schema) -> Result<LoadReport> {
    load_csv_from_reader(io::open(path)?, schema)
}

pub fn load_csv_from_reader<R: Read>(reader: R, schema: &Schema) -> Result<LoadReport> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    let columns = schema.resolve(&header)?;
    let mut report = LoadReport::default();
    for result in rdr.records() {
        let row = match result {
            Ok(row) => row,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                report.rejections.push(Rejection {
                    line,
                    reason: format!("unreadable row: {e}"),
                });
                continue;
            }
        };
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != header.len() {
            report.rejections.push(Rejection {
                line,
                reason: format!("expected {} cells, found {}", header.len(), row.len()),
            });
            continue;
        }
        match parse_row(&row, &columns, line) {
            Ok(record) => report.records.push(record),
            Err(reason) => report.rejections.push(Rejection { line, reason }),
        }
    }
    Ok(report)
}

fn parse_row(row: &csv::StringRecord, columns: &HashMap<Field, usize>, line: u64) -> std::result::Result<RawRecord, String> {
    let cell = |field: Field| columns.get(&field).and_then(|&i| row.get(i)).map(str::trim).filter(|s| !s.is_empty());
    let mut record = RawRecord {
        line,
        site_id: cell(Field::SiteId).map(str::to_string),
        power_type: cell(Field::PowerType).map(str::to_string),
        ..RawRecord::default()
    };
    if let Some(text) = cell(Field::VisitDate) {
        record.visit_date = Some(
            NaiveDate::parse_from_str(text, DATE_FORMAT)
                .map_err(|_| format!("{}: '{text}' is not a {DATE_FORMAT} date", Field::VisitDate.default_header()))?,
        );
    }
    for field in Field::ALL.into_iter().filter(|f| f.is_numeric()) {
        if let Some(text) = cell(field) {
            let value: f64 = text
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| format!("{}: '{text}' is not a number", field.default_header()))?;
            *record.numeric_mut(field).expect("numeric field") = Some(value);
        }
    }
    Ok(record)
}

/// Rejection report as CSV with columns `line,reason`.
pub fn write_rejections(path: &Path, rejections: &[Rejection], fingerprint: &str) -> Result<()> {
    let mut w = io::commented_csv_writer(io::create(path)?, &[("config_fingerprint", fingerprint)])?;
    w.write_record(["line", "reason"])?;
    for r in rejections {
        w.write_record([r.line.to_string(), r.reason.clone()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
