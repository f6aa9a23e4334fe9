//! Shared file helpers: CSV files with a `# key: value` comment preamble and
//! pretty-printed JSON.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

/// Floats are written in shortest round-trip form, so no precision is lost.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

pub fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

/// Writes `# key: value` lines, then hands back a CSV writer on the same sink.
pub fn commented_csv_writer<W: Write>(mut writer: W, meta: &[(&str, &str)]) -> Result<csv::Writer<W>> {
    for (key, value) in meta {
        writeln!(writer, "# {key}: {value}").map_err(|e| Error::io("csv preamble", e))?;
    }
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(writer))
}

pub fn csv_reader<R: std::io::Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(reader)
}

/// Leading `# key: value` comment lines of a file.
pub fn read_preamble(path: &Path) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for line in open(path)?.lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let Some(rest) = line.strip_prefix('#') else { break };
        if let Some((k, v)) = rest.split_once(':') {
            out.push((k.trim().to_string(), v.trim().to_string()));
        }
    }
    Ok(out)
}

pub fn preamble_value(preamble: &[(String, String)], key: &str) -> Option<String> {
    preamble.iter().find(|(k, _)| k == key).map(|(_, v)| v.clone())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_reader(open(path)?)?)
}
