//! CSV and JSON file formats.

use std::path::Path;

use anyhow::Context;
use grec_core::reuse::DataTable;
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Parses CSV text with a header row. Rows missing a numeric value are
/// dropped with a warning kept on the table.
pub fn parse_csv(text: &str) -> anyhow::Result<DataTable> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers()?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.with_context(|| format!("csv record {}", i + 1))?;
        rows.push(rec.iter().map(String::from).collect());
    }
    Ok(DataTable::from_records(header, rows)?)
}

pub fn to_csv(table: &DataTable) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(table.header())?;
    for r in 0..table.row_count {
        w.write_record(table.row(r))?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn read_csv(path: &Path) -> anyhow::Result<DataTable> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_csv(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}
