//! Typed in-memory data table.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::TableError;
use crate::fieldtype::{infer_field_type, parse_number, FieldType};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Column {
    pub name: String,
    pub field_type: FieldType,
    pub values: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DataTable {
    pub columns: Vec<Column>,
    pub row_count: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

fn is_missing(v: &str) -> bool {
    matches!(v.trim(), "" | "NaN" | "nan" | "NA" | "N/A" | "null")
}

impl DataTable {
    pub fn new(columns: Vec<Column>) -> Result<DataTable, TableError> {
        if columns.is_empty() {
            return Err(TableError::NoColumns);
        }
        let mut seen = BTreeSet::new();
        for c in &columns {
            if !seen.insert(c.name.as_str()) {
                return Err(TableError::DuplicateColumn(c.name.clone()));
            }
        }
        let row_count = columns[0].values.len();
        for c in &columns {
            if c.values.len() != row_count {
                return Err(TableError::Ragged {
                    row: c.values.len(),
                    expected: row_count,
                    found: c.values.len(),
                });
            }
        }
        Ok(DataTable {
            columns,
            row_count,
            warnings: Vec::new(),
        })
    }

    /// Builds a table from a header and string records, inferring column
    /// types. Rows with a missing value in a numeric column are dropped.
    pub fn from_records(
        header: Vec<String>,
        rows: Vec<Vec<String>>,
    ) -> Result<DataTable, TableError> {
        if header.is_empty() {
            return Err(TableError::NoColumns);
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != header.len() {
                return Err(TableError::Ragged {
                    row: i + 1,
                    expected: header.len(),
                    found: r.len(),
                });
            }
        }
        let types: Vec<FieldType> = (0..header.len())
            .map(|c| {
                let present: Vec<&str> = rows
                    .iter()
                    .map(|r| r[c].trim())
                    .filter(|v| !is_missing(v))
                    .collect();
                if present.is_empty() {
                    FieldType::Categorical
                } else {
                    infer_field_type(&present)
                }
            })
            .collect();
        let mut warnings = Vec::new();
        let mut kept: Vec<&Vec<String>> = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            let bad = (0..header.len())
                .find(|&c| types[c] == FieldType::Quantitative && is_missing(&r[c]));
            match bad {
                Some(c) => warnings.push(format!(
                    "row {} dropped: missing value in numeric column {:?}",
                    i + 1,
                    header[c]
                )),
                None => kept.push(r),
            }
        }
        let columns = header
            .into_iter()
            .enumerate()
            .map(|(c, name)| Column {
                name: String::from(name.trim()),
                field_type: types[c],
                values: kept.iter().map(|r| String::from(r[c].trim())).collect(),
            })
            .collect();
        let mut t = DataTable::new(columns)?;
        t.warnings = warnings;
        Ok(t)
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn value(&self, column: &str, row: usize) -> Option<&str> {
        self.column(column)?.values.get(row).map(String::as_str)
    }

    pub fn number(&self, column: &str, row: usize) -> Option<f64> {
        parse_number(self.value(column, row)?)
    }

    /// Distinct values of `column` over `rows`, in first-appearance order.
    pub fn distinct(&self, column: &str, rows: &[usize]) -> Vec<String> {
        let Some(c) = self.column(column) else {
            return Vec::new();
        };
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &r in rows {
            let v = &c.values[r];
            if seen.insert(v.as_str()) {
                out.push(v.clone());
            }
        }
        out
    }

    /// Whether every value of `fine` occurs with a single value of `coarse`.
    pub fn refines(&self, fine: &str, coarse: &str) -> bool {
        let (Some(f), Some(c)) = (self.column(fine), self.column(coarse)) else {
            return false;
        };
        let mut seen: BTreeMap<&str, &str> = BTreeMap::new();
        f.values
            .iter()
            .zip(&c.values)
            .all(|(a, b)| *seen.entry(a.as_str()).or_insert(b.as_str()) == b.as_str())
    }

    pub fn header(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn row(&self, r: usize) -> Vec<&str> {
        self.columns.iter().map(|c| c.values[r].as_str()).collect()
    }

    pub fn count_by_type(&self) -> (usize, usize) {
        let cat = self
            .columns
            .iter()
            .filter(|c| c.field_type.is_discrete())
            .count();
        (cat, self.columns.len() - cat)
    }
}
