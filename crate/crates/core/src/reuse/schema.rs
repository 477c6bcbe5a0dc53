//! Data schema requirements, sample data and compatibility checks.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::plan::{fill_level, group_levels};
use super::table::{Column, DataTable};
use crate::decoration::LegendKind;
use crate::fieldtype::{infer_field_type, FieldType};
use crate::grec::GrecTemplate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DataSchema {
    pub c_group: usize,
    pub c_encode: usize,
    pub q_encode: usize,
    pub min_categorical: usize,
    pub min_quantitative: usize,
}

/// Counts grouping levels and encoded channels. Derived group-level sizes
/// aggregate a leaf field and need no column of their own.
pub fn infer_schema(t: &GrecTemplate) -> DataSchema {
    let own = || t.encodings.iter().filter(|e| !e.derived);
    let c_group = t.c_group();
    let c_encode = own().filter(|e| e.field_type.is_discrete()).count();
    let q_encode = own()
        .filter(|e| e.field_type == FieldType::Quantitative)
        .count();
    DataSchema {
        c_group,
        c_encode,
        q_encode,
        min_categorical: c_group.max(c_encode),
        min_quantitative: q_encode,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CompatibilityReport {
    pub ok: bool,
    pub missing_categorical: usize,
    pub missing_quantitative: usize,
    pub warnings: Vec<String>,
    pub dismissible: bool,
}

pub fn check_compatibility(schema: &DataSchema, table: &DataTable) -> CompatibilityReport {
    let (cat, quant) = table.count_by_type();
    let missing_categorical = schema.min_categorical.saturating_sub(cat);
    let missing_quantitative = schema.min_quantitative.saturating_sub(quant);
    let mut warnings = Vec::new();
    if missing_categorical > 0 {
        warnings.push(format!(
            "template needs at least {} categorical or date fields, dataset has {}",
            schema.min_categorical, cat
        ));
    }
    if missing_quantitative > 0 {
        warnings.push(format!(
            "template needs at least {} quantitative fields, dataset has {}",
            schema.min_quantitative, quant
        ));
    }
    CompatibilityReport {
        ok: missing_categorical == 0 && missing_quantitative == 0,
        missing_categorical,
        missing_quantitative,
        warnings,
        dismissible: true,
    }
}

fn distinct(labels: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut seen = BTreeSet::new();
    labels
        .into_iter()
        .filter(|l| seen.insert(l.clone()))
        .collect()
}

/// Children per instance at each grouping level, read from the example.
fn level_counts(t: &GrecTemplate, depth: usize) -> usize {
    t.root
        .nodes_at(depth)
        .iter()
        .map(|n| n.children.len())
        .max()
        .unwrap_or(1)
        .max(1)
}

/// One column per required field. Categorical values come from axis tiers
/// and legend entries when their counts fit a grouping level; rows are the
/// cross product of the categorical columns with one random draw per
/// quantitative column.
pub fn generate_sample_data(schema: &DataSchema, t: &GrecTemplate, seed: u64) -> DataTable {
    let deco = &t.decoration;
    let mut sources: Vec<(String, Vec<String>)> = Vec::new();
    for (axis, name) in [(&deco.x_axis, "X"), (&deco.y_axis, "Y")] {
        if let Some(a) = axis {
            for (i, tier) in a
                .tiers
                .iter()
                .enumerate()
                .rev()
                .filter(|(_, t)| t.field_type.is_discrete())
            {
                let labels = distinct(tier.texts().into_iter().map(ToString::to_string));
                if !labels.is_empty() {
                    sources.push((format!("{name}{}", i + 1), labels));
                }
            }
        }
    }
    let legend = (deco.legend.kind == LegendKind::Discrete)
        .then(|| distinct(deco.legend.entries.iter().map(|e| e.label.clone())));
    let levels = group_levels(t);
    let colored = fill_level(t);
    let mut used = BTreeSet::new();
    let mut cat_cols: Vec<(String, Vec<String>)> = Vec::new();
    let mut legend_used = false;
    for (i, &(depth, _)) in levels.iter().enumerate() {
        let n = level_counts(t, depth);
        let name_of = |i: usize| format!("Category{}", i + 1);
        let from_legend = legend
            .as_ref()
            .filter(|l| colored == Some(depth) && !l.is_empty());
        if let Some(l) = from_legend {
            cat_cols.push((String::from("Color"), l.clone()));
            legend_used = true;
            continue;
        }
        let pick = sources
            .iter()
            .position(|(key, l)| !used.contains(key) && l.len() == n);
        match pick {
            Some(k) => {
                used.insert(sources[k].0.clone());
                cat_cols.push((name_of(i), sources[k].1.clone()));
            }
            None => {
                let letter = (b'A' + (i % 26) as u8) as char;
                cat_cols.push((
                    name_of(i),
                    (1..=n).map(|k| format!("{letter}{k}")).collect(),
                ));
            }
        }
    }
    while cat_cols.len() < schema.min_categorical {
        let i = cat_cols.len();
        let values = match &legend {
            Some(l) if !legend_used && !l.is_empty() => {
                legend_used = true;
                l.clone()
            }
            _ => (1..=3)
                .map(|k| format!("{}{k}", (b'A' + (i % 26) as u8) as char))
                .collect(),
        };
        cat_cols.push((format!("Category{}", i + 1), values));
    }
    if cat_cols.is_empty() {
        cat_cols.push((String::from("Index"), alloc::vec![String::from("1")]));
    }
    let rows: usize = cat_cols.iter().map(|(_, v)| v.len().max(1)).product();
    let mut columns: Vec<Column> = Vec::new();
    let mut stride = rows;
    for (name, values) in &cat_cols {
        stride /= values.len().max(1);
        let col: Vec<String> = (0..rows)
            .map(|r| values[(r / stride) % values.len()].clone())
            .collect();
        let field_type = match infer_field_type(&col) {
            FieldType::Quantitative => FieldType::Categorical,
            ft => ft,
        };
        columns.push(Column {
            name: name.clone(),
            field_type,
            values: col,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for q in 0..schema.min_quantitative {
        let values = (0..rows)
            .map(|_| format!("{:.1}", rng.random_range(0.0..100.0)))
            .collect();
        let name = if q == 0 {
            String::from("Value")
        } else {
            format!("Value{}", q + 1)
        };
        columns.push(Column {
            name,
            field_type: FieldType::Quantitative,
            values,
        });
    }
    DataTable::new(columns).unwrap_or_default()
}
