//! Synthetic corpus manifest and scoring.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use grec_core::render::{
    check_round_trip, corpus_specs, generate_synthetic_chart, mutation_specs, ChartSpec, CorrectionRecipe,
    GeneratedChart,
};
use grec_core::decoration::DecorationSummary;
use grec_core::grec::TemplateSummary;
use grec_core::Config;
use serde::{Deserialize, Serialize};

use crate::io::{read_json, write_json};

/// Seeds of the checked-in round-trip corpus.
pub const CORPUS_SEEDS: [u64; 2] = [1, 2];
pub const MUTATION_SEED: u64 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ManifestEntry {
    pub id: String,
    pub file: String,
    pub spec: ChartSpec,
    pub expected: TemplateSummary,
    pub expected_decoration: DecorationSummary,
    pub c_group: usize,
    pub rect_count: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub corrections: Vec<CorrectionRecipe>,
}

impl ManifestEntry {
    fn of(chart: &GeneratedChart) -> Self {
        let id = chart.spec.id();
        ManifestEntry {
            file: format!("{id}.svg"),
            id,
            spec: chart.spec.clone(),
            expected: chart.expected.clone(),
            expected_decoration: chart.expected_decoration.clone(),
            c_group: chart.c_group,
            rect_count: chart.rect_count,
            corrections: chart.corrections.clone(),
        }
    }

    fn chart(&self, svg: String) -> GeneratedChart {
        GeneratedChart {
            spec: self.spec.clone(),
            svg,
            expected: self.expected.clone(),
            expected_decoration: self.expected_decoration.clone(),
            c_group: self.c_group,
            rect_count: self.rect_count,
            corrections: self.corrections.clone(),
        }
    }
}

/// The round-trip corpus followed by one chart per decoration mutation.
pub fn default_specs() -> Vec<ChartSpec> {
    let mut v = corpus_specs(&CORPUS_SEEDS);
    v.extend(mutation_specs(MUTATION_SEED));
    v
}

pub fn manifest(specs: &[ChartSpec]) -> Vec<ManifestEntry> {
    specs.iter().map(|s| ManifestEntry::of(&generate_synthetic_chart(s))).collect()
}

/// Writes every chart and `manifest.json` into `dir`.
pub fn generate(dir: &Path, specs: &[ChartSpec]) -> anyhow::Result<Vec<ManifestEntry>> {
    std::fs::create_dir_all(dir)?;
    let mut entries = Vec::new();
    for s in specs {
        let chart = generate_synthetic_chart(s);
        let e = ManifestEntry::of(&chart);
        std::fs::write(dir.join(&e.file), &chart.svg)?;
        entries.push(e);
    }
    write_json(&dir.join("manifest.json"), &entries)?;
    Ok(entries)
}

/// Reads the charts listed in `dir/manifest.json`.
pub fn load(dir: &Path) -> anyhow::Result<Vec<GeneratedChart>> {
    let entries: Vec<ManifestEntry> = read_json(&dir.join("manifest.json"))?;
    entries.iter().map(|e| Ok(e.chart(std::fs::read_to_string(dir.join(&e.file))?))).collect()
}

#[derive(Clone, Debug, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ScoreReport {
    pub total: usize,
    pub passed: usize,
    pub accuracy: f64,
    /// Archetype name → (passed, total), plain corpus charts only.
    pub by_archetype: BTreeMap<String, (usize, usize)>,
    /// Mutation charts that round-trip once corrected.
    pub corrections_passed: usize,
    pub corrections_total: usize,
    pub failures: Vec<(String, String)>,
    pub elapsed_ms: u128,
}

/// Scores plain charts as detected and mutated charts after their
/// corrections.
pub fn score(charts: &[GeneratedChart], cfg: &Config) -> ScoreReport {
    let start = Instant::now();
    let mut r = ScoreReport::default();
    for c in charts {
        let mutated = c.spec.mutation.is_some();
        let result = check_round_trip(c, mutated, cfg);
        if let Err(e) = &result {
            r.failures.push((c.spec.id(), e.clone()));
        }
        if mutated {
            r.corrections_total += 1;
            r.corrections_passed += result.is_ok() as usize;
            continue;
        }
        r.total += 1;
        r.passed += result.is_ok() as usize;
        let slot = r.by_archetype.entry(c.spec.archetype.name().to_string()).or_default();
        slot.0 += result.is_ok() as usize;
        slot.1 += 1;
    }
    r.accuracy = if r.total == 0 { 0.0 } else { r.passed as f64 / r.total as f64 };
    r.elapsed_ms = start.elapsed().as_millis();
    r
}

pub fn format_table(r: &ScoreReport) -> String {
    let mut s = format!("{:<18} {:>6} {:>6}\n", "archetype", "pass", "total");
    for (name, (p, t)) in &r.by_archetype {
        s += &format!("{name:<18} {p:>6} {t:>6}\n");
    }
    s += &format!(
        "{:<18} {:>6} {:>6}  ({:.2}%)\ncorrections        {:>6} {:>6}\nelapsed {} ms\n",
        "all",
        r.passed,
        r.total,
        100.0 * r.accuracy,
        r.corrections_passed,
        r.corrections_total,
        r.elapsed_ms
    );
    for (id, why) in &r.failures {
        s += &format!("FAIL {id}: {why}\n");
    }
    s
}
