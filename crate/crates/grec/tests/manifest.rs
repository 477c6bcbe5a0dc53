use std::path::PathBuf;

use grec::corpus::{default_specs, manifest, ManifestEntry};
use grec_core::render::generate_synthetic_chart;

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

#[test]
fn checked_in_corpus_matches_the_generator() {
    let dir = corpus_dir();
    let text = std::fs::read_to_string(dir.join("manifest.json")).expect("corpus/manifest.json");
    let stored: Vec<ManifestEntry> = serde_json::from_str(&text).unwrap();
    let specs = default_specs();
    assert_eq!(stored, manifest(&specs), "regenerate with `grec corpus generate`");
    for (entry, spec) in stored.iter().zip(&specs) {
        let svg = std::fs::read_to_string(dir.join(&entry.file)).unwrap();
        assert_eq!(svg, generate_synthetic_chart(spec).svg, "{}", entry.file);
    }
}
