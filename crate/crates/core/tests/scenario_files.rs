//! The documents shipped under docs/scenarios/ stay in lockstep with the
//! builtin catalog: loading each file reproduces the corresponding builtin
//! exactly, and the extra dna-small document reproduces the Monte Carlo
//! soundness variant.

use std::fs;
use std::path::PathBuf;

use tailbound::scenarios::{dna_small_variant, load_scenario, scenario_to_json};

fn docs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/scenarios")
}

#[test]
fn shipped_documents_reproduce_builtins() {
    for scenario in tailbound::builtin_catalog() {
        let path = docs_dir().join(format!("{}.json", scenario.name));
        let text =
            fs::read_to_string(&path).unwrap_or_else(|e| panic!("missing {}: {e}", path.display()));
        let loaded = load_scenario(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(
            loaded,
            scenario,
            "{} drifted from the catalog",
            path.display()
        );
        assert!(loaded.regression_misses().unwrap().is_empty());
    }
}

#[test]
fn shipped_dna_small_document_matches_variant() {
    let path = docs_dir().join("dna-small.json");
    let text = fs::read_to_string(&path).unwrap();
    let loaded = load_scenario(&text).unwrap();
    assert_eq!(loaded, dna_small_variant());
}

/// Regenerates the shipped documents from the catalog. Run explicitly after
/// a deliberate catalog change:
///
/// ```text
/// cargo test -p tailbound --test scenario_files -- --ignored regenerate
/// ```
#[test]
#[ignore]
fn regenerate() {
    let dir = docs_dir();
    fs::create_dir_all(&dir).unwrap();
    for scenario in tailbound::builtin_catalog()
        .into_iter()
        .chain([dna_small_variant()])
    {
        let path = dir.join(format!("{}.json", scenario.name));
        fs::write(&path, scenario_to_json(&scenario)).unwrap();
        println!("wrote {}", path.display());
    }
}
