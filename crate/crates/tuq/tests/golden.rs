//! Frozen report tables for the two small scenarios. Set `TUQ_BLESS=1` to rewrite them.

use std::path::{Path, PathBuf};

use tuq::config::ScenarioConfig;
use tuq::report;
use tuq::study::run_scenario;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests")
}

fn check(path: &Path, actual: &str) {
    if std::env::var_os("TUQ_BLESS").is_some() {
        std::fs::write(path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("{}: {e}; run with TUQ_BLESS=1 to create it", path.display()));
    if expected != actual {
        let diff = expected
            .lines()
            .zip(actual.lines())
            .find(|(a, b)| a != b)
            .map_or_else(|| "line count differs".to_string(), |(a, b)| format!("expected `{a}`, got `{b}`"));
        panic!("{} does not match: {diff}", path.display());
    }
}

fn golden(scenario: &str) {
    let cfg = ScenarioConfig::load(&root().join("data").join(format!("{scenario}.toml"))).unwrap();
    let r = run_scenario(&cfg).unwrap();
    for (name, table) in [
        ("moments", report::moments_table(&r)),
        ("errors", report::errors_table(&r)),
        ("coverage", report::coverage_table(&r)),
    ] {
        check(&root().join("golden").join(format!("{scenario}_{name}.csv")), &table.to_csv());
    }
}

#[test]
fn mini_cr3bp_tables() {
    golden("mini_cr3bp");
}

#[test]
fn mini_aerocapture_tables() {
    golden("mini_aerocapture");
}
