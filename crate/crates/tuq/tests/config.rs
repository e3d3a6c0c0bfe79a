use std::path::PathBuf;

use proptest::prelude::*;
use tuq::config::{
    CovarianceConfig, MethodConfig, PropagatorKind, ReferenceConfig, ScenarioConfig, SystemConfig,
};
use tuq::TuqError;

fn scenario_files() -> Vec<PathBuf> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let mut files: Vec<PathBuf> = [root.join("../../scenarios"), root.join("tests/data")]
        .iter()
        .flat_map(|d| std::fs::read_dir(d).unwrap().map(|e| e.unwrap().path()))
        .filter(|p| p.extension().is_some_and(|e| e == "toml"))
        .collect();
    files.sort();
    files
}

#[test]
fn shipped_scenarios_round_trip() {
    let files = scenario_files();
    assert!(files.len() >= 10);
    for f in files {
        let cfg = ScenarioConfig::load(&f).unwrap_or_else(|e| panic!("{}: {e}", f.display()));
        let text = cfg.to_toml_string().unwrap();
        assert_eq!(ScenarioConfig::from_toml_str(&text).unwrap(), cfg, "{}", f.display());
    }
}

#[test]
fn case7_is_steeper() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let cfg = ScenarioConfig::load(&root.join("aerocapture_case7.toml")).unwrap();
    assert_eq!(cfg.reference, ReferenceConfig::Aerocapture { v_inf: 2.5, efpa_deg: -4.87, t_pre: 208.0 });
    assert_eq!(cfg.horizon, 657.0);
}

const MINIMAL: &str = r#"
name = "m"
horizon = 1.0
[system]
kind = "cr3bp"
[reference]
kind = "state"
state = [1.1, 0.0, 0.0, 0.0, 0.2, 0.0]
[belief]
covariance = { kind = "diagonal", sigmas = [1e-3, 1e-3, 1e-3, 1e-3, 1e-3, 1e-3] }
"#;

#[test]
fn unknown_keys_are_rejected_everywhere() {
    assert!(ScenarioConfig::from_toml_str(MINIMAL).is_ok());
    let cases = [
        format!("colour = 1\n{MINIMAL}"),
        MINIMAL.replace("kind = \"cr3bp\"", "kind = \"cr3bp\"\nmass = 1.0"),
        MINIMAL.replace("kind = \"state\"", "kind = \"state\"\nepoch = 0.0"),
        MINIMAL.replace("sigmas =", "scale = 1.0, sigmas ="),
        format!("{MINIMAL}\n[[methods]]\nmethod = \"ut\"\nlambda = 1.0\n"),
        format!("{MINIMAL}\n[[methods]]\nmethod = \"bootstrap\"\n"),
        format!("{MINIMAL}\n[output]\ndir = \"x\"\nzip = true\n"),
    ];
    for c in cases {
        assert!(matches!(ScenarioConfig::from_toml_str(&c), Err(TuqError::Config(_))), "{c}");
    }
}

#[test]
fn semantic_errors_are_config_errors() {
    let cases = [
        MINIMAL.replace("horizon = 1.0", "horizon = 0.0"),
        MINIMAL.replace("[1.1, 0.0, 0.0, 0.0, 0.2, 0.0]", "[1.1, 0.0, 0.0, 0.2]"),
        format!("reference_method = \"ut-da\"\n{MINIMAL}"),
        format!("{MINIMAL}\n[[methods]]\nmethod = \"mc\"\nsamples = 1\n"),
        format!("{MINIMAL}\n[[methods]]\nmethod = \"gmm\"\ndelta = 1.5\n"),
        format!("{MINIMAL}\n[[methods]]\nmethod = \"ut\"\n[contour]\nslice = [0, 0]\ntruth = \"ut-direct\"\n"),
    ];
    for c in cases {
        let err = ScenarioConfig::from_toml_str(&c).unwrap_err();
        assert_eq!(err.exit_code(), 2, "{c}");
    }
}

#[test]
fn overrides_apply_and_revalidate() {
    let mut cfg = ScenarioConfig::from_toml_str(&format!("{MINIMAL}\n[[methods]]\nmethod = \"mc\"\n")).unwrap();
    cfg.apply_overrides(Some(9), Some(std::path::Path::new("elsewhere")), Some(50)).unwrap();
    assert_eq!(cfg.seed, 9);
    assert_eq!(cfg.output.dir, PathBuf::from("elsewhere"));
    assert_eq!(cfg.methods[0], MethodConfig::Mc { propagator: PropagatorKind::Direct, samples: 50 });
    assert!(cfg.apply_overrides(None, None, Some(1)).is_err());
    assert!(cfg.apply_overrides(Some(u64::MAX), None, Some(50)).is_err());
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e12..1e12f64, -1e-12..1e-12f64, prop::num::f64::NORMAL]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn floats_survive_the_text_form(
        state in prop::collection::vec(finite(), 6),
        sigmas in prop::collection::vec(1e-9..1.0f64, 6),
        horizon in 1e-6..1e3f64,
        mu in 1e-6..0.49f64,
        alpha in 1e-6..2.0f64,
        seed in 0..=i64::MAX as u64,
    ) {
        let mut cfg = ScenarioConfig::from_toml_str(MINIMAL).unwrap();
        cfg.seed = seed;
        cfg.horizon = horizon;
        cfg.system = SystemConfig::Cr3bp { mu };
        cfg.reference = ReferenceConfig::State { state };
        cfg.belief.covariance = CovarianceConfig::Diagonal { sigmas };
        cfg.methods.push(MethodConfig::Ut { propagator: PropagatorKind::Dda, alpha, beta: 2.0, kappa: 0.0 });
        let text = cfg.to_toml_string().unwrap();
        prop_assert_eq!(ScenarioConfig::from_toml_str(&text).unwrap(), cfg);
    }
}
