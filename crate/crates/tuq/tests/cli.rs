use std::path::Path;
use std::process::{Command, Output};

use tuq::io::read_moments;
use tuq::report::CsvTable;

fn tuq(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tuq")).args(args).current_dir(cwd).output().unwrap()
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

const SINGULAR: &str = r#"
name = "singular"
horizon = 1.0
[system]
kind = "cr3bp"
[reference]
kind = "state"
state = [-0.012150585609624, 0.0, 0.0, 0.0, 0.0, 0.0]
[belief]
covariance = { kind = "diagonal", sigmas = [1e-3, 1e-3, 1e-3, 1e-3, 1e-3, 1e-3] }
[[methods]]
method = "ut"
"#;

#[test]
fn exit_codes_follow_error_kind() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("bad.toml"), "name = \"x\"\nhorizon = -1.0\n").unwrap();
    std::fs::write(d.join("singular.toml"), SINGULAR).unwrap();

    let out = tuq(&["run", "bad.toml"], d);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    let out = tuq(&["run", "missing.toml"], d);
    assert_eq!(out.status.code(), Some(4));
    let out = tuq(&["run", "singular.toml", "--out-dir", "o"], d);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ut"));
    let out = tuq(&["run", &data("mini_cr3bp.toml"), "--seed", &u64::MAX.to_string()], d);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_then_contour_from_moments() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = tuq(&["run", &data("mini_cr3bp.toml"), "--out-dir", "o", "--samples", "150"], d);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("[errors]"));
    for f in ["timing", "moments", "errors", "coverage"] {
        assert!(d.join(format!("o/mini_cr3bp_{f}.csv")).exists(), "{f}");
    }
    assert!(d.join("o/mini_cr3bp_report.txt").exists());
    let samples = CsvTable::parse(&std::fs::read_to_string(d.join("o/mini_cr3bp_samples.csv")).unwrap()).unwrap();
    assert_eq!(samples.rows.len(), 150);

    let moments = d.join("o/mini_cr3bp_cut4-da_moments.json");
    assert!(read_moments(&moments).unwrap().fourth.is_some());
    let out = tuq(
        &[
            "contour",
            moments.to_str().unwrap(),
            "--slice",
            "0,1",
            "--points",
            "90",
            "--out-dir",
            "c",
            "--coverage-of",
            "o/mini_cr3bp_samples.csv",
        ],
        d,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("coverage"));
    let curve = CsvTable::parse(&std::fs::read_to_string(d.join("c/cut4-da_banana.csv")).unwrap()).unwrap();
    assert_eq!(curve.header, ["t", "x", "y"]);
    assert!(curve.rows.len() >= 90);

    let lincov = d.join("o/mini_cr3bp_lincov-direct_moments.json");
    let out = tuq(&["contour", lincov.to_str().unwrap(), "--out-dir", "c"], d);
    assert_eq!(out.status.code(), Some(2));
    let out = tuq(&["contour", lincov.to_str().unwrap(), "--kind", "ellipse", "--out-dir", "c"], d);
    assert!(out.status.success());
    assert!(d.join("c/lincov-direct_ellipse.csv").exists());
}

#[test]
fn map_and_bench_write_their_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = tuq(&["map", &data("mini_cr3bp.toml"), "--kind", "dda", "--out-dir", "o"], d);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let map = tuq::io::read_map(&d.join("o/mini_cr3bp_dda_map.txt")).unwrap();
    assert!(map.max_nonconstant_terms() <= 8);
    assert!(d.join("o/mini_cr3bp_reference.csv").exists());

    let out = tuq(&["bench", &data("mini_cr3bp.toml"), "--counts", "20,40", "--out-dir", "o"], d);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let t = CsvTable::parse(&std::fs::read_to_string(d.join("o/mini_cr3bp_bench.csv")).unwrap()).unwrap();
    assert_eq!(t.column_f64("samples").unwrap(), vec![20.0, 40.0]);
    assert!(t.comments[0].contains("threads=1"));
}
