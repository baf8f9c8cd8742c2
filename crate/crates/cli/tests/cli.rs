//! End-to-end runs of the `pgeo` binary. Output formats are frozen by the files in
//! tests/golden; set PGEO_UPDATE_GOLDEN=1 to rewrite them after an intended change.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn pgeo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pgeo"))
        .args(args)
        .env_remove("PGEO_LMFDB_OFFLINE")
        .env_remove("RUST_LOG")
        .output()
        .unwrap()
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn fixture() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/lmfdb_fixture.json").display().to_string()
}

fn check_golden(name: &str, out: &Output) {
    assert_eq!(out.status.code(), Some(0), "{name}: {}", text(&out.stderr));
    let path = golden_dir().join(name);
    let got = text(&out.stdout);
    if std::env::var_os("PGEO_UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &got).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(got, want, "{name} drifted from its golden file");
}

const MULT_11: &[&str] = &["--signature", "1,1", "--convention", "multiplicative"];

fn args<'a>(head: &[&'a str], rest: &[&'a str]) -> Vec<&'a str> {
    head.iter().chain(rest).copied().collect()
}

#[test]
fn enumerate_csv_golden() {
    check_golden("enumerate_11_T30.csv", &pgeo(&args(&["enumerate"], &args(MULT_11, &["--box", "30"]))));
}

#[test]
fn enumerate_json_golden() {
    check_golden("enumerate_30_linear4.json", &pgeo(&["enumerate", "--signature", "3,0", "--convention", "linear", "--box", "4,4", "--format", "json"]));
}

#[test]
fn sweep_golden() {
    check_golden("sweep_11.csv", &pgeo(&args(&["theta-sweep"], &args(MULT_11, &["--box", "30", "--box", "100"]))));
    check_golden("sweep_30.json", &pgeo(&["theta-sweep", "--signature", "3,0", "--convention", "multiplicative", "--box", "10,10", "--box", "30,30", "--format", "json"]));
}

#[test]
fn one_box_row_carries_the_target() {
    let out = pgeo(&args(&["theta-sweep"], &args(MULT_11, &["--box", "50"])));
    let s = text(&out.stdout);
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines[0], "T_1,theta,ratio,target,skipped_mass");
    assert_eq!(lines.len(), 2);
    let target: f64 = lines[1].split(',').nth(3).unwrap().parse().unwrap();
    assert!((target - 2.0).abs() < 1e-12);
}

#[test]
fn psi_and_dirichlet_golden() {
    check_golden("psi_11.csv", &pgeo(&args(&["psi"], &args(MULT_11, &["--box", "30", "--box", "100"]))));
    check_golden("dirichlet_11.csv", &pgeo(&args(&["dirichlet"], &args(MULT_11, &["--box", "100", "--j", "1", "--eps", "0.5,0.3"]))));
}

#[test]
fn empty_box_gives_header_only_and_zeros() {
    let out = pgeo(&args(&["enumerate"], &args(MULT_11, &["--box", "1.5"])));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(text(&out.stdout), "charpoly,disc,alpha,multiplicity\n");
    let out = pgeo(&args(&["dirichlet"], &args(MULT_11, &["--box", "1.5", "--eps", "0.5"])));
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    assert_eq!(text(&out.stdout), "s_1,j,partial,rescaled,leading_term\n1.5,0,0,0,4\n");
}

#[test]
fn missing_convention_is_a_hard_error() {
    let out = pgeo(&["enumerate", "--signature", "1,1", "--box", "30"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("convention"));
    assert!(out.stdout.is_empty());
}

#[test]
fn divergent_point_is_refused() {
    let out = pgeo(&args(&["dirichlet"], &args(MULT_11, &["--box", "30", "--s", "1.0"])));
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("DivergenceWarning"));
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[sweep]\nsignature = [1, 1]\nconvention = \"linear\"\ngrid = [[3.0], [4.5]]\nshards = 2\n").unwrap();
    let c = cfg.to_str().unwrap();
    let from_file = pgeo(&["theta-sweep", "--config", c]);
    assert_eq!(from_file.status.code(), Some(0), "{}", text(&from_file.stderr));
    let s = text(&from_file.stdout);
    assert!(s.lines().nth(1).unwrap().starts_with("3,"));
    // same boxes read multiplicatively are much smaller
    let flipped = pgeo(&["theta-sweep", "--config", c, "--convention", "multiplicative"]);
    assert_ne!(text(&flipped.stdout), s);
    // flag grid replaces the file grid
    let one = pgeo(&["theta-sweep", "--config", c, "--box", "4.5"]);
    assert_eq!(text(&one.stdout).lines().count(), 2);
    assert_eq!(text(&one.stdout).lines().nth(1), s.lines().nth(2));

    std::fs::write(&cfg, "[sweep]\nsignature = [1, 1]\nconvention = \"sideways\"\n").unwrap();
    assert_eq!(pgeo(&["enumerate", "--config", c]).status.code(), Some(1));
    let missing = dir.path().join("nope.toml");
    assert_eq!(pgeo(&["enumerate", "--config", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn output_file_and_sequential_agree() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let a = pgeo(&args(&["theta-sweep"], &args(MULT_11, &["--box", "100", "-o", path.to_str().unwrap()])));
    assert_eq!(a.status.code(), Some(0));
    assert!(a.stdout.is_empty());
    let b = pgeo(&args(&["theta-sweep"], &args(MULT_11, &["--box", "100", "--sequential", "--shards", "3"])));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), text(&b.stdout));
}

#[test]
fn resumed_sweep_matches_cold_run() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("h.jsonl");
    let c = cache.to_str().unwrap();
    let cold = pgeo(&args(&["theta-sweep"], &args(MULT_11, &["--box", "100", "--box", "300"])));
    let first = pgeo(&args(&["theta-sweep"], &args(MULT_11, &["--box", "100", "--box", "300", "--cache", c])));
    let resumed = pgeo(&args(&["theta-sweep"], &args(MULT_11, &["--box", "100", "--box", "300", "--cache", c])));
    assert_eq!(resumed.status.code(), Some(0));
    assert_eq!(text(&cold.stdout), text(&first.stdout));
    assert_eq!(text(&cold.stdout), text(&resumed.stdout));
    // a cache made for another family is refused
    let other = pgeo(&["theta-sweep", "--signature", "3,0", "--convention", "multiplicative", "--box", "10,10", "--cache", c]);
    assert_eq!(other.status.code(), Some(2));
}

#[test]
fn crosscheck_against_fixture() {
    let fx = fixture();
    let out = pgeo(&args(&["crosscheck"], &args(MULT_11, &["--box", "1000", "--offline", "--lmfdb-cache", &fx, "--limit", "5"])));
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    check_golden("crosscheck_11.csv", &out);
}

#[test]
fn crosscheck_reports_injected_fault() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("fixture.json");
    let fx = std::fs::read_to_string(fixture()).unwrap();
    // regulator of 3.1.44.1 off by 1e-4
    let tampered = fx.replace("0.6093778634360062", "0.6094778634360062");
    assert_ne!(tampered, fx);
    std::fs::write(&bad, tampered).unwrap();
    let out = pgeo(&args(&["crosscheck"], &args(MULT_11, &["--box", "1000", "--offline", "--lmfdb-cache", bad.to_str().unwrap(), "--limit", "5"])));
    assert_eq!(out.status.code(), Some(1));
    let err = text(&out.stderr);
    assert!(err.contains("disc -44 (3.1.44.1)"), "{err}");
    assert_eq!(text(&out.stdout).matches("mismatch").count(), 1);
}

#[test]
fn crosscheck_offline_without_cache_explains() {
    let out = pgeo(&args(&["crosscheck"], &args(MULT_11, &["--box", "100", "--offline"])));
    assert_eq!(out.status.code(), Some(2));
    let err = text(&out.stderr);
    assert!(err.contains("NetworkUnavailable") && err.contains("--lmfdb-cache"), "{err}");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(pgeo(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(pgeo(&["--help"]).status.code(), Some(0));
    assert_eq!(pgeo(&args(&["psi"], &args(MULT_11, &["--box", "30,30"]))).status.code(), Some(1));
}
