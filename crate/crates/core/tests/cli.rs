use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use frailfit::modelsel::read_comparison_csv;
use frailfit::pipeline::{self, chain_file, verify_manifest};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn frailfit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frailfit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = frailfit(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_is_deterministic_and_recorded() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let cfg = fixture("sim_small.toml");
    for dir in [&a, &b] {
        ok(&["simulate", "--config", s(&cfg), "--out", s(dir), "--quiet"]);
    }
    assert_eq!(read(&a, pipeline::DATA_FILE), read(&b, pipeline::DATA_FILE));
    verify_manifest(&a).unwrap();
    // the committed fixture was produced by this config
    assert_eq!(read(&a, pipeline::DATA_FILE), std::fs::read(fixture("sim_ig.csv")).unwrap());
}

#[test]
fn fit_diagnose_compare_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = fixture("fit_small.toml");
    let (ig, ig2, gl) = (tmp.path().join("ig"), tmp.path().join("ig2"), tmp.path().join("gl"));
    ok(&["fit", "--config", s(&cfg), "--out", s(&ig), "--quiet"]);
    ok(&["fit", "--config", s(&cfg), "--out", s(&ig2), "--quiet"]);
    ok(&["fit", "--config", s(&cfg), "--model", "gl-gw", "--out", s(&gl), "--quiet"]);

    for i in 0..2 {
        assert_eq!(read(&ig, &chain_file(i)), read(&ig2, &chain_file(i)));
    }
    assert_ne!(read(&ig, &chain_file(0)), read(&ig, &chain_file(1)));
    for dir in [&ig, &gl] {
        verify_manifest(dir).unwrap();
        for f in [pipeline::SUMMARY_FILE, pipeline::CRITERIA_FILE, pipeline::KS_FILE, pipeline::PLOT_FILE] {
            assert!(dir.join(f).is_file(), "missing {f}");
        }
    }

    let diag = tmp.path().join("diag");
    let chains: Vec<PathBuf> = (0..2).map(|i| ig.join(chain_file(i))).collect();
    ok(&["diagnose", "--config", s(&cfg), "--out", s(&diag), s(&chains[0]), s(&chains[1])]);
    assert_eq!(read(&diag, pipeline::SUMMARY_FILE), read(&ig, pipeline::SUMMARY_FILE));

    let cmp = tmp.path().join("cmp");
    let out = ok(&["compare", "--out", s(&cmp), s(&ig), s(&gl)]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("IG-GW") && text.contains("GL-GW"), "{text}");
    let rows = read_comparison_csv(read(&cmp, pipeline::COMPARISON_FILE).as_slice()).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!((rows[0].criteria.k, rows[1].criteria.k), (5, 6));
    assert!(rows.iter().all(|r| r.criteria.n == 60));
}

#[test]
fn seed_flag_changes_the_chain() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = fixture("fit_small.toml");
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    ok(&["fit", "--config", s(&cfg), "--out", s(&a), "--quiet"]);
    ok(&["fit", "--config", s(&cfg), "--seed", "6", "--out", s(&b), "--quiet"]);
    assert_ne!(read(&a, &chain_file(0)), read(&b, &chain_file(0)));
}

#[test]
fn tampered_output_fails_verification() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("sim");
    ok(&["simulate", "--config", s(&fixture("sim_small.toml")), "--out", s(&dir), "--quiet"]);
    let mut data = read(&dir, pipeline::DATA_FILE);
    data.push(b'\n');
    std::fs::write(dir.join(pipeline::DATA_FILE), data).unwrap();
    assert!(verify_manifest(&dir).is_err());
}

#[test]
fn dump_config_prints_resolved_json() {
    let out = ok(&["fit", "--config", s(&fixture("fit_small.toml")), "--iters", "900", "--dump-config"]);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["mcmc"]["iterations"], 900);
    assert_eq!(json["mcmc"]["seed"], 5);
}

#[test]
fn errors_exit_nonzero_with_a_kind() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.toml");
    std::fs::write(&bad, "[mcmc]\niterationz = 3\n").unwrap();
    let out = frailfit(&["fit", "--config", s(&bad), "--out", s(tmp.path())]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error[config]"));

    let out = frailfit(&["fit", "--out", s(tmp.path())]);
    assert!(!out.status.success(), "fit without data must fail");

    let out = frailfit(&["fit", "--config", s(&fixture("fit_small.toml")), "--burn-in", "500", "--out", s(tmp.path())]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("burn_in"));
}

#[test]
fn version_names_library() {
    let out = ok(&["--version"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("frailfit ") && text.contains("library"), "{text}");
}
