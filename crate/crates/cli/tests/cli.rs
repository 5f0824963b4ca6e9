//! End-to-end tests of the `cts` binary: exit codes, report shape and
//! determinism, CSV output.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cts_core::report::Report;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cts"))
}

struct TempDir(PathBuf);

impl TempDir {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!(
            "cts-cli-{tag}-{}-{}",
            std::process::id(),
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .unwrap()
                .as_nanos()
        ));
        std::fs::create_dir_all(&dir).unwrap();
        TempDir(dir)
    }

    fn file(&self, name: &str, contents: &str) -> PathBuf {
        let path = self.0.join(name);
        std::fs::write(&path, contents).unwrap();
        path
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }
}

impl Drop for TempDir {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn f2t4_group(dir: &TempDir) -> PathBuf {
    dir.file("group.json", r#"{"kind":"f2t","t":4}"#)
}

fn conlon_triples(dir: &TempDir) -> PathBuf {
    // all 3-subsets of the Sidon set {1, 2, 4, 8, 15}
    let s = [1usize, 2, 4, 8, 15];
    let mut triples = Vec::new();
    for i in 0..5 {
        for j in i + 1..5 {
            for k in j + 1..5 {
                triples.push(vec![s[i], s[j], s[k]]);
            }
        }
    }
    dir.file(
        "triples.json",
        &serde_json::json!({ "triples": triples }).to_string(),
    )
}

fn parse_report(out: &Output) -> Report {
    Report::from_json(&String::from_utf8_lossy(&out.stdout)).expect("report parses")
}

fn run(args: &[&str], paths: &[(&str, &Path)]) -> Output {
    let mut cmd = bin();
    for a in args.iter() {
        cmd.arg(a);
    }
    for (flag, p) in paths {
        cmd.arg(flag).arg(p);
    }
    cmd.output().expect("binary runs")
}

#[test]
fn check_passes_on_valid_structure() {
    let dir = TempDir::new("check-ok");
    let group = f2t4_group(&dir);
    let triples = conlon_triples(&dir);
    let out = run(
        &["check", "--deterministic"],
        &[("--group", &group), ("--triples", &triples)],
    );
    assert_eq!(out.status.code(), Some(0));
    let report = parse_report(&out);
    assert!(report.pass);
    assert_eq!(report.schema_version, "1");
    let sizes = report.sizes.expect("sizes");
    assert_eq!(sizes.hyper_triples, 160);
    assert_eq!(sizes.skeleton_edges, 80);
    assert!(report.timestamp.is_none());
}

#[test]
fn check_fails_on_non_sidon_with_witness() {
    let dir = TempDir::new("check-bad");
    let group = f2t4_group(&dir);
    let s = [1usize, 2, 5, 6];
    let mut triples = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            for k in j + 1..4 {
                triples.push(vec![s[i], s[j], s[k]]);
            }
        }
    }
    let bad = dir.file(
        "nonsidon.json",
        &serde_json::json!({ "triples": triples }).to_string(),
    );
    let out = run(
        &["check", "--deterministic"],
        &[("--group", &group), ("--triples", &bad)],
    );
    assert_eq!(out.status.code(), Some(1));
    let report = parse_report(&out);
    assert!(!report.pass);
    let conditions = report.conditions.unwrap();
    assert!(!conditions.b.is_pass());
    assert!(conditions.b.witness().is_some());
}

#[test]
fn malformed_inputs_exit_2() {
    let dir = TempDir::new("malformed");
    let group = f2t4_group(&dir);
    let garbage = dir.file("garbage.json", "{ not json");
    let out = run(
        &["check", "--deterministic"],
        &[("--group", &group), ("--triples", &garbage)],
    );
    assert_eq!(out.status.code(), Some(2));

    let missing = dir.path("missing.json");
    let out = run(
        &["check", "--deterministic"],
        &[("--group", &group), ("--triples", &missing)],
    );
    assert_eq!(out.status.code(), Some(2));

    // unknown flag: usage error
    let out = bin().arg("--definitely-not-a-flag").output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    // walk without a graph source
    let out = bin().args(["walk", "--steps", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn certify_emits_full_bound_table_and_is_deterministic() {
    let dir = TempDir::new("certify");
    let group = f2t4_group(&dir);
    let triples = conlon_triples(&dir);
    let out1 = run(
        &["certify", "--deterministic"],
        &[("--group", &group), ("--triples", &triples)],
    );
    assert_eq!(out1.status.code(), Some(0));
    let report = parse_report(&out1);
    assert!(report.pass);
    assert_eq!(report.bounds.len(), 4);
    assert!(report.bounds.iter().all(|b| b.pass));
    let lemmas = report.lemmas.as_ref().unwrap();
    assert!(lemmas.two_centers_pass && lemmas.lift_pass && lemmas.dual_construction_pass);
    let spectral = report.spectral.as_ref().unwrap();
    assert!(spectral.lambda_walk > 0.0 && spectral.lambda_walk < 1.0);

    // byte-identical on a second run
    let out2 = run(
        &["certify", "--deterministic"],
        &[("--group", &group), ("--triples", &triples)],
    );
    assert_eq!(out1.stdout, out2.stdout);

    // --out writes the same document to a file
    let out_path = dir.path("report.json");
    let out3 = run(
        &["certify", "--deterministic"],
        &[
            ("--group", &group),
            ("--triples", &triples),
            ("--out", &out_path),
        ],
    );
    assert_eq!(out3.status.code(), Some(0));
    let from_file = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(from_file.as_bytes(), &out1.stdout[..out1.stdout.len() - 1]);
}

#[test]
fn certify_with_corrupted_blue_exits_1_with_witness() {
    let dir = TempDir::new("corrupt");
    let group = f2t4_group(&dir);
    let triples = conlon_triples(&dir);
    let out = run(
        &["certify", "--corrupt-blue", "--deterministic"],
        &[("--group", &group), ("--triples", &triples)],
    );
    assert_eq!(out.status.code(), Some(1));
    let report = parse_report(&out);
    assert!(!report.pass);
    let lemmas = report.lemmas.unwrap();
    assert!(!lemmas.lift_pass);
    assert!(lemmas.lift_witness.is_some());
}

#[test]
fn conlon_command_reports_pipeline_extras() {
    let out = bin()
        .args([
            "conlon",
            "--t",
            "4",
            "--size",
            "5",
            "--seed",
            "42",
            "--deterministic",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = parse_report(&out);
    assert_eq!(report.seed, Some(42));
    let conlon = report.conlon.unwrap();
    assert!(conlon.identity_pass && conlon.alpha_bound_pass && conlon.pre_bound_pass);
    assert!((conlon.lambda_base - 0.6).abs() < 1e-9);
    assert!(conlon.closed_form_rate > 0.8 && conlon.closed_form_rate < 1.0);

    // sampling infeasible by pigeonhole
    let out = bin()
        .args(["conlon", "--t", "2", "--size", "4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("pigeonhole"));
}

#[test]
fn three_product_command_on_small_spec() {
    let dir = TempDir::new("threeprod");
    let spec = dir.file(
        "spec.json",
        &serde_json::json!({
            "factors": [
                {"group": {"kind": "cyclic", "n": 3}, "gens": [1, 2]},
                {"group": {"kind": "cyclic", "n": 3}, "gens": [1, 2]},
                {"group": {"kind": "cyclic", "n": 3}, "gens": [1, 2]}
            ]
        })
        .to_string(),
    );
    let out = run(&["three-product", "--deterministic"], &[("--spec", &spec)]);
    assert_eq!(out.status.code(), Some(0));
    let report = parse_report(&out);
    assert!(report.pass);
    let three = report.three_product.unwrap();
    assert!(three.tensor_identity_pass && three.local_iso_pass);
    assert!((three.lambda_local - 0.5).abs() < 1e-9);

    // mismatched factor orders are a configuration error
    let bad = dir.file(
        "bad.json",
        &serde_json::json!({
            "factors": [
                {"group": {"kind": "cyclic", "n": 3}, "gens": [1, 2]},
                {"group": {"kind": "cyclic", "n": 3}, "gens": [1, 2]},
                {"group": {"kind": "cyclic", "n": 4}, "gens": [1, 3]}
            ]
        })
        .to_string(),
    );
    let out = run(&["three-product", "--deterministic"], &[("--spec", &bad)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn walk_exact_and_monte_carlo_csv() {
    let dir = TempDir::new("walk");
    let group = f2t4_group(&dir);
    let triples = conlon_triples(&dir);

    // exact mode to stdout
    let out = run(
        &["walk", "--steps", "5", "--trials", "0", "--seed", "1"],
        &[("--group", &group), ("--triples", &triples)],
    );
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("step,tv,trials,seed"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "0");
    let tv0: f64 = first[1].parse().unwrap();
    assert!((tv0 - (1.0 - 1.0 / 80.0)).abs() < 1e-12);
    assert_eq!(text.lines().count(), 7);

    // Monte Carlo to a file; thread count does not change the bytes
    let csv1 = dir.path("mc1.csv");
    let csv2 = dir.path("mc2.csv");
    let out = run(
        &[
            "walk", "--steps", "10", "--trials", "5000", "--seed", "9", "--threads", "1",
        ],
        &[("--group", &group), ("--triples", &triples), ("--csv", &csv1)],
    );
    assert_eq!(out.status.code(), Some(0));
    let out = run(
        &[
            "walk", "--steps", "10", "--trials", "5000", "--seed", "9", "--threads", "3",
        ],
        &[("--group", &group), ("--triples", &triples), ("--csv", &csv2)],
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        std::fs::read(&csv1).unwrap(),
        std::fs::read(&csv2).unwrap()
    );
}

#[test]
fn walk_accepts_edge_list_graphs() {
    let dir = TempDir::new("walk-graph");
    // a 6-cycle in the documented edge-list format
    let graph = dir.file("cycle.txt", "6 6\n0 1\n0 5\n1 2\n2 3\n3 4\n4 5\n");
    let out = run(
        &["walk", "--steps", "4", "--trials", "0"],
        &[("--graph", &graph)],
    );
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().count(), 6);
    // bad start vertex is an input error
    let out = run(
        &["walk", "--steps", "4", "--trials", "0", "--start", "77"],
        &[("--graph", &graph)],
    );
    assert_eq!(out.status.code(), Some(2));
}
