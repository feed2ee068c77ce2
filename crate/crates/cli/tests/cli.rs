use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn prs(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prs"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn fixtures() -> TempDir {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    fs::write(p.join("c3.txt"), "0 1\n1 2\n2 0\n").unwrap();
    fs::write(
        p.join("k4.txt"),
        "# complete graph\n10 11\n10 12\n10 13\n11 12\n11 13\n12 13\n",
    )
    .unwrap();
    fs::write(p.join("tree.txt"), "0 1\n1 2\n1 3\n").unwrap();
    fs::write(p.join("f.cnf"), "c chain\np cnf 3 2\n1 2 0\n2 3 0\n").unwrap();
    fs::write(p.join("bad.cnf"), "p cnf 2 1\n1 5 0\n").unwrap();
    let big: String = std::iter::once("p cnf 62 31\n".to_string())
        .chain((0..31).map(|i| format!("{} {} 0\n", 2 * i + 1, 2 * i + 2)))
        .collect();
    fs::write(p.join("big.cnf"), big).unwrap();
    fs::write(
        p.join("toy.json"),
        r#"{"variables":[{"id":0,"domain":4}],"events":[{"id":0,"vars":[0],"violating":[[0]]},{"id":1,"vars":[0],"violating":[[1]]}]}"#,
    )
    .unwrap();
    dir
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn cnf_samples_are_reproducible_and_satisfying() {
    let dir = fixtures();
    let args = [
        "sample",
        "--cnf",
        "f.cnf",
        "--sampler",
        "general",
        "--count",
        "10",
        "--seed",
        "7",
    ];
    let a = prs(&args, dir.path());
    let b = prs(&args, dir.path());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 12);
    assert!(lines[0].contains("seed 7"));
    for line in &lines[1..11] {
        let lits: Vec<i64> = line
            .split_whitespace()
            .map(|t| t.parse().unwrap())
            .collect();
        assert!(lits[0] > 0 || lits[1] > 0);
        assert!(lits[1] > 0 || lits[2] > 0);
    }
    let trailer: serde_json::Value = serde_json::from_str(lines[11]).unwrap();
    assert_eq!(trailer["stats"]["count"], 10);
    assert!(String::from_utf8_lossy(&a.stderr).contains("seed: 7"));
}

#[test]
fn spanning_tree_parent_lines_use_labels() {
    let dir = fixtures();
    let o = prs(
        &[
            "sample",
            "--graph",
            "k4.txt",
            "--app",
            "spanning-tree",
            "--root",
            "10",
            "--count",
            "20",
            "--seed",
            "3",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for line in text.lines().skip(1).take(20) {
        let parents: Vec<i64> = line
            .split_whitespace()
            .map(|t| t.parse().unwrap())
            .collect();
        assert_eq!(parents.len(), 4);
        assert_eq!(parents[0], -1);
        assert!(parents[1..].iter().all(|p| (10..=13).contains(p)));
    }
}

#[test]
fn sink_free_on_a_tree_hits_the_cap() {
    let dir = fixtures();
    let o = prs(
        &[
            "sample",
            "--graph",
            "tree.txt",
            "--app",
            "sink-free",
            "--round-cap",
            "1000",
            "--seed",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("round cap exceeded"));
}

#[test]
fn json_output_and_generic_sampler_on_graphs() {
    let dir = fixtures();
    let o = prs(
        &[
            "sample",
            "--graph",
            "c3.txt",
            "--app",
            "sink-free",
            "--sampler",
            "general",
            "--count",
            "4",
            "--format",
            "json",
            "--seed",
            "9",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["samples"].as_array().unwrap().len(), 4);
    assert_eq!(v["sampler"], "general_prs");
    let specialised = prs(
        &[
            "sample",
            "--graph",
            "c3.txt",
            "--app",
            "sink-free",
            "--count",
            "4",
            "--format",
            "json",
            "--seed",
            "9",
        ],
        dir.path(),
    );
    let w: serde_json::Value = serde_json::from_slice(&specialised.stdout).unwrap();
    assert_eq!(v["samples"], w["samples"]);
}

#[test]
fn output_file_is_written() {
    let dir = fixtures();
    let o = prs(
        &[
            "sample",
            "--instance",
            "toy.json",
            "--count",
            "3",
            "--seed",
            "1",
            "-o",
            "out.txt",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("out.txt")).unwrap();
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn analyze_reports_exact_values() {
    let dir = fixtures();
    let o = prs(
        &["analyze", "--graph", "c3.txt", "--app", "sink-free"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["shearer"]["expected_t"], "3");
    assert_eq!(v["extremal"], true);

    let o = prs(
        &["analyze", "--k", "20", "--d", "60", "--s", "10"],
        dir.path(),
    );
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["sharing"]["holds"], true);
    let o = prs(
        &["analyze", "--k", "20", "--d", "63", "--s", "10"],
        dir.path(),
    );
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["sharing"]["holds"], false);

    let o = prs(&["analyze", "--cnf", "f.cnf"], dir.path());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["cnf"]["num_clauses"], 2);
}

#[test]
fn input_errors_exit_one() {
    let dir = fixtures();
    let o = prs(&["analyze", "--cnf", "big.cnf"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("at most 30"));
    let o = prs(&["sample", "--cnf", "bad.cnf"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert_eq!(
        prs(&["sample", "--cnf", "missing.cnf"], dir.path())
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        prs(&["sample", "--cnf", "f.cnf", "--count", "0"], dir.path())
            .status
            .code(),
        Some(1)
    );
    assert_eq!(prs(&["frobnicate"], dir.path()).status.code(), Some(1));
    assert_eq!(
        prs(
            &["sample", "--cnf", "f.cnf", "--sampler", "specialised"],
            dir.path()
        )
        .status
        .code(),
        Some(1)
    );
    assert_eq!(prs(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn verify_uniformity_preset_passes() {
    let dir = fixtures();
    let o = prs(
        &[
            "verify",
            "uniformity",
            "--preset",
            "p5-hardcore",
            "--seed",
            "1",
            "--out-dir",
            "rep",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS uniformity/p5-hardcore"));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("rep/verify.json")).unwrap())
            .unwrap();
    assert_eq!(report["reports"]["uniformity/p5-hardcore"]["outcomes"], 13);
}

#[test]
fn negative_control_has_expected_failure_semantics() {
    let dir = fixtures();
    let o = prs(&["verify", "negative-control", "--seed", "1"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("expected to fail"));
}

#[test]
fn failed_verification_exits_three() {
    let dir = fixtures();
    // far too few samples for the TV threshold on 16 outcomes
    let o = prs(
        &[
            "verify",
            "uniformity",
            "--preset",
            "k4-tree",
            "--samples",
            "50",
            "--seed",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).starts_with("FAIL"));
}

#[test]
fn round_scaling_writes_csv() {
    let dir = fixtures();
    let o = prs(
        &[
            "experiment",
            "round-scaling",
            "--app",
            "hardcore",
            "--lambda",
            "0.1",
            "--trials",
            "10",
            "--sizes",
            "96,192",
            "--seed",
            "4",
            "--out-dir",
            "exp",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("m,n,trials,mean_rounds"));
    assert_eq!(text.lines().count(), 3);
    let trials = fs::read_to_string(dir.path().join("exp/round_scaling_trials.csv")).unwrap();
    assert_eq!(trials.lines().count(), 21);
    assert!(dir.path().join("exp/round_scaling.json").exists());
}

#[test]
fn disjoint_paths_rejects_bad_lengths() {
    let dir = fixtures();
    let o = prs(
        &[
            "experiment",
            "disjoint-paths",
            "--n",
            "10",
            "--len",
            "3",
            "--seed",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    let o = prs(
        &[
            "experiment",
            "disjoint-paths",
            "--n",
            "20",
            "--len",
            "5",
            "--trials",
            "3",
            "--seed",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 4);
}
