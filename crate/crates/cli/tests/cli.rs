use std::path::Path;
use std::process::{Command, Output};

fn jrlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jrlab"))
        .args(args)
        .output()
        .expect("failed to spawn jrlab")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is not valid JSON")
}

fn gen_to(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name);
    let path_str = path.to_str().unwrap().to_string();
    let mut full: Vec<&str> = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", &path_str]);
    let out = jrlab(&full);
    assert!(out.status.success(), "gen failed: {}", String::from_utf8_lossy(&out.stderr));
    path_str
}

#[test]
fn gen_example1_then_brute_solve_matches_known_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let file = gen_to(dir.path(), "ex1.json", &["--model", "example1", "--param", "2"]);
    let doc: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&file).unwrap()).unwrap();
    assert_eq!(doc["num_voters"], 4);
    assert_eq!(doc["k"], 4);

    let truth: serde_json::Value =
        serde_json::from_slice(&std::fs::read(format!("{file}.truth.json")).unwrap()).unwrap();
    assert_eq!(truth["sw_opt"], 8);
    assert_eq!(truth["sw_jr"], 6);

    let out = jrlab(&[
        "solve", "--election", &file, "--objective", "sw", "--constraint", "jr", "--method",
        "brute",
    ]);
    let val = stdout_json(&out);
    assert_eq!(val["value"], 6);
    assert_eq!(val["optimal"], true);
    assert_eq!(val["committee"].as_array().unwrap().len(), 4);
}

#[test]
fn gen_is_deterministic_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--model", "ic", "--n", "20", "--m", "20", "--k", "4", "--param", "0.25",
        "--seed", "7"];
    let a = gen_to(dir.path(), "a.json", &args);
    let b = gen_to(dir.path(), "b.json", &args);
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn gen_rejects_out_of_range_probability_with_usage_exit() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let out = jrlab(&[
        "gen", "--model", "ic", "--n", "5", "--m", "5", "--k", "2", "--param", "1.5", "--seed",
        "1", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_reports_jr_violation_with_singleton_witness() {
    let dir = tempfile::tempdir().unwrap();
    let file = gen_to(dir.path(), "ex1.json", &["--model", "example1", "--param", "2"]);
    // The first four candidates are the block jointly approved by the two
    // heavy voters; picking all of them leaves two singleton voters uncovered.
    let out = jrlab(&["check", "--axiom", "jr", "--election", &file, "--committee", "0,1,2,3"]);
    let val = stdout_json(&out);
    assert_eq!(val["satisfied"], false);
    assert_eq!(val["witness"]["level"], 1);
    assert_eq!(val["witness"]["candidates"].as_array().unwrap().len(), 1);
}

#[test]
fn check_accepts_ejr_committee_on_shared_pair_family() {
    let dir = tempfile::tempdir().unwrap();
    let file = gen_to(dir.path(), "ex2.json", &["--model", "example2", "--param", "2"]);
    let out = jrlab(&["check", "--axiom", "ejr", "--election", &file, "--committee", "0,1,2,3"]);
    let val = stdout_json(&out);
    assert_eq!(val["satisfied"], true);
    assert!(val.get("witness").is_none());
}

#[test]
fn check_rejects_malformed_committee_with_usage_exit() {
    let dir = tempfile::tempdir().unwrap();
    let file = gen_to(dir.path(), "ex1.json", &["--model", "example1", "--param", "2"]);
    let out = jrlab(&["check", "--axiom", "jr", "--election", &file, "--committee", "0,x"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_rejects_wrong_committee_size_with_domain_exit() {
    let dir = tempfile::tempdir().unwrap();
    let file = gen_to(dir.path(), "ex1.json", &["--model", "example1", "--param", "2"]);
    let out = jrlab(&["check", "--axiom", "jr", "--election", &file, "--committee", "0,1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn nk_approx_refuses_unequal_voter_and_committee_counts() {
    let dir = tempfile::tempdir().unwrap();
    let file = gen_to(
        dir.path(),
        "ic.json",
        &["--model", "ic", "--n", "20", "--m", "20", "--k", "4", "--param", "0.25", "--seed", "7"],
    );
    let out = jrlab(&["solve", "--election", &file, "--method", "nk-approx"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn vcr_dp_agrees_with_brute_force_on_generated_geometry() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..5u64 {
        let file = gen_to(
            dir.path(),
            &format!("e1_{seed}.json"),
            &["--model", "euclid1d", "--n", "8", "--m", "8", "--k", "3", "--param", "0.3",
                "--seed", &seed.to_string()],
        );
        let dp = stdout_json(&jrlab(&["solve", "--election", &file, "--method", "vcr-dp"]));
        let brute = stdout_json(&jrlab(&[
            "solve", "--election", &file, "--objective", "sw", "--constraint", "jr", "--method",
            "brute",
        ]));
        assert_eq!(dp["value"], brute["value"], "seed {seed}");
        assert_eq!(dp["optimal"], true);
    }
}

#[test]
fn vcr_dp_without_geometry_is_a_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = gen_to(dir.path(), "ex1.json", &["--model", "example1", "--param", "2"]);
    let out = jrlab(&["solve", "--election", &file, "--method", "vcr-dp"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn solve_respects_budget_override() {
    let dir = tempfile::tempdir().unwrap();
    let file = gen_to(
        dir.path(),
        "ic.json",
        &["--model", "ic", "--n", "10", "--m", "12", "--k", "5", "--param", "0.3", "--seed", "3"],
    );
    let out = Command::new(env!("CARGO_BIN_EXE_jrlab"))
        .args(["solve", "--election", &file, "--method", "brute"])
        .env("JRLAB_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn experiment_is_deterministic_and_jr_curve_is_dominated() {
    let dir = tempfile::tempdir().unwrap();
    let run = |tag: &str, jr: bool| -> Vec<String> {
        let out_dir = dir.path().join(tag);
        let mut args = vec![
            "experiment", "--curve", "f", "--model", "ic", "--n", "6", "--m", "6", "--k", "2",
            "--param", "0.4", "--alphas", "0:1:0.25", "--instances", "3", "--seed", "11", "--out",
        ];
        let out_str = out_dir.to_str().unwrap().to_string();
        args.push(Box::leak(out_str.into_boxed_str()));
        if jr {
            args.push("--require-jr");
        }
        let out = jrlab(&args);
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
        String::from_utf8(out.stdout).unwrap().lines().map(String::from).collect()
    };
    let free_a = run("a", false);
    let free_b = run("b", false);
    assert_eq!(free_a, free_b);
    let jr = run("c", true);
    assert_eq!(jr.len(), free_a.len());
    for (row_jr, row_free) in jr.iter().zip(&free_a).skip(1) {
        let mean = |row: &str| row.split(',').nth(7).unwrap().to_string();
        assert!(mean(row_jr) <= mean(row_free), "jr {row_jr} vs free {row_free}");
    }
    assert!(dir.path().join("a/f_ic_free.csv").exists());
    assert!(dir.path().join("a/f_ic_free.manifest.json").exists());
    assert!(dir.path().join("c/f_ic_jr.csv").exists());
}

#[test]
fn experiment_rejects_zero_alpha_step() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("z");
    let out = jrlab(&[
        "experiment", "--curve", "f", "--model", "ic", "--n", "4", "--m", "4", "--k", "2",
        "--param", "0.5", "--alphas", "0:1:0", "--instances", "1", "--seed", "1", "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}
