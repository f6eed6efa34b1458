use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn netcomp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netcomp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn encode_reports_depth_and_split_rows() {
    let out = netcomp(&["encode", "--set", "2,3,7"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["z"], 12);
    assert_eq!(v["s"], 3);
    assert_eq!(v["n_pj"], 9);
    assert_eq!(v["split_rows"], serde_json::json!([1, 3, 6]));
    assert_eq!(v["rows"].as_array().unwrap().len(), 12);
    assert_eq!(v["rows"][0]["kind"], "split");
    assert_eq!(v["rows"][1]["kind"], "pass");

    let out = netcomp(&["encode", "--set", "1"]);
    assert_eq!(json(&out)["z"], 1);
}

#[test]
fn invalid_input_exits_one() {
    let out = netcomp(&["encode", "--set", "0,3"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("elements must be positive"));

    for args in [
        &["encode", "--set", "-4,3"][..],
        &["encode", "--set", "x"],
        &["encode"],
        &["bogus-command"],
        &[
            "simulate", "--set", "5,6,7", "--ppj", "1.5", "--agents", "10", "--seed", "1",
        ],
        &[
            "simulate", "--set", "5,6,7", "--psj", "0", "--agents", "10", "--seed", "1",
        ],
        &["simulate", "--set", "5,6,7", "--agents", "0", "--seed", "1"],
        &["plan", "--set", "5,6,7", "--ell", "-1"],
    ] {
        assert_eq!(code(&netcomp(args)), 1, "{args:?}");
    }
}

#[test]
fn stochastic_commands_need_a_seed() {
    let out = netcomp(&["simulate", "--set", "5,6,7", "--agents", "10"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("seed"));
    assert_eq!(code(&netcomp(&["solve", "--set", "5,6,7"])), 1);
}

#[test]
fn ideal_simulation_hits_only_subset_sums() {
    let out = netcomp(&[
        "simulate", "--set", "5,6,7", "--ppj", "0", "--agents", "79", "--seed", "7",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("exit,count"));
    let mut total = 0;
    for line in lines {
        let (exit, count) = line.split_once(',').unwrap();
        let (exit, count): (u64, u64) = (exit.parse().unwrap(), count.parse().unwrap());
        if ![0, 5, 6, 7, 11, 12, 13, 18].contains(&exit) {
            assert_eq!(count, 0, "exit {exit}");
        }
        total += count;
    }
    assert_eq!(total, 79);
}

#[test]
fn thread_count_leaves_output_unchanged() {
    let base = [
        "simulate", "--set", "5,6,7", "--ppj", "0.01", "--agents", "40000", "--seed", "7",
        "--traced",
    ];
    let one = netcomp(&[&base[..], &["--threads", "1"]].concat());
    let eight = netcomp(&[&base[..], &["--threads", "8"]].concat());
    assert_eq!(code(&one), 0);
    assert!(String::from_utf8_lossy(&one.stdout).starts_with("exit,count,correct,faulty\n"));
    assert_eq!(one.stdout, eight.stdout);
}

#[test]
fn simulate_writes_histogram_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().to_str().unwrap();
    let out = netcomp(&[
        "simulate", "--set", "2,3,7", "--ppj", "0.01", "--seed", "5", "--out", path,
    ]);
    assert_eq!(code(&out), 0);
    let meta: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("histogram.json")).unwrap())
            .unwrap();
    assert_eq!(meta["command"], "simulate");
    assert_eq!(meta["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(meta["config"]["seed"], 5);
    assert_eq!(
        meta["config"]["split_ratios"],
        serde_json::json!([0.5, 0.5, 0.5])
    );
    // the agent count defaults to the planned one and is echoed
    let n = meta["config"]["n_agents"].as_u64().unwrap();
    assert!(n > 79);
    let csv = fs::read_to_string(dir.path().join("histogram.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 13);
}

#[test]
fn plan_without_errors_needs_79_agents() {
    let out = netcomp(&["plan", "--set", "5,6,7", "--ppj", "0"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["plan"]["n_min"], 79);
    assert_eq!(v["plan"]["n_min_non"], 79);
    assert!(v["noise"].is_null());
    assert_eq!(v["bands"]["exits"].as_array().unwrap().len(), 19);
}

#[test]
fn pinned_chain_sizing() {
    let out = netcomp(&["analyze", "--set", "5,6,7", "--ppj", "0.05", "--ni", "28"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let n = v["plan"]["n_min_non"].as_u64().unwrap();
    assert!((914..=916).contains(&n), "N_min_non = {n}");
    assert_eq!(v["plan"]["iterations"], 0);
    let probs = v["noise"]["probs"].as_array().unwrap();
    assert_eq!(probs.len(), 19);
}

#[test]
fn high_error_warns_and_reports_last_iterate() {
    let out = netcomp(&["plan", "--set", "5,6,7", "--ppj", "0.2"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("p_c ≤ 0.5: approximation regime exceeded"));
    let v = json(&out);
    assert!(v["error"].as_str().unwrap().contains("did not converge"));
    assert_eq!(v["plan"]["converged"], false);
    assert_eq!(v["plan"]["warnings"][0]["code"], "low_correct_traversal");
}

#[test]
fn strict_mode_rejects_low_traversal() {
    let args = ["analyze", "--set", "5,6,7", "--ppj", "0.05", "--ni", "28"];
    assert_eq!(code(&netcomp(&args)), 0);
    assert_eq!(code(&netcomp(&[&args[..], &["--strict"]].concat())), 2);
    assert_eq!(
        code(&netcomp(&[
            "plan", "--set", "5,6,7", "--ppj", "0.01", "--strict"
        ])),
        0
    );
}

#[test]
fn analyze_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().to_str().unwrap();
    let out = netcomp(&["analyze", "--set", "5,6,7", "--ppj", "0.01", "--out", path]);
    assert_eq!(code(&out), 0);
    let paths = fs::read_to_string(dir.path().join("paths.csv")).unwrap();
    assert!(paths.starts_with("i,m,A,vA,dA\n"));
    let noise = fs::read_to_string(dir.path().join("noise.csv")).unwrap();
    assert!(noise.starts_with("i,p_non\n"));
    assert!(dir.path().join("analyze.json").exists());
}

#[test]
fn ideal_solve_is_verified() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().to_str().unwrap();
    let out = netcomp(&[
        "solve", "--set", "2,3,7", "--ppj", "0", "--seed", "1", "--out", path,
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(
        v["solutions"],
        serde_json::json!([0, 2, 3, 5, 7, 9, 10, 12])
    );
    assert_eq!(v["accuracy"]["verified"], true);
    let verdicts = fs::read_to_string(dir.path().join("verdicts.csv")).unwrap();
    assert!(verdicts
        .starts_with("exit,count,noise_lo,noise_hi,signal_lo,signal_hi,multiplicity,verdict\n"));
    assert_eq!(verdicts.lines().count(), 14);
    let summary: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary, v);
}

#[test]
fn faulty_solve_finds_subset_sums() {
    let expected = serde_json::json!([0, 5, 6, 7, 11, 12, 13, 18]);
    let mut verified = 0;
    for seed in 1..=10 {
        let s = seed.to_string();
        let out = netcomp(&["solve", "--set", "5,6,7", "--ppj", "0.01", "--seed", &s]);
        let v = json(&out);
        // ambiguity is allowed, a wrong SOLUTION is not
        assert_eq!(v["accuracy"]["false_positives"], 0, "seed {seed}");
        match code(&out) {
            0 => {
                assert_eq!(v["solutions"], expected);
                verified += 1;
            }
            3 => assert!(!v["ambiguous"].as_array().unwrap().is_empty()),
            c => panic!("seed {seed}: exit {c}"),
        }
    }
    assert!(verified >= 5, "verified {verified}/10");
}

#[test]
fn solve_is_reproducible() {
    let args = ["solve", "--set", "2,3,7", "--ppj", "0.02", "--seed", "9"];
    let a = netcomp(&args);
    let b = netcomp(&[&args[..], &["--threads", "4"]].concat());
    let (mut va, mut vb) = (json(&a), json(&b));
    va["config"]["threads"] = Value::Null;
    vb["config"]["threads"] = Value::Null;
    assert_eq!(va, vb);
    assert_eq!(code(&a), code(&b));
}

#[test]
fn config_file_merges_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(
        &cfg,
        r#"{"elements": [5, 6, 7], "p_pj": 0.01, "seed": 3, "n_agents": 50,
            "split_ratios": [0.5, 0.4, 0.6]}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = netcomp(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--agents",
        "20",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["config"]["n_agents"], 20);
    assert_eq!(v["config"]["seed"], 3);
    assert_eq!(v["config"]["p_pj"], 0.01);
    assert_eq!(
        v["config"]["split_ratios"],
        serde_json::json!([0.5, 0.4, 0.6])
    );

    let inst = dir.path().join("inst.json");
    fs::write(&inst, r#"{"elements": [2, 3]}"#).unwrap();
    let out = netcomp(&["encode", "--instance", inst.to_str().unwrap()]);
    assert_eq!(json(&out)["z"], 5);

    fs::write(&cfg, r#"{"unknown_field": 1}"#).unwrap();
    assert_eq!(
        code(&netcomp(&[
            "plan",
            "--set",
            "2",
            "--config",
            cfg.to_str().unwrap()
        ])),
        1
    );
}

#[test]
fn reproduce_writes_band_panel() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().to_str().unwrap();
    let out = netcomp(&["reproduce", "--figure", "2", "--seed", "1", "--out", path]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let meta: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("fig2.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["n_agents"], 79);
    assert_eq!(meta["config"]["elements"], serde_json::json!([5, 6, 7]));
    let bands = fs::read_to_string(dir.path().join("fig2_bands.csv")).unwrap();
    assert_eq!(bands.lines().count(), 20);
    let hist = fs::read_to_string(dir.path().join("fig2_histogram.csv")).unwrap();
    assert!(hist.starts_with("exit,count,correct,faulty\n"));
}

#[test]
fn reproduce_writes_distribution_panel() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().to_str().unwrap();
    let out = netcomp(&[
        "reproduce",
        "--figure",
        "3b",
        "--seed",
        "2",
        "--agents",
        "200000",
        "--out",
        path,
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("fig3b_distribution.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("exit,p_non_analytic,p_non_simulated"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 17);
    for r in &rows {
        assert!((r[1] - r[2]).abs() < 0.01, "{r:?}");
    }
}

#[test]
fn reproduce_rejects_unknown_figure() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().to_str().unwrap();
    let out = netcomp(&["reproduce", "--figure", "7x", "--seed", "1", "--out", path]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("unknown figure"));
}
