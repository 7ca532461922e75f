use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn tlan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tlan"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = tlan(args);
    assert!(
        out.status.success(),
        "tlan {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    tlan(args).status.code().expect("exit code")
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn metrics(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("metrics.json")).unwrap()).unwrap()
}

/// Small congested instance: 6x6 grid with a long headway so capacities are a
/// handful of vehicles per interval.
fn congested(dir: &Path) -> (String, String) {
    let net = dir.join("grid.csv");
    let q = dir.join("q.csv");
    ok(&[
        "generate",
        "network",
        "--rows",
        "6",
        "--cols",
        "6",
        "--seed",
        "3",
        "--out",
        s(&net),
    ]);
    ok(&[
        "generate",
        "queries",
        "--network",
        s(&net),
        "--count",
        "300",
        "--window-end-s",
        "300",
        "--hotspot-bias",
        "1",
        "--seed",
        "3",
        "--headway-s",
        "200",
        "--out",
        s(&q),
    ]);
    (s(&net).to_string(), s(&q).to_string())
}

#[test]
fn two_by_two_grid_has_four_nodes_and_repeats_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let stdout = ok(&[
        "generate",
        "network",
        "--rows",
        "2",
        "--cols",
        "2",
        "--out",
        s(&a),
    ]);
    assert!(stdout.contains("4 nodes, 8 edges"), "{stdout}");
    ok(&[
        "generate",
        "network",
        "--rows",
        "2",
        "--cols",
        "2",
        "--out",
        s(&b),
    ]);
    let nodes = fs::read_to_string(dir.path().join("a.nodes.csv")).unwrap();
    assert_eq!(nodes.lines().count(), 5);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let qa = dir.path().join("qa.csv");
    let qb = dir.path().join("qb.csv");
    for q in [&qa, &qb] {
        ok(&[
            "generate",
            "queries",
            "--network",
            s(&a),
            "--count",
            "20",
            "--seed",
            "8",
            "--out",
            s(q),
        ]);
    }
    assert_eq!(fs::read(&qa).unwrap(), fs::read(&qb).unwrap());
}

#[test]
fn bad_arguments_exit_with_two() {
    assert_eq!(code(&[]), 2);
    assert_eq!(
        code(&["generate", "network", "--rows", "1", "--cols", "2", "--out", "x.csv"]),
        2
    );
    assert_eq!(
        code(&[
            "generate",
            "queries",
            "--network",
            "n.csv",
            "--count",
            "5",
            "--hotspot-bias",
            "1.5",
            "--out",
            "q.csv"
        ]),
        2
    );
    let fig = fixture("fig1.edges.csv");
    let q = fixture("fig1.queries.csv");
    assert_eq!(
        code(&[
            "route",
            "--alg",
            "dijkstra",
            "--network",
            &fig,
            "--queries",
            &q,
            "--out",
            "r"
        ]),
        2
    );
    assert_eq!(
        code(&[
            "route",
            "--alg",
            "ffnd",
            "--network",
            &fig,
            "--queries",
            &q,
            "--out",
            "r",
            "--gamma",
            "0.3"
        ]),
        2
    );
    assert_eq!(
        code(&[
            "route",
            "--alg",
            "ffnd",
            "--network",
            &fig,
            "--queries",
            &q,
            "--out",
            "r",
            "--workers",
            "0"
        ]),
        2
    );

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("q.csv");
    // Window past the default 240-interval horizon.
    assert_eq!(
        code(&[
            "generate",
            "queries",
            "--network",
            &fig,
            "--count",
            "5",
            "--window-end-s",
            "90000",
            "--out",
            s(&out)
        ]),
        2
    );
}

#[test]
fn missing_inputs_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    assert_eq!(
        code(&[
            "route",
            "--alg",
            "ffnd",
            "--network",
            "/nonexistent.csv",
            "--queries",
            "/nonexistent.q.csv",
            "--out",
            s(&out)
        ]),
        1
    );
}

#[test]
fn single_free_flow_query_reports_free_flow_minutes() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("one.csv");
    fs::write(&q, "query_id,src,dst,depart_s\n7,1,4,0\n").unwrap();
    let out = dir.path().join("run");
    ok(&[
        "route",
        "--alg",
        "ffnd",
        "--network",
        &fixture("fig1.edges.csv"),
        "--queries",
        s(&q),
        "--psi-factor",
        "0",
        "--out",
        s(&out),
    ]);
    let m = metrics(&out);
    // Three 36 s roads.
    assert_eq!(m["ajt"], 1.8);
    assert_eq!(m["penalty_mean"], 0.0);
    assert_eq!(m["completed"], 1);

    let mut keys: Vec<&str> = m.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(
        keys,
        [
            "ajt",
            "completed",
            "empty",
            "ffcu",
            "ld",
            "overflowed",
            "penalty_histogram",
            "penalty_mean",
            "penalty_std"
        ]
    );
    let paths = fs::read_to_string(out.join("paths.csv")).unwrap();
    assert_eq!(
        paths,
        "query_id,hop_index,edge_id,entry_time_s,exit_time_s\n7,0,1,0,36\n7,1,2,36,72\n7,2,3,72,108\n"
    );
    assert_eq!(
        fs::read_to_string(out.join("penalties.csv")).unwrap(),
        "query_id,pi_minutes\n7,0\n"
    );
    let manifest: Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["algorithm"], "ffnd");
    assert_eq!(manifest["config"]["k"], 5);
    assert_eq!(manifest["counts"]["completed"], 1);
}

#[test]
fn control_factor_applies_background_and_gamma_one_is_neutral() {
    let dir = tempfile::tempdir().unwrap();
    let (net, q) = congested(dir.path());
    let base = dir.path().join("base.csv");
    ok(&[
        "generate",
        "base-elm",
        "--network",
        &net,
        "--queries",
        &q,
        "--headway-s",
        "200",
        "--out",
        s(&base),
    ]);

    let run = |name: &str, extra: &[&str]| {
        let out = dir.path().join(name);
        let mut args = vec![
            "route",
            "--alg",
            "csmat",
            "--network",
            &net,
            "--queries",
            &q,
            "--headway-s",
            "200",
            "--out",
            s(&out),
        ];
        args.extend_from_slice(extra);
        ok(&args);
        out
    };
    let plain = run("plain", &[]);
    let one = run("g1", &["--gamma", "1", "--base-elm", s(&base)]);
    let part = run("g03", &["--gamma", "0.3", "--base-elm", s(&base)]);
    assert_eq!(
        fs::read(plain.join("metrics.json")).unwrap(),
        fs::read(one.join("metrics.json")).unwrap()
    );
    let (m0, m3) = (metrics(&plain), metrics(&part));
    assert!(m3["ld"].as_f64().unwrap() > m0["ld"].as_f64().unwrap());
    assert!(m3["ajt"].as_f64().unwrap() > m0["ajt"].as_f64().unwrap());
}

#[test]
fn worker_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let (net, q) = congested(dir.path());
    let mut files = Vec::new();
    for w in ["1", "4"] {
        let out = dir.path().join(format!("w{w}"));
        ok(&[
            "route",
            "--alg",
            "csmat",
            "--network",
            &net,
            "--queries",
            &q,
            "--headway-s",
            "200",
            "--workers",
            w,
            "--out",
            s(&out),
        ]);
        files.push(
            ["metrics.json", "paths.csv", "elm.csv", "penalties.csv"]
                .map(|f| fs::read(out.join(f)).unwrap()),
        );
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn compare_tabulates_runs_and_rejects_mismatched_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let (net, q) = congested(dir.path());
    let mut dirs = Vec::new();
    for (name, alg) in [("a", "ffnd"), ("b", "ffnd"), ("c", "csmat")] {
        let out = dir.path().join(name);
        ok(&[
            "route",
            "--alg",
            alg,
            "--network",
            &net,
            "--queries",
            &q,
            "--headway-s",
            "200",
            "--out",
            s(&out),
        ]);
        dirs.push(out);
    }
    let table = ok(&["compare", s(&dirs[0]), s(&dirs[1]), s(&dirs[2])]);
    let rows: Vec<Vec<&str>> = table.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0][..3], ["run", "algorithm", "ajt_min"]);
    assert_eq!(rows.len(), 4);
    // Everything but the wall-clock column repeats for identical runs.
    assert_eq!(rows[1][1..7], rows[2][1..7]);
    let ajt = |r: &[&str]| r[2].parse::<f64>().unwrap();
    assert!(
        ajt(&rows[3]) < ajt(&rows[1]),
        "csmat {} vs ffnd {}",
        rows[3][2],
        rows[1][2]
    );

    let csv_out = dir.path().join("cmp.csv");
    ok(&["compare", s(&dirs[0]), s(&dirs[2]), "--out", s(&csv_out)]);
    assert_eq!(fs::read_to_string(&csv_out).unwrap().lines().count(), 3);

    let other_q = dir.path().join("q2.csv");
    ok(&[
        "generate",
        "queries",
        "--network",
        &net,
        "--count",
        "50",
        "--seed",
        "4",
        "--out",
        s(&other_q),
    ]);
    let other = dir.path().join("d");
    ok(&[
        "route",
        "--alg",
        "ffnd",
        "--network",
        &net,
        "--queries",
        s(&other_q),
        "--headway-s",
        "200",
        "--out",
        s(&other),
    ]);
    let out = tlan(&["compare", s(&dirs[0]), s(&other)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("different query set"));
    assert_eq!(code(&["compare", s(&dirs[0])]), 2);
}
