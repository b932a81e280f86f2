use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use msd_core::generators;
use tempfile::TempDir;

fn msd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msd"))
        .args(args)
        .env_remove("MSD_SEED")
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn grid_file(dir: &TempDir) -> std::path::PathBuf {
    let path = dir.path().join("grid.txt");
    fs::write(&path, generators::grid(8, 8).to_edge_list()).unwrap();
    path
}

#[test]
fn stats_of_a_single_edge() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("pair.txt");
    fs::write(&path, "# a comment\na b\n").unwrap();
    let v = stdout_json(&msd(&["stats", path_str(&path)]));
    assert_eq!(v["nodes"], 2);
    assert_eq!(v["edges"], 1);
    assert_eq!(v["avg_degree"], 1.0);
    assert_eq!(v["density"], 0.5);
}

#[test]
fn stats_errors_map_to_exit_codes() {
    let dir = TempDir::new().unwrap();
    let missing = msd(&["stats", path_str(&dir.path().join("nope.txt"))]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("nope.txt"));

    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "1 2\n3 4 5\n").unwrap();
    let out = msd(&["stats", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    assert_eq!(msd(&["stats"]).status.code(), Some(2));
}

#[test]
fn simulate_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let grid = grid_file(&dir);
    let args = [
        "simulate",
        path_str(&grid),
        "-k",
        "2",
        "-p",
        "0.4",
        "--fraction",
        "0.3",
        "--seed",
        "11",
    ];
    let (a, b) = (msd(&args), msd(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = stdout_json(&a);
    assert_eq!(v["seeds"].as_array().unwrap().len(), 2);
    assert!(v["infected"].as_array().unwrap().len() > 64 * 3 / 10);
    assert_eq!(v["hit_target"], true);

    let other = msd(&[
        "simulate",
        path_str(&grid),
        "-k",
        "2",
        "-p",
        "0.4",
        "--fraction",
        "0.3",
        "--seed",
        "12",
    ]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn simulate_without_spread_misses_the_target() {
    let dir = TempDir::new().unwrap();
    let grid = grid_file(&dir);
    let out = msd(&[
        "simulate",
        path_str(&grid),
        "-k",
        "1",
        "-p",
        "0",
        "--fraction",
        "0.5",
        "--max-steps",
        "5",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["hit_target"], false);
    assert_eq!(v["steps"], 5);
    assert_eq!(v["infected"].as_array().unwrap().len(), 1);
    assert_eq!(
        msd(&["simulate", path_str(&grid), "-k", "1", "-p", "2"])
            .status
            .code(),
        Some(6)
    );
}

#[test]
fn detect_single_infected_node() {
    let dir = TempDir::new().unwrap();
    let grid = grid_file(&dir);
    let snap = dir.path().join("snap.json");
    fs::write(&snap, r#"{"infected": ["27"]}"#).unwrap();
    for clusterer in ["link", "louvain", "eigen"] {
        let v = stdout_json(&msd(&[
            "detect",
            path_str(&grid),
            path_str(&snap),
            "--clusterer",
            clusterer,
        ]));
        assert_eq!(v["detected_sources"], serde_json::json!(["27"]));
        assert_eq!(v["clusterer"], clusterer);
        assert_eq!(v["alpha"], 0.5);
    }
}

#[test]
fn detect_round_trip_with_cluster_dump() {
    let dir = TempDir::new().unwrap();
    let grid = grid_file(&dir);
    let snap = dir.path().join("snap.json");
    let sim = msd(&[
        "simulate",
        path_str(&grid),
        "-k",
        "2",
        "-p",
        "0.5",
        "--fraction",
        "0.4",
        "--seed",
        "3",
        "-o",
        path_str(&snap),
    ]);
    assert!(sim.status.success());
    let dump = dir.path().join("clusters.csv");
    let v = stdout_json(&msd(&[
        "detect",
        path_str(&grid),
        path_str(&snap),
        "--dump-clusters",
        path_str(&dump),
    ]));
    let k = v["k_detected"].as_u64().unwrap();
    assert!(k >= 1);
    let text = fs::read_to_string(&dump).unwrap();
    assert!(text.starts_with("edge_src,edge_dst,cluster\n"));
    let max_label = text
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap())
        .max();
    assert_eq!(max_label, Some(k));

    let louvain_dump = dir.path().join("louvain.csv");
    let out = msd(&[
        "detect",
        path_str(&grid),
        path_str(&snap),
        "--clusterer",
        "louvain",
        "--dump-clusters",
        path_str(&louvain_dump),
    ]);
    assert!(out.status.success());
    assert!(fs::read_to_string(&louvain_dump)
        .unwrap()
        .starts_with("node,cluster\n"));

    let iterative = stdout_json(&msd(&[
        "detect",
        path_str(&grid),
        path_str(&snap),
        "--solver",
        "iterative",
    ]));
    assert_eq!(iterative["detected_sources"], v["detected_sources"]);
}

#[test]
fn detect_rejects_bad_snapshots() {
    let dir = TempDir::new().unwrap();
    let grid = grid_file(&dir);
    let snap = dir.path().join("snap.json");
    fs::write(&snap, r#"{"infected": ["1", "2""#).unwrap();
    assert_eq!(
        msd(&["detect", path_str(&grid), path_str(&snap)])
            .status
            .code(),
        Some(4)
    );
    fs::write(&snap, r#"{"infected": ["1", "nowhere"]}"#).unwrap();
    let out = msd(&["detect", path_str(&grid), path_str(&snap)]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nowhere"));
    fs::write(&snap, r#"{"infected": []}"#).unwrap();
    assert_eq!(
        msd(&["detect", path_str(&grid), path_str(&snap)])
            .status
            .code(),
        Some(10)
    );
}

fn write_config(dir: &TempDir, extra: &str) -> std::path::PathBuf {
    let grid = grid_file(dir);
    let config = dir.path().join("experiment.json");
    fs::write(
        &config,
        format!(
            r#"{{
  "networks": [{{"name": "grid8", "edge_list_path": "{}"}}],
  "k_values": [1, 2],
  "replicates": 2,
  "target_fraction": 0.2,
  "master_seed": 5,
  "record_runtime": false,
  "output_dir": "out"{extra}
}}"#,
            grid.file_name().unwrap().to_str().unwrap()
        ),
    )
    .unwrap();
    config
}

#[test]
fn experiment_writes_every_cell() {
    let dir = TempDir::new().unwrap();
    let config = write_config(&dir, "");
    let out = msd(&["experiment", path_str(&config), "--threads", "2"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("f1_mean"));

    let replicates = fs::read_to_string(dir.path().join("out/replicates.csv")).unwrap();
    let mut lines = replicates.lines();
    assert_eq!(
        lines.next(),
        Some("network,method,K,replicate,f1,precision,recall,k_detected,runtime_ms")
    );
    assert_eq!(lines.count(), 3 * 2 * 2);
    let summary = fs::read_to_string(dir.path().join("out/summary.csv")).unwrap();
    let rows: Vec<&str> = summary.lines().collect();
    assert_eq!(
        rows[0],
        "network,method,K,n,f1_mean,f1_sd,k_detected_mean,runtime_ms_mean"
    );
    assert_eq!(rows.len(), 1 + 3 * 2);
    assert!(rows[1..].iter().all(|r| r.split(',').nth(3) == Some("2")));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/report.json")).unwrap())
            .unwrap();
    assert_eq!(report["completed"], 12);
    assert_eq!(report["failures"], serde_json::json!([]));
}

#[test]
fn experiment_reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let config = write_config(&dir, ", \"error_distance\": true");
    let read = |name: &str| fs::read(dir.path().join("out").join(name)).unwrap();
    assert!(
        msd(&["experiment", path_str(&config), "--threads", "1", "-q"])
            .status
            .success()
    );
    let first = (
        read("replicates.csv"),
        read("summary.csv"),
        read("report.json"),
    );
    assert!(String::from_utf8_lossy(&first.0)
        .lines()
        .next()
        .unwrap()
        .ends_with(",error_distance"));
    assert!(
        msd(&["experiment", path_str(&config), "--threads", "3", "-q"])
            .status
            .success()
    );
    assert_eq!(
        first,
        (
            read("replicates.csv"),
            read("summary.csv"),
            read("report.json")
        )
    );

    let reseeded = Command::new(env!("CARGO_BIN_EXE_msd"))
        .args(["experiment", path_str(&config), "-q"])
        .env("MSD_SEED", "99")
        .output()
        .unwrap();
    assert!(reseeded.status.success());
    assert_ne!(first.0, read("replicates.csv"));
}

#[test]
fn experiment_config_errors_are_listed_together() {
    let dir = TempDir::new().unwrap();
    let config = write_config(&dir, r#", "alpha": 2.0, "methods": ["link", "spectral"]"#);
    let text = fs::read_to_string(&config)
        .unwrap()
        .replace("\"replicates\": 2", "\"replicates\": 0");
    fs::write(&config, text).unwrap();
    let out = msd(&["experiment", path_str(&config)]);
    assert_eq!(out.status.code(), Some(5));
    let stderr = String::from_utf8_lossy(&out.stderr);
    for field in ["replicates", "alpha", "methods"] {
        assert!(stderr.contains(field), "{stderr}");
    }

    fs::write(&config, r#"{"networks": [], "unknown": 1}"#).unwrap();
    assert_eq!(
        msd(&["experiment", path_str(&config)]).status.code(),
        Some(5)
    );
}
