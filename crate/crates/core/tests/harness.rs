use std::fs;
use std::path::Path;
use std::process::Command;

use qns::harness::{run_pipeline, Experiment, ExperimentConfig, HarnessError};

fn qns(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qns")).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.display().to_string()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "ok.conf", "optimize = false\n");
    let out = dir.path().join("out").display().to_string();
    assert_eq!(qns(&["resources-table", "--config", &good, "--out", &out]).0, 0);
    assert!(dir.path().join("out/resources.csv").exists());

    assert_eq!(qns(&["nonsense", "--config", &good]).0, 2);
    assert_eq!(qns(&["resources-table"]).0, 2);
    assert_eq!(qns(&["resources-table", "--config", "/no/such/file"]).0, 2);
    let bad = write(dir.path(), "bad.conf", "gamma = -1\noptimize = false\n");
    assert_eq!(qns(&["resources-table", "--config", &bad]).0, 2);
    let typo = write(dir.path(), "typo.conf", "gama = 0.1\n");
    let (code, err) = qns(&["resources-table", "--config", &typo]);
    assert_eq!(code, 2);
    assert!(err.contains("gama"));

    // a regular file where the output directory should go
    let blocker = write(dir.path(), "blocker", "");
    assert_eq!(qns(&["resources-table", "--config", &good, "--out", &blocker]).0, 3);
}

#[test]
fn validation_happens_before_running() {
    let c = ExperimentConfig::parse(Experiment::OptimizeDd, "orders = 3").unwrap();
    assert!(matches!(run_pipeline(&c), Err(HarnessError::Validation(_))));
    let c = ExperimentConfig::parse(Experiment::PredictRandom, "comb_m_max = 10, 15\ncomb_omega0 = 0.1").unwrap();
    assert!(matches!(run_pipeline(&c), Err(HarnessError::Validation(_))));
}

#[test]
fn reruns_are_byte_identical() {
    let text = "controls = 200\ncomb_m_max = 4, 10\nseed = 9\n";
    let c = ExperimentConfig::parse(Experiment::PredictRandom, text).unwrap();
    let a = run_pipeline(&c).unwrap();
    let b = run_pipeline(&c).unwrap();
    for name in a.names() {
        assert_eq!(a.get(name), b.get(name), "{name}");
    }
    let csv = a.get("predictions.csv").unwrap();
    assert!(csv.starts_with("index,exact,"));
    assert!(csv.contains("# seed=9\n") && csv.contains(&format!("# config_sha256={}\n", c.hash())));
}

#[test]
fn silent_noise_scan_is_flat() {
    let c = ExperimentConfig::parse(
        Experiment::TruncationScan,
        "g_over_gamma_min = 0\ng_over_gamma_max = 1e-300\npoints = 2\nmc_trajectories = 100\nobservable = x\nrho0 = +x",
    )
    .unwrap();
    let art = run_pipeline(&c).unwrap();
    for row in data_rows(art.get("truncation_scan.csv").unwrap()) {
        for col in [2, 3, 4, 6] {
            let v: f64 = row[col].parse().unwrap();
            assert!((v - 1.0).abs() < 1e-12, "{row:?}");
        }
    }
}

#[test]
fn resources_table_counts() {
    let c = ExperimentConfig::parse(Experiment::ResourcesTable, "optimize = false").unwrap();
    let art = run_pipeline(&c).unwrap();
    let rows = data_rows(art.get("resources.csv").unwrap());
    let counts: Vec<&str> = rows.iter().map(|r| r[4].as_str()).collect();
    assert_eq!(counts, ["49", "38071", "1511", "516", "59"]);
    let dt: Vec<f64> = rows[1..].iter().map(|r| r[3].parse().unwrap()).collect();
    assert_eq!(dt, [100.0 / 20.0 / 47.0, 100.0 / 20.0 / 15.0, 0.5, 1.25]);
}
