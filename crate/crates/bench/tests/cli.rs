use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn ampc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ampc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("experiment.cfg");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn run_config(dir: &Path, body: &str) -> Output {
    let cfg = write_config(dir, body);
    ampc(&["run", "--config", &cfg])
}

#[test]
fn forest_path_writes_one_report_per_seed() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let body = format!(
        "algorithm = forest\ngraph = path(1000)\ndelta = 0.5\nseeds = 0..3\noutput = {}\n",
        out.display()
    );
    let res = run_config(dir.path(), &body);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    for seed in 0..3 {
        let seed_dir = out.join(format!("seed_{seed}"));
        let summary: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(seed_dir.join("summary.json")).unwrap()).unwrap();
        assert_eq!(summary["oracle_match"], true);
        assert_eq!(summary["seed"], seed);
        assert_eq!(summary["components"], 1);
        assert!(summary["iterations"].is_array());
        let csv = fs::read_to_string(seed_dir.join("metrics.csv")).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next(),
            Some("round,reads,writes,max_machine_reads,max_machine_writes,peak_live_words")
        );
        assert_eq!(lines.count() as u64, summary["rounds"].as_u64().unwrap());
    }
}

#[test]
fn general_run_with_quotas_completes() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let body = format!(
        "algorithm = general\ngraph = gnm(10000,20000)\ndelta = 0.5\nseeds = 7\nenforce_quotas = true\noutput = {}\n",
        out.display()
    );
    let res = run_config(dir.path(), &body);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("seed_7/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["oracle_match"], true);
    let tree = summary["recursion"].as_array().unwrap();
    assert!(tree[0]["parent_id"].is_null());
    for key in [
        "node_id",
        "parent_id",
        "n",
        "m",
        "t_used",
        "rounds",
        "reads",
        "peak_live_words",
    ] {
        assert!(tree[0].get(key).is_some(), "missing {key}");
    }
}

#[test]
fn malformed_config_fails() {
    let dir = TempDir::new().unwrap();
    let res = run_config(
        dir.path(),
        "algorithm = forest\ngraph = path(10)\ndelta = 1.5\nseeds = 0\noutput = out\n",
    );
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("delta"));
}

#[test]
fn forest_algorithm_rejects_cyclic_input() {
    let dir = TempDir::new().unwrap();
    let body = format!(
        "algorithm = forest\ngraph = gnm(100,300)\ndelta = 0.5\nseeds = 0\noutput = {}\n",
        dir.path().join("out").display()
    );
    let res = run_config(dir.path(), &body);
    assert!(!res.status.success());
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = TempDir::new().unwrap();
    let mut reports = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let body = format!(
            "algorithm = general\ngraph = gnm(3000,6000)\ndelta = 0.5\nseeds = 1,4\noutput = {}\n",
            out.display()
        );
        assert!(run_config(dir.path(), &body).status.success());
        let mut files = Vec::new();
        for seed in [1, 4] {
            for name in ["metrics.csv", "summary.json"] {
                files.push(fs::read(out.join(format!("seed_{seed}")).join(name)).unwrap());
            }
        }
        reports.push(files);
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn gen_writes_an_edge_list() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("g.txt");
    let res = ampc(&["gen", "--family", "star(6)", "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let g = ampc_core::graph::read_edge_list(std::io::BufReader::new(fs::File::open(&out).unwrap())).unwrap();
    assert_eq!((g.n(), g.m()), (6, 5));
    assert!(!ampc(&["gen", "--family", "blob(3)", "--out", out.to_str().unwrap()])
        .status
        .success());
}

#[test]
fn quick_verification_writes_report() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("v");
    let body = format!(
        "algorithm = forest\ngraph = path(10)\ndelta = 0.5\nseeds = 0\nprofile = quick\noutput = {}\n",
        out.display()
    );
    let cfg = write_config(dir.path(), &body);
    let res = ampc(&["verify", "--config", &cfg]);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("verification.json")).unwrap()).unwrap();
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.len() > 20);
    for c in checks {
        let pass = c["observed"].as_f64().unwrap() <= c["threshold"].as_f64().unwrap();
        assert_eq!(c["pass"].as_bool().unwrap(), pass, "{c}");
    }
    let all = checks.iter().all(|c| c["pass"] == true);
    assert_eq!(res.status.success(), all);
}
