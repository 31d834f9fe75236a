use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use fockmarket_cli::scenario::{Method, Model1Spec, ModelSpec, TimeSpec};
use fockmarket_cli::{run, RunOptions, Scenario};
use fockmarket_core::fock::DEFAULT_MAX_DIM;

const OPTS: RunOptions = RunOptions { method: None, order: None, max_dim: DEFAULT_MAX_DIM };

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fockmarket"));
    c.env_remove("FOCKMARKET_MAX_DIM");
    c
}

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_scenario(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const SMALL: &str = r#"{
  "model": "model1",
  "config": {"alpha": [1, 2], "p": [[0, 1], [1, 0]], "initial_n": [3, 1], "price_m": 1, "epsilon": 1},
  "time": {"t_max": 2, "points": 11},
  "outputs": ["n2", "N", "n1"]
}"#;

#[test]
fn run_writes_artifacts_in_channel_order() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), "small.json", SMALL);
    let out = bin().arg("run").arg(&path).arg("--out").arg(dir.path().join("o")).arg("--svg").output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("o/small.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,n2,N,n1"));
    assert_eq!(lines.clone().count(), 11);
    assert!(lines.all(|l| l.split(',').count() == 4));
    assert!(dir.path().join("o/small.svg").exists());
    let report = std::fs::read_to_string(dir.path().join("o/small.conservation.txt")).unwrap();
    assert!(report.contains("result: pass"));
}

#[test]
fn validation_failures_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("malformed.json", "{ not json".to_string(), "malformed scenario"),
        ("unknown.json", SMALL.replace("\"model1\"", "\"model7\""), "unknown model"),
        ("channel.json", SMALL.replace("\"n2\"", "\"k2\""), "invalid scenario"),
        ("grid.json", SMALL.replace("\"points\": 11", "\"points\": 1"), "invalid scenario"),
    ];
    for (name, text, needle) in cases {
        let path = write_scenario(dir.path(), name, &text);
        let out = bin().arg("run").arg(&path).arg("--out").arg(dir.path()).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{name}");
        assert!(stderr(&out).contains(needle), "{name}: {}", stderr(&out));
    }
}

#[test]
fn sector_cap_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), "small.json", SMALL);
    let out = bin().env("FOCKMARKET_MAX_DIM", "3").arg("verify").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("sector overflow"));
    let bad = bin().env("FOCKMARKET_MAX_DIM", "lots").arg("verify").arg(&path).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let ok = bin().env("FOCKMARKET_MAX_DIM", "5").arg("verify").arg(&path).output().unwrap();
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));
}

#[test]
fn verify_reports_and_rejects_analytic_models() {
    let out = bin().arg("verify").arg(scenarios().join("two-traders-model2.json")).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for q in ["N,", "K,", "Gamma,", "Q1,", "Q2,"] {
        assert!(text.contains(q), "{q} missing from\n{text}");
    }
    for name in ["meanfield.json", "kms.json"] {
        let out = bin().arg("verify").arg(scenarios().join(name)).output().unwrap();
        assert_eq!(out.status.code(), Some(2));
        assert!(stderr(&out).contains("not supported"));
    }
}

#[test]
fn broken_hamiltonian_run_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL.replace("\"outputs\"", "\"test_hooks\": {\"break_conservation\": 0.4},\n  \"outputs\"");
    let path = write_scenario(dir.path(), "broken.json", &text);
    let out = bin().arg("run").arg(&path).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(std::fs::read_to_string(dir.path().join("broken.conservation.txt")).unwrap().contains("FAIL"));
}

#[test]
fn kms_and_price_subcommands() {
    let out = bin().args(["kms", "--phi", "1", "--ql", "3", "--nc", "1"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("case: ia"), "{text}");
    let out = bin().args(["kms", "--phi", "-1", "--ql", "4", "--beta", "0.5"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("case: iiic"), "{text}");
    let out = bin().args(["kms", "--phi", "0", "--ql", "4"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("case ii-with") && text.contains("case ii-without"), "{text}");
    let out = bin().args(["kms", "--phi", "1", "--ql", "4", "--beta", "-1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin().args(["price", "--of", "3", "--pr", "6"]).output().unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "5");
    let out = bin().args(["price", "--of", "2", "--pr", "2"]).output().unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "2");
}

#[test]
fn series_agrees_with_exact_inside_radius() {
    let mut scn = Scenario::load(&scenarios().join("two-traders-model2.json")).unwrap();
    let probe = run(&scn, &RunOptions { method: Some(Method::Series), ..OPTS }).unwrap();
    let note = probe.report.notes.iter().find(|n| n.starts_with("radius_hint")).unwrap();
    let radius: f64 = note.split_whitespace().nth(1).unwrap().parse().unwrap();
    scn.time = TimeSpec { t_max: radius, points: 41 };
    let exact = run(&scn, &OPTS).unwrap();
    // order 12 holds across the whole radius; order 8 only over its first half
    for (order, fraction) in [(12, 1.0), (8, 0.5)] {
        let series = run(&scn, &RunOptions { method: Some(Method::Series), order: Some(order), ..OPTS }).unwrap();
        let mut worst: f64 = 0.0;
        for (i, t) in exact.table.times.iter().enumerate() {
            if *t <= fraction * radius {
                for (a, b) in exact.table.columns.iter().zip(&series.table.columns) {
                    worst = worst.max((a[i] - b[i]).abs());
                }
            }
        }
        assert!(worst < 1e-6, "order {order}: series vs exact {worst:e} on [0, {}]", fraction * radius);
    }

    let dir = tempfile::tempdir().unwrap();
    let path = scenarios().join("two-traders-model2.json");
    let out = bin()
        .arg("run")
        .arg(&path)
        .arg("--out")
        .arg(dir.path())
        .args(["--method", "series", "--order", "4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(String::from_utf8(out.stdout).unwrap().contains("radius_hint"));
}

#[test]
fn shipped_scenarios_run() {
    for entry in std::fs::read_dir(scenarios()).unwrap() {
        let path = entry.unwrap().path();
        let scn = Scenario::load(&path).unwrap();
        let out = run(&scn, &OPTS).unwrap();
        assert_eq!(out.table.channels, scn.outputs);
        assert!(out.report.passed(), "{}", path.display());
        assert_eq!(Scenario::from_json(&scn.to_json()).unwrap(), scn);
    }
}

fn random_scenario(rng: &mut StdRng) -> Scenario {
    let l = rng.gen_range(1..=4);
    let mut p = vec![vec![0.0; l]; l];
    for i in 0..l {
        for j in i + 1..l {
            let v = if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..3.0) };
            p[i][j] = v;
            p[j][i] = v;
        }
    }
    let spec = Model1Spec {
        alpha: (0..l).map(|_| rng.gen_range(-10.0..10.0)).collect(),
        p,
        initial_n: (0..l).map(|_| rng.gen_range(0..50)).collect(),
        price_m: rng.gen_range(0..5),
        epsilon: rng.gen_range(0.01..5.0),
    };
    let mut outputs: Vec<String> = (1..=l).map(|j| format!("n{j}")).collect();
    outputs.push("N".into());
    Scenario {
        name: rng.gen_bool(0.5).then(|| format!("s{}", rng.gen_range(0..1000))),
        model: ModelSpec::Model1(spec),
        time: TimeSpec { t_max: rng.gen_range(0.1..100.0), points: rng.gen_range(2..1000) },
        outputs,
        method: [None, Some(Method::Exact), Some(Method::Onebody)][rng.gen_range(0..3)],
        order: None,
        test_hooks: None,
    }
}

#[test]
fn scenario_serialization_round_trips() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..300 {
        let s = random_scenario(&mut rng);
        let once = s.to_json();
        let parsed = Scenario::from_json(&once).unwrap();
        assert_eq!(parsed, s);
        assert_eq!(parsed.to_json(), once);
    }
}
