use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use proptest::prelude::*;
use rdi::cli::{config_from_report, execute, fmt_sig, CommandKind, RunConfig};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn rdi(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_rdi")).args(args).output().unwrap()
}

fn run_config(command: &str, config: &Path, out: &Path, extra: &[&str]) -> std::process::Output {
    let mut args = vec![command, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    rdi(&args)
}

#[test]
fn shipped_configs_parse() {
    for entry in fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        RunConfig::from_json(&fs::read_to_string(&path).unwrap()).unwrap_or_else(|e| panic!("{path:?}: {e}"));
    }
}

#[test]
fn sweep_writes_csv_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config("sweep", &configs().join("sweep_erased_y.json"), dir.path(), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("D,R,Delta"));
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        if v[0] >= 0.4 - 1e-12 {
            assert!((v[2] - 0.029049).abs() < 1e-6);
        }
    }
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("sweep.json")).unwrap()).unwrap();
    let meta = &report["metadata"];
    for key in ["case", "params", "timestamp_unix", "version", "seed"] {
        assert!(meta.get(key).is_some(), "metadata lacks {key}");
    }
    assert_eq!(meta["case"], "erased-y-hamming");
    assert_eq!(report["checks"]["kinks"], 1);
}

#[test]
fn gaussian_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("g.json");
    fs::write(
        &cfg,
        r#"{"source": {"gaussian": {"ordering": "W-Z-X-Y", "var_w": 1, "var_a": 1, "var_b": 1, "var_c": 1}},
            "d": [0.5], "rh": [0.5]}"#,
    )
    .unwrap();
    let out = run_config("gaussian", &cfg, &dir.path().join("o"), &[]);
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("o/gaussian.csv")).unwrap();
    assert_eq!(csv, "D,R,Delta,Rh\n0.5,0.292481250361,0.292481250361,0.5\n");
}

#[test]
fn validation_error_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(
        &cfg,
        r#"{"source": {"erasure": {"case": "erased-y-hamming", "params": {"p_e": 0.8, "q": 0.5}}}, "d": [0.3, 0.2]}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = run_config("sweep", &cfg, &out_dir, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_dir.exists());
    fs::write(&cfg, r#"{"bogus": true}"#).unwrap();
    assert_eq!(run_config("sweep", &cfg, &out_dir, &[]).status.code(), Some(2));
    let sim = run_config("simulate", &configs().join("region_bsc_chain.json"), &out_dir, &[]);
    assert_eq!(sim.status.code(), Some(2), "command mismatch");
    assert!(!out_dir.exists());
}

#[test]
fn infeasible_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("inf.json");
    fs::write(
        &cfg,
        r#"{"source": {"pmf": {"axes": [{"name": "X", "size": 2}, {"name": "Y", "size": 1}, {"name": "Z", "size": 1}],
                                "probs": [0.5, 0.5]}},
            "setting": "open-markov",
            "distortion": {"kind": "matrix", "matrix": [[0.2, 1.0], [1.0, 0.2]]},
            "d": [0.1]}"#,
    )
    .unwrap();
    let out = run_config("region", &cfg, &dir.path().join("o"), &[]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!dir.path().join("o").exists());
}

#[test]
fn seed_is_required_for_stochastic_commands() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(configs().join("simulate_bsc_chain.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v.as_object_mut().unwrap().remove("seed");
    let cfg = dir.path().join("s.json");
    fs::write(&cfg, v.to_string()).unwrap();
    assert_eq!(run_config("simulate", &cfg, &dir.path().join("o"), &[]).status.code(), Some(2));
    let with_flag = run_config("simulate", &cfg, &dir.path().join("o"), &["--seed", "4"]);
    assert!(with_flag.status.success(), "{}", String::from_utf8_lossy(&with_flag.stderr));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, file, csv) in [
        ("region", "region_bsc_chain.json", "region.csv"),
        ("simulate", "simulate_bsc_chain.json", "simulate.csv"),
        ("verify-lemma", "lemma_codeword.json", "verify-lemma.csv"),
        ("reproduce", "fig4.json", "fig4_logloss-closed.csv"),
    ] {
        let a = dir.path().join(format!("{cmd}-a"));
        let b = dir.path().join(format!("{cmd}-b"));
        assert!(run_config(cmd, &configs().join(file), &a, &[]).status.success());
        assert!(run_config(cmd, &configs().join(file), &b, &[]).status.success());
        assert_eq!(fs::read(a.join(csv)).unwrap(), fs::read(b.join(csv)).unwrap(), "{cmd}");
    }
}

#[test]
fn report_round_trip() {
    let text = fs::read_to_string(configs().join("region_bsc_chain.json")).unwrap();
    let first = execute(CommandKind::Region, RunConfig::from_json(&text).unwrap(), None).unwrap();
    let report = std::str::from_utf8(first.get("region.json").unwrap()).unwrap();
    let (command, config) = config_from_report(report).unwrap();
    let second = execute(command, config, None).unwrap();
    assert_eq!(first.get("region.csv"), second.get("region.csv"));
    let a: serde_json::Value = serde_json::from_str(report).unwrap();
    let b: serde_json::Value = serde_json::from_slice(second.get("region.json").unwrap()).unwrap();
    assert_eq!(a["points"], b["points"]);
    assert_eq!(a["bounds"], b["bounds"]);
}

#[test]
fn reproduce_writes_plot_stub() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config("reproduce", &configs().join("fig3.json"), dir.path(), &[]);
    assert!(out.status.success());
    let names: Vec<String> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    assert_eq!(names.iter().filter(|n| n.ends_with(".csv")).count(), 2);
    assert!(names.iter().any(|n| n == "plot_fig3.py"));
    assert!(!names.iter().any(|n| n.contains(".tmp")));
}

proptest! {
    #[test]
    fn formatted_numbers_keep_twelve_digits(v in -1e6f64..1e6) {
        let s = fmt_sig(v);
        let back: f64 = s.parse().unwrap();
        prop_assert!((back - v).abs() <= 5e-12 * v.abs().max(1e-300));
        let digits = s.trim_start_matches('-').replace('.', "").trim_start_matches('0').trim_end_matches('0').len();
        prop_assert!(digits <= 12, "{}", s);
    }
}
