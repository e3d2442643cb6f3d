use std::path::PathBuf;
use std::process::Command;

use systole_cli::{content_hash, execute, ConfigFile, ExperimentConfig, Mode};
use systole_core::Error;

const GIT_SHA256_HELLO: &str = "8aec4e4876f854f688d0ebfc8f37598f38e5fd6903cccc850ca36591175aeb60";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_systole"))
}

fn tmp(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("systole-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    d
}

#[test]
fn igf_exact_residuals_are_zero() {
    let cfg = ExperimentConfig { experiment: "igf".into(), degree: 1, count: 4, ..Default::default() };
    let o = execute(&cfg).unwrap();
    assert!(o.pass);
    assert!(o.rows.iter().all(|r| r[3].parse::<f64>().unwrap() == 0.0 && r[4] == "true"));
}

#[test]
fn gauduchon_char_finds_a_witness_for_non_gauduchon_fixture() {
    let cfg = ExperimentConfig {
        experiment: "gauduchon-char".into(),
        fixture: Some("anisotropic-2".into()),
        ..Default::default()
    };
    let o = execute(&cfg).unwrap();
    assert!(o.pass);
    let row = &o.rows[0];
    assert!(row[4].parse::<f64>().unwrap() > 0.0);
    assert_ne!(row[6], row[7]);
}

#[test]
fn config_validation() {
    let bad = |f: &str| serde_json::from_str::<ConfigFile>(f).map_err(|e| e.to_string()).and_then(|c| c.resolve().map_err(|e| e.to_string()));
    assert!(bad(r#"{"experiment": "igf"}"#).is_ok());
    assert!(bad(r#"{"experiment": "nope"}"#).unwrap_err().contains("unknown experiment"));
    assert!(bad(r#"{"experiment": "igf", "n": 4}"#).is_err());
    assert!(bad(r#"{"experiment": "igf", "t_values": []}"#).is_err());
    assert!(bad(r#"{"experiment": "igf", "colour": 1}"#).is_err());
    assert!(bad(r#"{}"#).is_err());
    let file: ConfigFile = serde_json::from_str(r#"{"experiment": "igf", "n": 3, "seed": 9}"#).unwrap();
    let flags = ConfigFile { n: Some(2), mode: Some(Mode::Float), ..Default::default() };
    let c = file.merge(flags).resolve().unwrap();
    assert_eq!((c.n, c.seed, c.mode), (2, 9, Mode::Float));
    let te: ConfigFile = serde_json::from_str(r#"{"experiment": "theorem-e"}"#).unwrap();
    assert_eq!(te.resolve().unwrap().degree, 3);
    let local = ExperimentConfig { experiment: "local-min".into(), n: 3, ..Default::default() };
    assert!(matches!(execute(&local), Err(Error::ConfigInvalid(_))));
}

#[test]
fn hash_is_git_style() {
    // `printf hello | git hash-object --object-format=sha256 --stdin`
    assert_eq!(content_hash(b"hello"), GIT_SHA256_HELLO);
    assert_ne!(content_hash(b"hello\n"), GIT_SHA256_HELLO);
}

#[test]
fn exit_codes_and_artifacts() {
    let out = tmp("codes");
    let cfg = out.join("cfg.json");
    std::fs::create_dir_all(&out).unwrap();
    std::fs::write(&cfg, r#"{"experiment": "hessian", "degree": 1}"#).unwrap();
    let st = bin().args(["run", "--config"]).arg(&cfg).arg("--out").arg(&out).stdout(std::process::Stdio::null()).status().unwrap();
    assert_eq!(st.code(), Some(0));
    let csv = std::fs::read_to_string(out.join("hessian.csv")).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("# threshold:")));
    assert!(csv.contains("eigenvalue,multiplicity,kernel\n"));
    let side: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("hessian.json")).unwrap()).unwrap();
    assert_eq!(side["pass"], true);
    assert_eq!(side["config"]["degree"], 1);
    assert_eq!(side["csv_hash"], content_hash(csv.as_bytes()));

    // two t values far outside the quadratic regime: the fit misses and the run reports a violation
    let st = bin()
        .args(["run", "--experiment", "local-min", "--degree", "1", "--t-values", "0.3,0.1", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(2));
    let st = bin().args(["run", "--experiment", "nope"]).status().unwrap();
    assert_eq!(st.code(), Some(1));
    let st = bin().args(["run", "--experiment", "igf", "--config", "/nonexistent.json"]).status().unwrap();
    assert_eq!(st.code(), Some(1));
    let _ = std::fs::remove_dir_all(&out);
}
