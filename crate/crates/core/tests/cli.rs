use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fohybrid::cli::exit_code;

const SMALL: &str = r#"
[generate]
n = 200

[split]
n_train = 40

[gp]
restarts = 1
max_evals = 300

[uq]
n_samples = 200
n_points = 4
"#;

fn write_config(dir: &Path, extra: &str) -> PathBuf {
    let path = dir.join("run.toml");
    fs::write(
        &path,
        format!("output_dir = {:?}\n{SMALL}{extra}", dir.join("out")),
    )
    .unwrap();
    path
}

fn run(config: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fohybrid"))
        .args(args)
        .arg("--config")
        .arg(config)
        .output()
        .unwrap()
}

fn ok(config: &Path, args: &[&str]) {
    let out = run(config, args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

const PIPELINE: [&str; 6] = [
    "generate",
    "fit",
    "predict",
    "evaluate",
    "validate-uq",
    "sensitivity",
];

#[test]
fn full_pipeline_is_bit_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    for cmd in PIPELINE {
        ok(&cfg, &[cmd]);
    }
    let first = snapshot(&dir.path().join("out"));
    for cmd in PIPELINE {
        ok(&cfg, &[cmd]);
    }
    let second = snapshot(&dir.path().join("out"));
    assert_eq!(first.len(), second.len());
    for ((na, a), (nb, b)) in first.iter().zip(&second) {
        assert_eq!(na, nb);
        assert!(a == b, "{na} differs between runs");
    }
    let names: Vec<&str> = first.iter().map(|(n, _)| n.as_str()).collect();
    for expected in [
        "synthetic.csv",
        "model.json",
        "predictions.csv",
        "metrics.csv",
        "mc_validation.csv",
        "sensitivity.csv",
        "decomposition.csv",
        "fit_manifest.json",
    ] {
        assert!(
            names.contains(&expected),
            "{expected} missing from {names:?}"
        );
    }
}

#[test]
fn floats_use_full_precision_scientific_notation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    ok(&cfg, &["generate"]);
    let text = fs::read_to_string(dir.path().join("out/synthetic.csv")).unwrap();
    let row = text.lines().nth(1).unwrap();
    for field in row.split(',') {
        let (mantissa, _) = field.split_once('e').unwrap();
        assert_eq!(mantissa.split_once('.').unwrap().1.len(), 16, "{field}");
    }
}

#[test]
fn seed_flag_changes_the_data() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    ok(&cfg, &["generate"]);
    let a = fs::read(dir.path().join("out/synthetic.csv")).unwrap();
    ok(&cfg, &["generate", "--seed", "99"]);
    let b = fs::read(dir.path().join("out/synthetic.csv")).unwrap();
    assert_ne!(a, b);
    let manifest = fs::read_to_string(dir.path().join("out/generate_manifest.json")).unwrap();
    assert!(manifest.contains("\"generate\": 99"), "{manifest}");
}

#[test]
fn invalid_range_is_a_config_error_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "\n[generate.ranges]\ncf_in = [0.2, 0.1]\n");
    let out = run(&cfg, &["generate"]);
    assert_eq!(out.status.code(), Some(exit_code::CONFIG));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cf_in"));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn unknown_config_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "\n[physics]\nbogus = 1\n");
    assert_eq!(
        run(&cfg, &["generate"]).status.code(),
        Some(exit_code::CONFIG)
    );
}

#[test]
fn missing_model_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    ok(&cfg, &["generate"]);
    let out = run(&cfg, &["predict", "--model", "/nonexistent/model.json"]);
    assert_eq!(out.status.code(), Some(exit_code::IO));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/model.json"));
}

#[test]
fn corrupted_model_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    ok(&cfg, &["generate"]);
    ok(&cfg, &["fit"]);
    let model = dir.path().join("out/model.json");
    let text = fs::read_to_string(&model).unwrap();
    fs::write(&model, &text[..text.len() / 3]).unwrap();
    assert_eq!(run(&cfg, &["predict"]).status.code(), Some(exit_code::DATA));
}

#[test]
fn evaluate_rejects_a_different_training_split() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    ok(&cfg, &["generate"]);
    ok(&cfg, &["fit"]);
    let other = write_config(dir.path(), "");
    let text = fs::read_to_string(&other)
        .unwrap()
        .replace("n_train = 40", "n_train = 41");
    fs::write(&other, text).unwrap();
    let out = run(&other, &["evaluate"]);
    assert_eq!(out.status.code(), Some(exit_code::DATA));
}

#[test]
fn malformed_dataset_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("bad.csv");
    fs::write(&data, "cf_in,cd_in\n0.1,abc\n").unwrap();
    let cfg = write_config(dir.path(), &format!("\n[dataset]\npath = {data:?}\n"));
    let out = run(&cfg, &["fit"]);
    assert_eq!(
        out.status.code(),
        Some(exit_code::DATA),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(!dir.path().join("out/model.json").exists());
}

#[test]
fn reference_pairs_reproduce_table_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "reference_pairs = [[1.25e-8, 1.28e-8], [0.98e-8, 1.00e-8], [1.55e-8, 1.51e-8]]\n",
    );
    ok(&cfg, &["validate-uq"]);
    let text = fs::read_to_string(dir.path().join("out/mc_validation.csv")).unwrap();
    let col: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(4).unwrap())
        .collect();
    assert_eq!(col, ["2.4", "2.0", "2.6"]);
}

#[test]
fn points_file_drives_predict() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    ok(&cfg, &["generate"]);
    ok(&cfg, &["fit"]);
    let synth = fs::read_to_string(dir.path().join("out/synthetic.csv")).unwrap();
    let points: String = synth
        .lines()
        .take(4)
        .map(|l| l.rsplit_once(',').unwrap().0.to_string() + "\n")
        .collect();
    let pts = dir.path().join("points.csv");
    fs::write(&pts, points).unwrap();
    ok(&cfg, &["predict", "--points", pts.to_str().unwrap()]);
    let text = fs::read_to_string(dir.path().join("out/predictions.csv")).unwrap();
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = fohybrid::cli::RunConfig::load(&path)
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let back = fohybrid::cli::RunConfig::parse(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(back, cfg);
        n += 1;
    }
    assert_eq!(n, 3);
    let default = fohybrid::cli::RunConfig::load(&dir.join("default.toml")).unwrap();
    let mut builtin = fohybrid::cli::RunConfig {
        seed: Some(2024),
        ..Default::default()
    };
    builtin.uq.n_samples = 10_000;
    assert_eq!(default, builtin);
}
