use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nsfp::checkpoint;
use nsfp::config::RunConfig;

fn nsfp(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsfp")).current_dir(dir).args(args).output().expect("binary runs")
}

fn short_config(dir: &Path, t_end: f64) {
    let text = RunConfig::default().to_toml();
    let text = text
        .replace("nx = 32\nnm = 32", "nx = 16\nnm = 16")
        .replace("t_end = 1.0", &format!("t_end = {t_end:?}"))
        .replace("diag_every = 10", "diag_every = 2")
        .replace("checkpoint_every = 10", "checkpoint_every = 1");
    fs::write(dir.join("c.toml"), text).unwrap();
}

#[test]
fn init_config_protects_existing_files() {
    let tmp = tempfile::tempdir().unwrap();
    let out = nsfp(tmp.path(), &["init-config", "--config", "c.toml"]);
    assert!(out.status.success());
    let written = fs::read_to_string(tmp.path().join("c.toml")).unwrap();
    assert_eq!(RunConfig::from_toml(&written).unwrap(), RunConfig::default());

    fs::write(tmp.path().join("c.toml"), "# mine\n").unwrap();
    let out = nsfp(tmp.path(), &["init-config", "--config", "c.toml"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(fs::read_to_string(tmp.path().join("c.toml")).unwrap(), "# mine\n");
    let out = nsfp(tmp.path(), &["init-config", "--config", "c.toml", "--force"]);
    assert!(out.status.success());
}

#[test]
fn zero_length_run_writes_one_record() {
    let tmp = tempfile::tempdir().unwrap();
    short_config(tmp.path(), 0.0);
    let out = nsfp(tmp.path(), &["run", "--config", "c.toml"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(tmp.path().join("output/diagnostics.csv")).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("t,kinetic_energy,"));
    assert!(lines[1].starts_with("0.0000000000000000e0,"));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("output/diagnostics.json")).unwrap()).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 1);
    // a lone record has no balance residual
    assert!(json[0]["balance_residual"].is_null());
    assert!(tmp.path().join("output/checkpoints/ckpt_000000.nsfp").exists());
}

#[test]
fn runs_are_reproducible_and_checkpoints_rediagnose() {
    let tmp = tempfile::tempdir().unwrap();
    short_config(tmp.path(), 0.01);
    for threads in ["1", "2"] {
        let out = nsfp(tmp.path(), &["--threads", threads, "run", "--config", "c.toml"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        fs::rename(tmp.path().join("output"), tmp.path().join(format!("out{threads}"))).unwrap();
    }
    let a = fs::read(tmp.path().join("out1/diagnostics.csv")).unwrap();
    let b = fs::read(tmp.path().join("out2/diagnostics.csv")).unwrap();
    assert_eq!(a, b);

    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("out1/diagnostics.json")).unwrap()).unwrap();
    let records = json.as_array().unwrap();
    assert_eq!(records.len(), 6);
    for (i, rec) in records.iter().enumerate() {
        let ck = tmp.path().join(format!("out1/checkpoints/ckpt_{i:06}.nsfp"));
        let out = nsfp(tmp.path(), &["diagnose", ck.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let again: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(&again, rec, "record {i}");
    }
}

#[test]
fn seed_flag_changes_the_initial_data() {
    let tmp = tempfile::tempdir().unwrap();
    short_config(tmp.path(), 0.0);
    let first = |seed: &str| {
        let out = nsfp(tmp.path(), &["--seed", seed, "run", "--config", "c.toml"]);
        assert!(out.status.success());
        fs::read_to_string(tmp.path().join("output/diagnostics.csv")).unwrap()
    };
    assert_ne!(first("1"), first("2"));
    assert_eq!(first("3"), first("3"));
}

#[test]
fn damaged_checkpoint_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    short_config(tmp.path(), 0.0);
    assert!(nsfp(tmp.path(), &["run", "--config", "c.toml"]).status.success());
    let ck = tmp.path().join("output/checkpoints/ckpt_000000.nsfp");
    let bytes = fs::read(&ck).unwrap();
    fs::write(&ck, &bytes[..bytes.len() / 2]).unwrap();
    let out = nsfp(tmp.path(), &["diagnose", ck.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("truncated"));
    assert!(checkpoint::read(&ck).is_err());

    let out = nsfp(tmp.path(), &["diagnose", "missing.nsfp"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn invalid_configuration_exits_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    short_config(tmp.path(), 0.0);
    let text = fs::read_to_string(tmp.path().join("c.toml")).unwrap().replace("q = 4.0", "q = 2.0");
    fs::write(tmp.path().join("c.toml"), text).unwrap();
    let out = nsfp(tmp.path(), &["run", "--config", "c.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("q ≥ 4"));
    assert!(!tmp.path().join("output").exists());

    fs::write(tmp.path().join("c.toml"), "[grid]\nnx = 7\n").unwrap();
    assert_eq!(nsfp(tmp.path(), &["run", "--config", "c.toml"]).status.code(), Some(2));
    fs::write(tmp.path().join("c.toml"), "[grid]\nbogus = 1\n").unwrap();
    assert_eq!(nsfp(tmp.path(), &["run", "--config", "c.toml"]).status.code(), Some(2));
}

#[test]
fn cfl_violation_exits_with_three() {
    let tmp = tempfile::tempdir().unwrap();
    short_config(tmp.path(), 1.0);
    let text = fs::read_to_string(tmp.path().join("c.toml")).unwrap().replace("dt = 0.001", "dt = 0.5");
    fs::write(tmp.path().join("c.toml"), text).unwrap();
    let out = nsfp(tmp.path(), &["run", "--config", "c.toml"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn lab_writes_rows_and_summary() {
    let tmp = tempfile::tempdir().unwrap();
    short_config(tmp.path(), 0.0);
    let text = fs::read_to_string(tmp.path().join("c.toml"))
        .unwrap()
        .replace("nx = 64", "nx = 32")
        .replace("family = \"standard\"", "family = \"modes\"");
    fs::write(tmp.path().join("c.toml"), text).unwrap();
    let out = nsfp(tmp.path(), &["verify-inequalities", "--config", "c.toml"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = fs::read_to_string(tmp.path().join("lab/lab_rows.csv")).unwrap();
    assert!(rows.starts_with("function,inequality,r,block,ratio\n"));
    assert!(rows.contains("\"mode(3,1)\",bernstein_high"));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("lab/lab_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["family"], "modes");
    assert_eq!(summary["summary"].as_array().unwrap().len(), 15);

    let text = fs::read_to_string(tmp.path().join("c.toml"))
        .unwrap()
        .replace("modes = [[1, 0], [0, 2], [3, 1]]", "modes = []");
    fs::write(tmp.path().join("c.toml"), text).unwrap();
    assert_eq!(nsfp(tmp.path(), &["verify-inequalities", "--config", "c.toml"]).status.code(), Some(2));
}

#[test]
fn custom_model_survives_checkpoint() {
    let tmp = tempfile::tempdir().unwrap();
    short_config(tmp.path(), 0.004);
    let text = fs::read_to_string(tmp.path().join("c.toml")).unwrap().replace(
        "q = 4.0",
        "q = 4.0\nkernel = [0.1, 0.3, -0.4]\n\n[model.coefficients]\nc12 = { constant = 0.5, cos = [0.2, 0.5] }\nc21 = { sin = [0.1] }",
    );
    fs::write(tmp.path().join("c.toml"), text).unwrap();
    let out = nsfp(tmp.path(), &["run", "--config", "c.toml"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("output/diagnostics.json")).unwrap()).unwrap();
    let last = json.as_array().unwrap().last().unwrap().clone();
    let ck = checkpoint::read(&tmp.path().join("output/checkpoints/ckpt_000002.nsfp")).unwrap();
    assert_eq!(ck.header.params.kernel.as_deref(), Some(&[0.1, 0.3, -0.4][..]));
    let out = nsfp(tmp.path(), &["diagnose", "output/checkpoints/ckpt_000002.nsfp"]);
    assert!(out.status.success());
    let again: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(again, last);
}
