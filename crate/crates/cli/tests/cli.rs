//! Black-box tests of the `nichewave` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

/// Copies `config` (optionally edited) into a fresh directory and runs `command` on it.
fn run(command: &str, config: &str, edit: impl Fn(String) -> String) -> (Output, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let text = edit(fs::read_to_string(configs().join(config)).unwrap());
    let path = dir.path().join(config);
    fs::write(&path, text).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_nichewave"))
        .arg(command)
        .arg(&path)
        .env("NICHEWAVE_WORKERS", "1")
        .output()
        .unwrap();
    (out, dir)
}

fn artifact(dir: &tempfile::TempDir, name: &str) -> String {
    fs::read_to_string(dir.path().join("out").join(name)).unwrap()
}

#[test]
fn torus_spectrum_is_exact() {
    let (out, dir) = run("spectrum", "torus.toml", |s| s);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_str(&artifact(&dir, "spectrum-torus.json")).unwrap();
    assert_eq!(json["schema"], 1);
    assert!((json["value"].as_f64().unwrap() + 0.7).abs() <= 1e-10);
}

#[test]
fn negative_kernel_sample_is_a_config_error() {
    let (out, _dir) = run("validate", "torus.toml", |s| {
        s.replace(
            "family = \"tent\"\nradius = 1.0",
            "family = \"tabulated\"\noffsets = [-1.0, -0.5, 0.0, 0.5, 1.0]\nvalues = [0.0, 1.0, -0.2, 1.0, 0.0]",
        )
    });
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`kernel`"));
}

#[test]
fn unknown_key_is_named() {
    let (out, _dir) = run("spectrum", "torus.toml", |s| s.replace("spacing = 0.1", "spacing = 0.1\nspaceing = 0.2"));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("spaceing"));
}

#[test]
fn missing_command_section_is_named() {
    let (out, _dir) = run("ess", "torus.toml", |s| s);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`ess`"));
}

#[test]
fn invalid_parameter_names_the_key() {
    let (out, _dir) = run("spectrum", "torus.toml", |s| s.replace("spacing = 0.1", "spacing = -0.1"));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("spacing"), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn reruns_are_byte_identical() {
    for command in ["evolve", "ess"] {
        let (a, da) = run(command, "bump.toml", |s| s.replace("spacing = 0.05", "spacing = 0.1"));
        let (b, db) = run(command, "bump.toml", |s| s.replace("spacing = 0.05", "spacing = 0.1"));
        assert!(a.status.success() && b.status.success());
        for ext in ["csv", "json"] {
            let name = format!("{command}-bump.{ext}");
            assert_eq!(artifact(&da, &name), artifact(&db, &name));
        }
    }
}

#[test]
fn local_limit_sweep_errors_decrease() {
    let (out, dir) = run("sweep", "local_limit.toml", |s| s);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = artifact(&dir, "sweep-local-limit.csv");
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "err_target").unwrap();
    let errs: Vec<f64> = lines.map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect();
    assert_eq!(errs.len(), 4);
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
}
