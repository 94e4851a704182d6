//! End-to-end runs of the binary against temporary experiment configs.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_levyfield"))
}

fn write_config(dir: &Path, extra: &str) -> std::path::PathBuf {
    let path = dir.join("exp.toml");
    let base = format!(
        r#"
dimension = 1

[polynomials]
p = "1 + x1"
q = "1"

[triplet]
a = 1.0
gamma = 0.0
[triplet.nu]
family = "finite_atomic"
atoms = []

[grid]
cells = [2048]
spacing = [0.025]

[sim]
seed = 7
streams = 2
delta = 0.01

[output]
dir = "{}"

{extra}
"#,
        dir.join("out").display()
    );
    std::fs::write(&path, base).unwrap();
    path
}

#[test]
fn check_reports_all_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let out = bin().args(["--config"]).arg(&cfg).arg("check").output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    for name in ["strip_holomorphy", "mild", "sufficient_T1", "sufficient_T38", "necessary"] {
        assert!(stdout.contains(name), "missing {name} in:\n{stdout}");
    }
    assert!(dir.path().join("out/check_report.kv").exists());
}

#[test]
fn simulate_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let run = |_: u32| {
        let out = bin().args(["--config"]).arg(&cfg).arg("simulate").output().unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read(dir.path().join("out/field_0.bin")).unwrap()
    };
    let a = run(0);
    let b = run(1);
    assert_eq!(a, b, "same seed must give byte-identical field files");
}

#[test]
fn pair_identity_spde_matches_whitenoise() {
    // p = q = 1, alpha forced to 1: the generalized pairing equals the
    // white-noise pairing
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exp.toml");
    std::fs::write(
        &path,
        format!(
            r#"
dimension = 1
[polynomials]
p = "1"
q = "1"
[triplet]
a = 1.0
gamma = 0.0
[triplet.nu]
family = "finite_atomic"
atoms = []
[grid]
cells = [2048]
spacing = [0.025]
[sim]
seed = 3
streams = 4
delta = 0.01
[options]
alpha = 1
pair_mode = "generalized"
[output]
dir = "{out}"
"#,
            out = dir.path().join("out").display()
        ),
    )
    .unwrap();
    let st = bin().args(["--config"]).arg(&path).arg("pair").status().unwrap();
    assert!(st.success());
    // rerun in whitenoise mode appending to the same log
    let cfg2 = std::fs::read_to_string(&path).unwrap().replace("generalized", "whitenoise");
    std::fs::write(&path, cfg2).unwrap();
    let st = bin().args(["--config"]).arg(&path).arg("pair").status().unwrap();
    assert!(st.success());
    let log = std::fs::read_to_string(dir.path().join("out/pairings.csv")).unwrap();
    let mut gen = Vec::new();
    let mut wn = Vec::new();
    for line in log.lines().filter(|l| !l.starts_with('#') && !l.starts_with("mode")) {
        let parts: Vec<&str> = line.split(',').collect();
        let v: f64 = parts[3].parse().unwrap();
        match parts[0] {
            "generalized" => gen.push(v),
            "whitenoise" => wn.push(v),
            _ => {}
        }
    }
    assert_eq!(gen.len(), 4);
    assert_eq!(wn.len(), 4);
    for (g, w) in gen.iter().zip(&wn) {
        assert!((g - w).abs() <= 1e-10 * w.abs().max(1.0), "{g} vs {w}");
    }
}

#[test]
fn bad_config_exits_2_and_bad_precondition_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.toml");
    let out = bin().args(["--config"]).arg(&missing).arg("check").output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    // delta outside (0, 1] is a configuration error
    let cfg = write_config(dir.path(), "");
    let broken = std::fs::read_to_string(&cfg).unwrap().replace("delta = 0.01", "delta = 7.0");
    std::fs::write(&cfg, broken).unwrap();
    let out = bin().args(["--config"]).arg(&cfg).arg("simulate").output().unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));

    // bump radius larger than the grid: precondition error -> 3
    let cfg2 = write_config(dir.path(), "[options]\nbump_radius = 1000.0\n");
    let out = bin().args(["--config"]).arg(&cfg2).arg("pair").output().unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn env_var_overrides_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let alt = dir.path().join("alt_out");
    let out = bin()
        .env("LEVYFIELD_OUT", &alt)
        .args(["--config"])
        .arg(&cfg)
        .arg("simulate")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(alt.join("field_0.bin").exists());
    assert!(!dir.path().join("out/field_0.bin").exists());
}
