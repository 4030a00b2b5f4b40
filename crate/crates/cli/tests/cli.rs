use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::{json, Value};

use scrap_fwm_cli::{run_value, CliError};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_scrap-fwm"))
}

fn run_in(dir: &Path, cfg: Value) -> Result<Option<scrap_fwm_cli::Manifest>, CliError> {
    let mut cfg = cfg;
    cfg["schema"] = json!(1);
    cfg["out"] = json!(dir);
    run_value(&cfg, &mut Vec::new())
}

fn last_row(path: &Path) -> Vec<f64> {
    let text = fs::read_to_string(path).unwrap();
    text.lines().last().unwrap().split(',').map(|x| x.parse().unwrap()).collect()
}

#[test]
fn fig4_solid_trajectory_ends_at_half_coherence() {
    let dir = tempfile::tempdir().unwrap();
    let m = run_in(dir.path(), json!({"command": "dynamics", "preset": "fig4_solid"})).unwrap().unwrap();
    assert_eq!(m.files, vec!["trajectory.csv", "stats.json"]);
    let header = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert!(header.starts_with("T,r_n,Re(r_gn),Im(r_gn),|r_gn|,Omega_St,r1_abs\n"));
    let row = last_row(&dir.path().join("trajectory.csv"));
    assert!((row[4] - 0.5).abs() < 1e-3, "{}", row[4]);
    let manifest: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn identical_configs_give_identical_bytes() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let cfg = json!({"command": "scan", "preset": "fig5_a", "axes": [{"name": "S", "lo": 6.7, "hi": 8.1, "n": 5}]});
    let ma = run_in(a.path(), cfg.clone()).unwrap().unwrap();
    let mb = run_in(b.path(), cfg.clone()).unwrap().unwrap();
    assert_eq!(ma.config_hash, mb.config_hash);
    for f in ["scan.csv", "manifest.json"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    // overwriting in place keeps the bytes
    run_in(a.path(), cfg).unwrap();
    assert_eq!(fs::read(a.path().join("scan.csv")).unwrap(), fs::read(b.path().join("scan.csv")).unwrap());
}

#[test]
fn fig5_scan_table() {
    let dir = tempfile::tempdir().unwrap();
    let out =
        bin().args(["scan", "--preset", "fig5_a", "--axis", "S:6.7:8.1:15", "--out"]).arg(dir.path()).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("scan.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "S,final_r_n,final_|r_gn|,max_|r_gn|");
    assert_eq!(lines.len(), 16);
    let s: Vec<f64> = lines[1..].iter().map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert!(s.windows(2).all(|w| w[0] < w[1]));
    assert_eq!((s[0], s[14]), (6.7, 8.1));
    // the three curves of the robustness figure all end near maximum coherence
    for l in &lines[1..] {
        let coh: f64 = l.split(',').nth(2).unwrap().parse().unwrap();
        assert!(coh > 0.48, "{l}");
    }
}

#[test]
fn two_axis_scan_has_one_row_per_combination() {
    let dir = tempfile::tempdir().unwrap();
    run_in(
        dir.path(),
        json!({"command": "scan", "preset": "fig4_solid", "grid": {"t_start": -4.0, "t_end": 4.0, "n_samples": 41},
               "axes": [{"name": "delta", "lo": -1.0, "hi": 1.0, "n": 3}, {"name": "R", "lo": 0.5, "hi": 1.0, "n": 4}]}),
    )
    .unwrap();
    let text = fs::read_to_string(dir.path().join("scan.csv")).unwrap();
    let rows: Vec<Vec<f64>> =
        text.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 12);
    let keys: Vec<(f64, f64)> = rows.iter().map(|r| (r[0], r[1])).collect();
    let mut sorted = keys.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(keys, sorted);
}

#[test]
fn short_propagation_writes_metrics_and_slices() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["propagate", "--preset", "fig17a", "--snapshots", "0,1e4,2e4", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let metrics = fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
    assert!(metrics.starts_with("Z,eps_ph_g1,eps_ph_g2,eps_ph_gmix,wph_g2,wph_gmix,g1_energy_ratio\n"));
    assert_eq!(metrics.lines().count(), 4);
    for z in ["0.0000e0", "1.0000e4", "2.0000e4"] {
        let snap = fs::read_to_string(dir.path().join(format!("snapshot_Z{z}.csv"))).unwrap();
        assert!(snap.starts_with("T,|g1|^2,|g2|^2,|gmix|^2,r_n,|r_gn|\n"));
        assert_eq!(snap.lines().count(), 513);
    }
    let manifest: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("propagation.json")).unwrap()).unwrap();
    assert_eq!(manifest["mode"], "difference");
    assert_eq!(manifest["Z"], json!([0.0, 1e4, 2e4]));
}

#[test]
fn oracle_command_reports_errors() {
    let dir = tempfile::tempdir().unwrap();
    run_in(dir.path(), json!({"command": "oracle", "preset": "oracle_pi_half", "grid": {"t_start": -4.0, "t_end": 4.0, "n_samples": 201}}))
        .unwrap();
    let rep: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("oracle.json")).unwrap()).unwrap();
    assert!(rep["max_pop_err"].as_f64().unwrap() < 0.02);
    assert_eq!(rep["adiabatic"], "ok");
}

#[test]
fn exit_codes() {
    let out = bin().args(["dynamics", "--preset", "fig4_sold"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("preset") && err.contains("fig4_solid"), "{err}");

    let out = bin().args(["propagate", "--preset", "fig4_solid", "--mode", "sum"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("mode") && err.contains("preset"), "{err}");

    // a pump far too strong for the step ceiling is a numerical failure
    let dir = tempfile::tempdir().unwrap();
    let inline = dir.path().join("inline.json");
    fs::write(
        &inline,
        r#"{"kind":"dynamics","drive":{"delta":0.0,"pump":{"amplitude":1e300},"stark":{"amplitude":1e300}}}"#,
    )
    .unwrap();
    let out = bin().args(["dynamics", "--inline"]).arg(&inline).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));

    let out = bin().arg("list-presets").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).lines().any(|l| l.starts_with("fig17a\t")));
}

#[test]
fn config_file_and_flags_merge() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"schema":1,"command":"scan","preset":"fig6_a_solid","tol":1e-7}"#).unwrap();
    let out = bin()
        .args(["dynamics", "--config"])
        .arg(&cfg)
        .args(["--grid", "-4:8:301", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert_eq!(text.lines().count(), 302);
}
