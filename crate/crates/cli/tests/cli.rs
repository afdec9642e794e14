use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};
use tempfile::TempDir;

fn giant_atom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_giant-atom"))
        .args(args)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .env_remove("GIANT_ATOM_THREADS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = giant_atom(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn real(s: &str) -> f64 {
    s.parse().unwrap()
}

fn dir_str(d: &TempDir, sub: &str) -> String {
    d.path().join(sub).to_str().unwrap().to_string()
}

#[test]
fn simulate_traps_population() {
    let tmp = TempDir::new().unwrap();
    let out = dir_str(&tmp, "run");
    let summary = ok(&[
        "simulate",
        "--n-legs",
        "3",
        "--gamma-tau-2pi",
        "0.018",
        "--omega-tau-2pi",
        "0.317",
        "--t-max",
        "200",
        "--sample-every",
        "64",
        "--out-dir",
        &out,
    ]);
    assert_eq!(summary.lines().count(), 1);
    let (header, rows) = read_csv(&tmp.path().join("run/beta.csv"));
    assert_eq!(header, ["t", "re_beta", "im_beta", "prob"]);
    let last = rows.last().unwrap();
    assert_eq!(real(&last[0]), 200.0);
    let prob = real(&last[3]);
    assert!((prob - 0.6651).abs() < 0.01 * 0.6651, "{prob}");
}

#[test]
fn zero_t_max_is_a_usage_error() {
    let tmp = TempDir::new().unwrap();
    let out = giant_atom(&[
        "simulate",
        "--n-legs",
        "3",
        "--gamma-tau-2pi",
        "0.018",
        "--dark-n",
        "1",
        "--t-max",
        "0",
        "--out-dir",
        &dir_str(&tmp, "run"),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("t_max"));
}

#[test]
fn missing_and_unknown_flags_exit_2() {
    let tmp = TempDir::new().unwrap();
    let out = giant_atom(&[
        "simulate",
        "--n-legs",
        "3",
        "--out-dir",
        &dir_str(&tmp, "a"),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = giant_atom(&[
        "scan",
        "--n-legs",
        "3",
        "--bogus",
        "--out-dir",
        &dir_str(&tmp, "b"),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_giant-atom"))
        .args(["scan", "--n-legs", "3", "--out-dir", &dir_str(&tmp, "c")])
        .env("GIANT_ATOM_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_1() {
    let tmp = TempDir::new().unwrap();
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = giant_atom(&[
        "scan",
        "--n-legs",
        "3",
        "--out-dir",
        blocker.join("sub").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn two_legs_pair_search_exits_3() {
    let tmp = TempDir::new().unwrap();
    let out = giant_atom(&[
        "dark-search",
        "--n-legs",
        "2",
        "--out-dir",
        &dir_str(&tmp, "run"),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("N >= 3"));
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let tmp = TempDir::new().unwrap();
    let run = |sub: &str, threads: &str| {
        let out = dir_str(&tmp, sub);
        ok(&[
            "--threads",
            threads,
            "poles",
            "--n-legs",
            "3",
            "--gamma-tau-2pi",
            "0.073",
            "--dark-n",
            "4",
            "--re-min",
            "-6",
            "--out-dir",
            &out,
        ]);
        ok(&[
            "--threads",
            threads,
            "simulate",
            "--n-legs",
            "4",
            "--gamma-tau-2pi",
            "0.05",
            "--omega-tau-2pi",
            "1.3",
            "--t-max",
            "6",
            "--field",
            "--field-dt",
            "2",
            "--out-dir",
            &format!("{out}-sim"),
        ]);
        out
    };
    let a = run("a", "1");
    let b = run("b", "3");
    let c = run("c", "1");
    for suffix in ["", "-sim"] {
        let mut names: Vec<_> = fs::read_dir(format!("{a}{suffix}"))
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        assert!(names.len() >= 2);
        for name in names {
            let bytes =
                |dir: &str| fs::read(Path::new(&format!("{dir}{suffix}")).join(&name)).unwrap();
            assert_eq!(
                bytes(&a),
                bytes(&b),
                "{name:?} differs between thread counts"
            );
            assert_eq!(bytes(&a), bytes(&c), "{name:?} differs between reruns");
        }
    }
}

#[test]
fn manifest_lists_outputs_with_checksums() {
    let tmp = TempDir::new().unwrap();
    let out = dir_str(&tmp, "run");
    ok(&["scan", "--n-legs", "4", "--out-dir", &out]);
    let manifest: Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("run/manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["params"]["n_legs"], 4);
    assert_eq!(manifest["params"]["command"], "scan");
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(manifest["created_at"], "2023-11-14T22:13:20Z");
    let outputs = manifest["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 2);
    for entry in outputs {
        let path = tmp.path().join("run").join(entry["path"].as_str().unwrap());
        let digest = hex::encode(Sha256::digest(fs::read(path).unwrap()));
        assert_eq!(entry["sha256"], digest.as_str());
    }
}

#[test]
fn scan_lattice_is_two_pi_periodic() {
    let tmp = TempDir::new().unwrap();
    let out = dir_str(&tmp, "run");
    ok(&[
        "scan",
        "--n-legs",
        "3",
        "--omega-tau-2pi-max",
        "10",
        "--out-dir",
        &out,
    ]);
    let (header, rows) = read_csv(&tmp.path().join("run/dots.csv"));
    assert_eq!(
        header,
        [
            "omega_tau_2pi",
            "gamma_tau_2pi",
            "n1",
            "n2",
            "osc_amplitude",
            "rwa_ok"
        ]
    );
    let dots: Vec<(f64, f64, i64, i64)> = rows
        .iter()
        .map(|r| {
            (
                real(&r[0]),
                real(&r[1]),
                r[2].parse().unwrap(),
                r[3].parse().unwrap(),
            )
        })
        .collect();
    assert!(!dots.is_empty());
    let mut shifted = 0;
    for &(w, g, n1, n2) in &dots {
        if w + 1.0 > 10.0 {
            continue;
        }
        // one period in Ωτ/2π moves both mode indices by N
        let partner = dots
            .iter()
            .find(|d| d.2 == n1 + 3 && d.3 == n2 + 3)
            .unwrap_or_else(|| panic!("no partner for ({n1}, {n2})"));
        assert_eq!(partner.1, g);
        assert!((partner.0 - w - 1.0).abs() < 1e-14);
        shifted += 1;
    }
    assert!(shifted > 5);

    let (_, lines) = read_csv(&tmp.path().join("run/lines.csv"));
    assert!(!lines.is_empty());
}

#[test]
fn field_profile_matches_stationary_field() {
    let tmp = TempDir::new().unwrap();
    let out = dir_str(&tmp, "run");
    ok(&[
        "field",
        "--n-legs",
        "3",
        "--gamma-tau-2pi",
        "0.018",
        "--dark-n",
        "1",
        "--dx",
        "0.01",
        "--out-dir",
        &out,
    ]);
    let (header, rows) = read_csv(&tmp.path().join("run/profile.csv"));
    assert_eq!(header, ["x", "p"]);
    assert_eq!(rows.len(), 201);

    // (γ/2)|A Σ_m e^{iΩ_1|x - x_m|}|² with Ω_1 = 2π/3
    let g = 2.0 * PI * 0.018;
    let s2 = (PI / 3.0).sin().powi(2);
    let a = 2.0 * s2 / (2.0 * s2 + 3.0 * g);
    let k = 2.0 * PI / 3.0;
    for r in &rows {
        let (x, p) = (real(&r[0]), real(&r[1]));
        let (mut re, mut im) = (0.0, 0.0);
        for m in 0..3 {
            let d = (x - m as f64).abs();
            re += (k * d).cos();
            im += (k * d).sin();
        }
        let expected = 0.5 * g * a * a * (re * re + im * im);
        assert!((p - expected).abs() < 1e-13, "x = {x}: {p} vs {expected}");
    }
}

#[test]
fn continuum_profile_is_sin4() {
    let tmp = TempDir::new().unwrap();
    let out = dir_str(&tmp, "run");
    let summary = ok(&["continuum", "--n", "1", "--length", "2", "--out-dir", &out]);
    assert!(summary.contains("0.375000"));
    let (_, rows) = read_csv(&tmp.path().join("run/continuum_profile.csv"));
    assert_eq!(rows.len(), 401);
    // at the intensity maximum u = 1: p = (1/4)(4/L) sin⁴(πx/L)
    for r in &rows {
        let (x, p) = (real(&r[0]), real(&r[1]));
        let expected = 0.5 * (PI * x / 2.0).sin().powi(4);
        assert!((p - expected).abs() < 1e-15, "x = {x}");
    }
}

#[test]
fn continuum_comb_record() {
    let tmp = TempDir::new().unwrap();
    let out = dir_str(&tmp, "run");
    ok(&[
        "continuum",
        "--n",
        "1",
        "--comb-n-legs",
        "40",
        "--out-dir",
        &out,
    ]);
    let (header, rows) = read_csv(&tmp.path().join("run/comb.csv"));
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    assert_eq!(rows[0][col("n1")], "41");
    assert_eq!(rows[0][col("n2")], "39");
    assert_eq!(real(&rows[0][col("omega_tau_2pi")]), 1.0);
    let ratio = real(&rows[0][col("gamma_t")]) / real(&rows[0][col("gamma_t_limit")]);
    assert!((ratio - 1.0).abs() < 1e-2);

    let bad = giant_atom(&[
        "continuum",
        "--n",
        "20",
        "--comb-n-legs",
        "40",
        "--out-dir",
        &out,
    ]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn dark_search_lists_pair_551() {
    let tmp = TempDir::new().unwrap();
    let out = dir_str(&tmp, "run");
    ok(&[
        "dark-search",
        "--n-legs",
        "3",
        "--p-max",
        "5",
        "--q-max",
        "5",
        "--out-dir",
        &out,
    ]);
    let (header, rows) = read_csv(&tmp.path().join("run/pairs.csv"));
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let row = rows
        .iter()
        .find(|r| r[col("n1")] == "16" && r[col("n2")] == "14")
        .unwrap();
    assert_eq!(real(&row[col("omega_tau_2pi")]), 5.0);
    assert!((real(&row[col("gamma_tau_2pi")]) - 0.3849001794597504).abs() < 1e-12);
    assert!((real(&row[col("beat")]) - 4.0 * PI / 3.0).abs() < 1e-12);
}
