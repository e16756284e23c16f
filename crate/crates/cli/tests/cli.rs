use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn torusops(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_torusops"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) {
    let out = torusops(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn eta_rows(path: &Path) -> Vec<[f64; 5]> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            [v[0], v[1], v[2], v[3], v[4]]
        })
        .collect()
}

#[test]
fn eta_sweep_curve_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&["eta-sweep", "--n", "32", "--eps", "0.5,0.75", "--out", out]);
    let text = fs::read_to_string(dir.path().join("eta_sweep.csv")).unwrap();
    assert!(text.starts_with("eps,alpha,eta_exact,eta_channel,eta_analytic\n"));
    let rows = eta_rows(&dir.path().join("eta_sweep.csv"));
    assert_eq!(rows.len(), 64);
    let (low, high): (Vec<[f64; 5]>, Vec<[f64; 5]>) = rows.iter().partition(|r| r[0] == 0.5);
    for w in low.windows(2) {
        assert!(w[1][2] <= w[0][2] + 1e-12, "not decreasing: {w:?}");
    }
    assert!(low.last().unwrap()[2].abs() < 1e-12);
    for (a, b) in low.iter().zip(&high) {
        assert_eq!(a[1], b[1]);
        assert!(b[2] >= a[2]);
    }
    for r in &rows {
        assert!((r[2] - r[3]).abs() < 1e-10);
    }
}

#[test]
fn eta_sweep_saturates_below_one_over_n() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&[
        "eta-sweep",
        "--n",
        "32",
        "--eps",
        "0.5",
        "--alpha",
        "0.015625",
        "--out",
        out,
    ]);
    let rows = eta_rows(&dir.path().join("eta_sweep.csv"));
    assert!((rows[0][2] - 7.75).abs() < 1e-12);
}

#[test]
fn gamma_map_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&[
        "gamma-map",
        "--n",
        "32",
        "--grid",
        "64x64",
        "--channel",
        r#"{"type":"sdc","eps":0.5,"alpha":0.5}"#,
        "--out",
        out,
    ]);
    let pgm = fs::read_to_string(dir.path().join("gamma_husimi.pgm")).unwrap();
    let mut lines = pgm.lines();
    assert_eq!(lines.next(), Some("P2"));
    assert!(lines.next().unwrap().starts_with("# torusops"));
    assert_eq!(lines.next(), Some("64 64"));
    assert_eq!(lines.next(), Some("255"));
    let levels: Vec<u32> = lines
        .flat_map(|l| l.split(' ').map(|v| v.parse::<u32>().unwrap()))
        .collect();
    assert_eq!(levels.len(), 64 * 64);
    assert!(levels.contains(&0) && levels.contains(&255));
    let summary = json(&dir.path().join("gamma_summary.json"));
    let neg = summary["summary"]["negative_fraction"].as_f64().unwrap();
    assert!((neg - 0.5).abs() < 0.1);
    let csv = fs::read_to_string(dir.path().join("gamma_husimi.csv")).unwrap();
    assert_eq!(csv.lines().count(), 64 * 64 + 1);
}

#[test]
fn unital_gamma_is_mid_gray() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&[
        "gamma-map",
        "--n",
        "16",
        "--grid",
        "8x8",
        "--channel",
        r#"{"type":"rup","sigma":0.1}"#,
        "--out",
        out,
    ]);
    let pgm = fs::read_to_string(dir.path().join("gamma_husimi.pgm")).unwrap();
    assert!(pgm.contains("# constant field"));
    let body: Vec<&str> = pgm.lines().skip(5).collect();
    assert!(body.iter().all(|l| l.split(' ').all(|v| v == "128")));
}

#[test]
fn sloppy_gamma_has_two_opposite_bands() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&[
        "gamma-map",
        "--n",
        "32",
        "--grid",
        "32x64",
        "--channel",
        r#"{"type":"sloppy","delta":0.25}"#,
        "--out",
        out,
    ]);
    let csv = fs::read_to_string(dir.path().join("gamma_husimi.csv")).unwrap();
    let mut profile = vec![0.0; 64];
    for line in csv.lines().skip(1) {
        let v: Vec<&str> = line.split(',').collect();
        let ip: usize = v[1].parse().unwrap();
        profile[ip] += v[4].parse::<f64>().unwrap();
    }
    let (imax, _) = profile
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    let (imin, _) = profile
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    // gain band [1/2 − Δ/2, 1/2), loss band [1 − Δ/2, 1)
    let pmax = (imax as f64 + 0.5) / 64.0;
    let pmin = (imin as f64 + 0.5) / 64.0;
    assert!((0.375..0.5).contains(&pmax), "pmax {pmax}");
    assert!((0.875..1.0).contains(&pmin), "pmin {pmin}");
    // q-independent
    let first_q: Vec<f64> = csv
        .lines()
        .skip(1)
        .take(64)
        .map(|l| l.split(',').nth(4).unwrap().parse().unwrap())
        .collect();
    for (ip, v) in first_q.iter().enumerate() {
        assert!((v * 32.0 - profile[ip]).abs() < 1e-9);
    }
}

#[test]
fn report_examples() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cases = [
        (r#"{"type":"sloppy","n":16,"delta":0.25}"#, 0.25, false),
        (r#"{"type":"rup","n":16,"sigma":0.1}"#, 0.0, true),
        (
            r#"{"type":"sdc","n":16,"eps":0.5,"alpha":0.5}"#,
            0.25,
            false,
        ),
    ];
    for (spec, eta, unital) in cases {
        ok(&["report", "--channel", spec, "--out", out]);
        let r = &json(&dir.path().join("report.json"))["report"];
        assert!((r["eta"].as_f64().unwrap() - eta).abs() < 1e-12, "{spec}");
        assert_eq!(r["unital"].as_bool().unwrap(), unital, "{spec}");
        for key in ["eta_from_purity", "eta_from_affine", "v1_norm_sq"] {
            assert!(
                (r[key].as_f64().unwrap() - eta).abs() < 1e-10,
                "{spec} {key}"
            );
        }
        assert!(r.get("subleading_modulus").is_none());
    }
    ok(&[
        "report",
        "--channel",
        r#"{"type":"sdc","n":8,"eps":1.0,"alpha":0.125}"#,
        "--probes",
        "2",
        "--out",
        out,
    ]);
    let r = &json(&dir.path().join("report.json"))["report"];
    assert!(r["subleading_modulus"].as_f64().unwrap().abs() < 1e-6);
}

#[test]
fn bad_inputs_fail_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for args in [
        vec!["report", "--out", out],
        vec![
            "report",
            "--channel",
            r#"{"type":"sdc","eps":2.0,"alpha":0.5}"#,
            "--out",
            out,
        ],
        vec!["report", "--channel", r#"{"type":"nope"}"#, "--out", out],
        vec!["gamma-map", "--grid", "12", "--out", out],
        vec!["classical", "--grid", "8x7", "--out", out],
        vec!["classical", "--delta", "0", "--out", out],
        vec!["eta-sweep", "--alpha", "1.5", "--out", out],
    ] {
        let res = torusops(&args);
        assert!(!res.status.success(), "{args:?} should fail");
        assert!(!res.stderr.is_empty());
    }
}

#[test]
fn classical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&[
        "classical",
        "--grid",
        "32x32",
        "--trajectories",
        "0",
        "--out",
        out,
    ]);
    let pgm = fs::read_to_string(dir.path().join("classical_hist.pgm")).unwrap();
    assert!(pgm.contains("# constant field"));
    let csv = fs::read_to_string(dir.path().join("classical_hist.csv")).unwrap();
    assert!(csv.starts_with("q_index,p_index,count\n"));
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",0")));

    ok(&[
        "classical",
        "--grid",
        "64x64",
        "--delta",
        "1",
        "--trajectories",
        "200",
        "--steps",
        "1000",
        "--transient",
        "100",
        "--out",
        out,
    ]);
    let s = json(&dir.path().join("classical_summary.json"));
    assert!(s["summary"]["occupied_fraction"].as_f64().unwrap() > 0.5);
}

#[test]
fn compare_checks_grids_and_self_correlation() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    ok(&[
        "classical",
        "--grid",
        "32x32",
        "--trajectories",
        "50",
        "--steps",
        "300",
        "--transient",
        "10",
        "--delta",
        "1",
        "--out",
        a.to_str().unwrap(),
    ]);
    ok(&[
        "classical",
        "--grid",
        "16x16",
        "--trajectories",
        "50",
        "--steps",
        "300",
        "--transient",
        "10",
        "--out",
        b.to_str().unwrap(),
    ]);
    let hist_a = a.join("classical_hist.csv");
    let hist_b = b.join("classical_hist.csv");
    let cmp = dir.path().join("cmp");
    ok(&[
        "compare",
        "--quantum-csv",
        hist_a.to_str().unwrap(),
        "--classical-csv",
        hist_a.to_str().unwrap(),
        "--out",
        cmp.to_str().unwrap(),
    ]);
    let c = &json(&cmp.join("compare.json"))["comparison"];
    assert!((c["pearson"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((c["top_decile_overlap"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let res = torusops(&[
        "compare",
        "--quantum-csv",
        hist_a.to_str().unwrap(),
        "--classical-csv",
        hist_b.to_str().unwrap(),
        "--out",
        cmp.to_str().unwrap(),
    ]);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("grid mismatch"));
}

#[test]
fn compare_against_uniform_field_is_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    ok(&[
        "classical",
        "--grid",
        "16x16",
        "--trajectories",
        "20",
        "--steps",
        "200",
        "--transient",
        "10",
        "--out",
        a.to_str().unwrap(),
    ]);
    let flat = dir.path().join("flat.csv");
    let mut text = String::from("q_index,p_index,q,p,value\n");
    for q in 0..16 {
        for p in 0..16 {
            text.push_str(&format!("{q},{p},0,0,0.5\n"));
        }
    }
    fs::write(&flat, text).unwrap();
    let cmp = dir.path().join("cmp");
    ok(&[
        "compare",
        "--quantum-csv",
        flat.to_str().unwrap(),
        "--classical-csv",
        a.join("classical_hist.csv").to_str().unwrap(),
        "--out",
        cmp.to_str().unwrap(),
    ]);
    let c = &json(&cmp.join("compare.json"))["comparison"];
    assert!(c["pearson"]["value"].as_f64().unwrap().abs() < 0.05);
    assert_eq!(c["pearson"]["degenerate"], Value::Bool(true));
}

#[test]
fn invariant_with_identity_noise_reports_unital() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&[
        "invariant",
        "--n",
        "16",
        "--grid",
        "16x16",
        "--channel",
        r#"{"type":"identity"}"#,
        "--out",
        out,
    ]);
    let r = &json(&dir.path().join("invariant_report.json"))["report"];
    assert_eq!(r["noise_unital"], Value::Bool(true));
    assert!(r["note"].is_string());
    assert_eq!(r["convergence"]["iterations"], 1);
    assert!((r["purity"].as_f64().unwrap() - 1.0 / 16.0).abs() < 1e-12);
}

#[test]
fn invariant_non_convergence_still_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&[
        "invariant",
        "--n",
        "16",
        "--grid",
        "16x16",
        "--max-iter",
        "2",
        "--out",
        out,
    ]);
    let r = &json(&dir.path().join("invariant_report.json"))["report"];
    assert_eq!(r["convergence"]["converged"], Value::Bool(false));
    assert!(dir.path().join("invariant_husimi.pgm").exists());
}

#[test]
fn invariant_sweep_builds_panel() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&[
        "invariant",
        "--n",
        "16",
        "--grid",
        "16x16",
        "--eps",
        "0.3,0.6",
        "--alpha",
        "0.0625,0.5,0.9",
        "--out",
        out,
    ]);
    let pgm = fs::read_to_string(dir.path().join("invariant_panel.pgm")).unwrap();
    // 3 tiles of 16 with 4-pixel gutters by 2 tiles
    assert!(pgm.lines().any(|l| l == "56 36"));
    let sweep = json(&dir.path().join("invariant_sweep.json"));
    assert_eq!(sweep["points"].as_array().unwrap().len(), 6);
    assert!(dir.path().join("invariant_e1_a2.csv").exists());
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"n": 8, "channel": {"type": "sdc", "eps": 0.5, "alpha": 0.5}, "grid": [4, 4]}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    ok(&[
        "report",
        "--config",
        cfg.to_str().unwrap(),
        "--n",
        "16",
        "--out",
        out.to_str().unwrap(),
    ]);
    let run = json(&out.join("run.json"));
    assert_eq!(run["config"]["n"], 16);
    assert_eq!(run["config"]["channel"]["n"], 16);
    assert_eq!(run["command"], "report");
    assert!(run["outputs"]
        .as_array()
        .unwrap()
        .contains(&Value::String("report.json".into())));

    fs::write(&cfg, r#"{"n": 8, "chanel": {}}"#).unwrap();
    let res = torusops(&[
        "report",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(!res.status.success());
}

#[test]
fn reruns_are_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let runs = [
        vec![
            "classical",
            "--grid",
            "32x32",
            "--trajectories",
            "64",
            "--steps",
            "400",
            "--transient",
            "20",
            "--seed",
            "9",
        ],
        vec!["gamma-map", "--n", "16", "--grid", "32x32"],
        vec!["invariant", "--n", "16", "--grid", "32x32"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let out = dir.path().join(format!("r{i}_{rep}"));
            let mut a = args.clone();
            a.extend(["--out", out.to_str().unwrap()]);
            ok(&a);
            outputs.push(out);
        }
        let mut names: Vec<_> = fs::read_dir(&outputs[0])
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        assert!(!names.is_empty());
        for name in names {
            assert_eq!(
                fs::read(outputs[0].join(&name)).unwrap(),
                fs::read(outputs[1].join(&name)).unwrap(),
                "{name:?} differs"
            );
        }
    }
}
