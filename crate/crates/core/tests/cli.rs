use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use abc_torus::cli::Manifest;
use abc_torus::conjugacy::GridFunction;
use serde_json::Value;

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name).to_string_lossy().into_owned()
}

fn abc(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abc"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .env_remove("ABC_SEED")
        .output()
        .expect("binary runs")
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))).unwrap()
}

/// Every file in the run directory is listed in the manifest and vice versa.
fn assert_no_orphans(dir: &Path) {
    let m: Manifest = serde_json::from_value(json(dir.join("manifest.json"))).unwrap();
    let mut listed: Vec<String> = m.outputs.iter().map(|o| o.file.clone()).collect();
    listed.push("manifest.json".into());
    listed.sort();
    let mut present: Vec<String> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    present.sort();
    assert_eq!(listed, present);
}

#[test]
fn classify_conjugate_pair() {
    let dir = tempfile::tempdir().unwrap();
    let out = abc(&["classify", "--A", "[[2,1],[3,2]]", "--B", "[[1,2],[1,3]]", "--C", "0"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s = json(dir.path().join("summary.json"));
    assert_eq!(s["kernel_dimension"], 2);
    assert_eq!(s["kernel_basis"].as_array().unwrap().len(), 2);
    let m = json(dir.path().join("manifest.json"));
    assert_eq!(m["status"], "ok");
    assert_eq!(m["subcommand"], "classify");
    assert_no_orphans(dir.path());
}

#[test]
fn rotset_is_byte_identical_across_runs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["rotset", "--map", &data("fiber.json"), "--iters", "2000", "--samples", "500", "--seed", "7"];
    for d in [&a, &b] {
        assert!(abc(&args, d.path()).status.success());
    }
    for f in ["rotset.csv", "rotset_hull.dat", "summary.json", "manifest.json"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let s = json(a.path().join("summary.json"));
    assert_eq!(s["shape"]["kind"], "segment");
    assert_no_orphans(a.path());
}

#[test]
fn env_seed_overrides_flag() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let base = ["rotset", "--map", &data("fiber.json"), "--iters", "64", "--samples", "16"];
    let run = |dir: &Path, env: Option<&str>, seed: &str| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_abc"));
        c.args(base).args(["--seed", seed]).arg("--out-dir").arg(dir).env_remove("ABC_SEED");
        if let Some(v) = env {
            c.env("ABC_SEED", v);
        }
        assert!(c.output().unwrap().status.success());
    };
    run(a.path(), Some("11"), "0");
    run(b.path(), None, "11");
    assert_eq!(fs::read(a.path().join("rotset.csv")).unwrap(), fs::read(b.path().join("rotset.csv")).unwrap());
    assert_eq!(json(a.path().join("manifest.json"))["seed"], 11);
}

#[test]
fn pingpong_writes_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let out = abc(&["pingpong", "--f", &data("cat.json"), "--h", &data("shear.json"), "--L", "3", "--out", "cert.json"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let cert = json(dir.path().join("cert.json"));
    assert_eq!(cert["words_checked"], 52);
    assert!(cert["min_separation"].as_f64().unwrap() > 0.0);
    assert!(cert["N"].as_u64().unwrap() >= 1);
    assert_no_orphans(dir.path());
}

#[test]
fn franks_grid_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = abc(&["franks", "--map", &data("cat_shear.json"), "--resolution", "64", "--tol", "1e-8", "--out", "h.grid"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let g = GridFunction::from_grid_str(&fs::read_to_string(dir.path().join("h.grid")).unwrap()).unwrap();
    assert_eq!(g.resolution, 64);
    assert!(json(dir.path().join("summary.json"))["residual_sup"].as_f64().unwrap() < 1e-8);
    assert_no_orphans(dir.path());
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(abc(&["rotset", "--map", &data("invalid_family.json")], dir.path()).status.code(), Some(2));
    assert_eq!(abc(&["rotset", "--map", "/nonexistent/map.json"], dir.path()).status.code(), Some(2));
    assert_eq!(abc(&["classify", "--A", "[[2,1]", "--B", "[[2,1],[1,1]]"], dir.path()).status.code(), Some(2));
    assert_eq!(abc(&["classify", "--bogus"], dir.path()).status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_three_with_payload() {
    let dir = tempfile::tempdir().unwrap();
    let out = abc(&["rotset", "--map", &data("cat.json")], dir.path());
    assert_eq!(out.status.code(), Some(3));
    let e = json(dir.path().join("error.json"));
    assert_eq!(e["kind"], "NotHomotopicToIdentity");
    assert_eq!(json(dir.path().join("manifest.json"))["status"], "numerical_failure");
    assert_no_orphans(dir.path());

    let dir = tempfile::tempdir().unwrap();
    let out = abc(&["franks", "--map", &data("translation.json"), "--resolution", "16"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn ergodic_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let out = abc(&["lyapunov", "--map", &data("cat.json"), "--orbits", "4", "--length", "500"], dir.path());
    assert!(out.status.success());
    let s = json(dir.path().join("summary.json"));
    assert!((s["estimate"]["lambda1"].as_f64().unwrap() - ((3.0 + 5f64.sqrt()) / 2.0).ln()).abs() < 1e-10);
    assert_eq!(s["entropy"]["holds"], true);

    let dir = tempfile::tempdir().unwrap();
    let out = abc(&["srb-average", "--action", &data("z2_affine.json"), "--B", "[[2,1],[1,1]]", "--N", "16", "--dirac", "0.1,0.2", "--bins", "4"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("cloud.csv")).unwrap();
    assert_eq!(csv.lines().count(), 17);
    let h = json(dir.path().join("histogram.json"));
    let total: f64 = h["mass"].as_array().unwrap().iter().flat_map(|r| r.as_array().unwrap()).map(|v| v.as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
    assert_no_orphans(dir.path());

    let dir = tempfile::tempdir().unwrap();
    let out = abc(&["scans", "--map", &data("cat.json"), "--action", &data("z2_affine.json"), "--B", "[[2,1],[1,1]]", "--n-max", "6", "--grid", "8", "--pairs", "8"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(dir.path().join("summary.json"))["K"], 1.0);
}

#[test]
fn leaf_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let out = abc(&["rotnum", "--circle", &data("circle_golden.json"), "--n", "100000", "--conjugate-to", "0.6180339887498949"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s = json(dir.path().join("summary.json"));
    assert!(s["conjugacy"]["defect"].as_f64().unwrap() < 1e-6);

    let dir = tempfile::tempdir().unwrap();
    let out = abc(&["flow", "--f1", &data("leaf_f1.json"), "--f2", &data("leaf_f2.json"), "--B", "[[2,1],[1,1]]", "--n", "10000"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(dir.path().join("summary.json"))["translation"]["check"], true);
}

#[test]
fn report_collates_runs() {
    let root = tempfile::tempdir().unwrap();
    let c = root.path().join("classify");
    let r = root.path().join("rotset");
    assert!(abc(&["classify", "--A", "[[2,1],[1,1]]", "--B", "[[2,1],[1,1]]"], &c).status.success());
    assert!(abc(&["rotset", "--map", &data("fiber.json"), "--iters", "400", "--samples", "64"], &r).status.success());
    let out = Command::new(env!("CARGO_BIN_EXE_abc")).arg("report").arg(root.path()).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("## classify") && text.contains("## rotset"));
    assert!(text.contains("| case | kernel dimension | basis |"));
    assert!(text.contains("shape"));
    assert!(root.path().join("report.md").exists());

    let empty = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_abc")).arg("report").arg(empty.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("MissingManifest"));
}

#[test]
fn remaining_subcommands_run() {
    let cases: Vec<Vec<String>> = vec![
        vec!["faithful".into(), "--action".into(), data("action_eigen.json")],
        vec!["jointrot".into(), "--f1".into(), data("fiber_f1.json"), "--f2".into(), data("fiber.json"), "--boxes".into(), "4,8".into(), "--initials".into(), "4".into()],
        vec!["splitting".into(), "--map".into(), data("cat_shear.json"), "--resolution".into(), "8".into()],
        vec!["periodic".into(), "--map".into(), data("cat.json"), "--period".into(), "2".into()],
        vec!["transversality".into(), "--f".into(), data("cat.json"), "--h".into(), data("shear.json"), "--samples".into(), "16".into()],
    ];
    for args in cases {
        let dir = tempfile::tempdir().unwrap();
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = abc(&refs, dir.path());
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert_no_orphans(dir.path());
    }
    let dir = tempfile::tempdir().unwrap();
    abc(&["faithful", "--action", &data("action_eigen.json")], dir.path());
    assert_eq!(json(dir.path().join("summary.json"))["report"]["faithful"], true);
    let dir = tempfile::tempdir().unwrap();
    abc(&["periodic", "--map", &data("cat.json"), "--period", "2"], dir.path());
    assert_eq!(json(dir.path().join("summary.json"))["count"], 5);
}
