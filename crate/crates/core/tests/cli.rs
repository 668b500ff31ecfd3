use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_unitary-qsl"))
}

fn run(out: &Path, args: &[&str]) -> i32 {
    bin().args(args).arg("--out").arg(out).status().unwrap().code().unwrap()
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let k = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    r.records().map(|rec| rec.unwrap()[k].parse().unwrap()).collect()
}

#[test]
fn su3_bounds_files() {
    let dir = tempfile::tempdir().unwrap();
    let code = run(dir.path(), &["bounds", "--model", "su3", "--targets", "A,B,C,D", "--phi", "0.05:3.1416:0.05"]);
    assert_eq!(code, 0);
    let file = |x: &str| dir.path().join(format!("bounds_su3_{x}.csv"));
    for col in ["tau1", "tau2", "tau_unified"] {
        let a = column(&file("A"), col);
        assert_eq!(a.len(), 62);
        for other in ["B", "D"] {
            let b = column(&file(other), col);
            assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-12), "{col} of {other}");
        }
    }
    let manifest: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("bounds_su3.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 5);
    let short = dir.path().join("short_time_su3.csv");
    let phi = column(&short, "phi");
    let (ta, tc, td) = (column(&short, "T_A"), column(&short, "T_C"), column(&short, "T_D"));
    for k in 0..phi.len() {
        if phi[k] <= 0.2 {
            assert!(ta[k] < tc[k] && tc[k] < td[k]);
        }
    }
    assert_eq!(manifest["seed"], 0);
    assert!(manifest["version"].is_string());
}

#[test]
fn su2_bounds_tau_is_phi() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["bounds", "--model", "su2", "--omega", "2", "--targets", "x,z", "--phi", "0.1:3.1:0.1"]), 0);
    for x in ["x", "z"] {
        let p = dir.path().join(format!("bounds_su2_{x}.csv"));
        for (phi, tau) in column(&p, "phi").iter().zip(column(&p, "tau_unified")) {
            assert!((tau - phi / 2.0).abs() < 1e-12);
        }
    }
    let short = dir.path().join("short_time_su2.csv");
    for (phi, tx) in column(&short, "phi").iter().zip(column(&short, "T_x")) {
        assert!((tx - phi / 2.0).abs() < 1e-12);
    }
}

#[test]
fn usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["bounds", "--phi", "1:0.5:0.1"]), 2);
    assert_eq!(run(dir.path(), &["bounds", "--phi", "oops"]), 2);
    assert_eq!(run(dir.path(), &["sweep", "--target", "x"]), 2);
    assert_eq!(run(dir.path(), &["classical", "--j", "0.7:3"]), 2);
}

#[test]
fn sweep_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["sweep", "--model", "su2", "--target", "x", "--phi", "1.5708", "--seed", "7"];
    assert_eq!(run(a.path(), &args), 0);
    assert_eq!(run(b.path(), &args), 0);
    let name = "sweep_su2_x_1p5708.json";
    let ja = fs::read(a.path().join(name)).unwrap();
    assert_eq!(ja, fs::read(b.path().join(name)).unwrap());
    let v: Value = serde_json::from_slice(&ja).unwrap();
    let t = v["t_min"].as_f64().unwrap();
    assert!((t - 1.5708).abs() <= 0.05 + 1e-9, "t_min = {t}");
    assert!(v["grid"][0]["T"].is_f64() && v["grid"][0]["best_J"].is_f64());
    assert!(v["bounds"]["short_time"].is_f64());
    assert!(v.get("warning").is_none());
    let csv = fs::read_to_string(a.path().join("sweep_su2_x_1p5708.csv")).unwrap();
    assert!(csv.starts_with("T,best_J\n"));
}

#[test]
fn sweep_without_success_warns() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sweep", "--model", "su2", "--target", "z", "--phi", "1.5708", "--thi", "1", "--tstep", "0.25", "--seeds", "2"];
    assert_eq!(run(dir.path(), &args), 0);
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("sweep_su2_z_1p5708.json")).unwrap()).unwrap();
    assert!(v["t_min"].is_null());
    assert!(v["warning"].is_string());
}

#[test]
fn overlay_is_copied() {
    let dir = tempfile::tempdir().unwrap();
    let overlay = dir.path().join("ref.csv");
    fs::write(&overlay, "phi,T\n0.5,0.6\n1.0,1.1\n").unwrap();
    let args = ["sweep", "--target", "x", "--phi", "0.5", "--seeds", "2", "--overlay", overlay.to_str().unwrap()];
    assert_eq!(run(dir.path(), &args), 0);
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("sweep_su2_x_0p5000.json")).unwrap()).unwrap();
    assert_eq!(v["overlay"][1]["T"], 1.1);
}

#[test]
fn mct_single_time() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["mct", "--target", "x", "--phi", "1", "--t", "1.2", "--seeds", "3", "--method", "lbfgs"]), 0);
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("mct_su2_x_1p0000_1p2000.json")).unwrap()).unwrap();
    assert!(v["best_J"].as_f64().unwrap() <= 1e-6);
    assert_eq!(v["runs"].as_array().unwrap().len(), 3);
}

#[test]
fn lie_report() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["lie", "--model", "su3"]), 0);
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("lie_su3.json")).unwrap()).unwrap();
    assert_eq!(v["dimension"], 8);
    assert_eq!(v["fully_controllable"], true);
}

#[test]
fn classical_table() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["classical", "--j", "0.5:50"]), 0);
    let tau = column(&dir.path().join("classical.csv"), "tau2");
    assert_eq!(tau.len(), 100);
    assert!(tau.windows(2).all(|w| w[1] < w[0]));
    assert_eq!(run(dir.path(), &["classical", "--j", "0.5:3", "--format", "json"]), 0);
    assert!(dir.path().join("classical.json").exists());
}

#[test]
fn verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["verify", "--seed", "1", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() >= 10 && text.lines().all(|l| l.starts_with("PASS")));
}
