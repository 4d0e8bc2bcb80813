use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semdeadline"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sweep_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = bin(&["sweep", "--trials", "20", "--seed", "9", "--out", path(out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for file in ["records.csv", "summary.csv"] {
        let x = std::fs::read(a.join(file)).unwrap();
        assert_eq!(x, std::fs::read(b.join(file)).unwrap());
    }
    let records = std::fs::read_to_string(a.join("records.csv")).unwrap();
    assert!(records
        .starts_with("trial,B_total,policy,gamma_s,gamma_l,B_s,B_l,t_s,t_l,eps_star,psnr,q\n"));
    assert_eq!(records.lines().count(), 1 + 20 * 5 * 4);
    let summary = std::fs::read_to_string(a.join("summary.csv")).unwrap();
    assert!(summary.starts_with("B_total,policy,mean_psnr,std_psnr,mean_q,std_q\n"));
    assert_eq!(summary.lines().count(), 1 + 5 * 4);
}

#[test]
fn generated_surface_feeds_deadlines() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.json");
    assert!(
        bin(&["gen-surface", "--kind", "parametric", "--out", path(&grid)])
            .status
            .success()
    );
    let o = bin(&[
        "deadlines",
        "--surface",
        path(&grid),
        "--k",
        "4",
        "--eps-th",
        "0.5",
    ]);
    assert!(o.status.success());
    let csv = String::from_utf8(o.stdout).unwrap();
    assert_eq!(csv.lines().next(), Some("eps,t_s,t_l,achievable"));
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn allocate_prints_json() {
    let o = bin(&[
        "allocate",
        "--bandwidth",
        "300000",
        "--gamma-s-db",
        "2.3",
        "--gamma-l-db",
        "3.5",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["policy"], "proposed_k20");
    let total = v["B_s"].as_f64().unwrap() + v["B_l"].as_f64().unwrap();
    assert!((total - 3e5).abs() < 1e-6);
    assert!(v["achieved"]["q"].as_f64().unwrap() > 0.0);
}

#[test]
fn exit_codes() {
    assert_eq!(
        bin(&["deadlines", "--surface", "/definitely/missing.json"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(bin(&["sweep", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(
        bin(&["allocate", "--policy", "nonsense"]).status.code(),
        Some(2)
    );
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"omega\": 0.05, \"grid\": [1, 2, 3]}").unwrap();
    assert_eq!(
        bin(&["deadlines", "--surface", path(&bad)]).status.code(),
        Some(2)
    );
}
