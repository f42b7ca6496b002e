use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn kazhdan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kazhdan"))
        .args(args)
        .env_remove("KAZHDAN_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn shipped() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/certificates");
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_string_lossy().starts_with("cert-"))
        .collect();
    v.sort();
    v
}

fn shipped_for(family: &str, rank: u64, target: &str) -> PathBuf {
    shipped()
        .into_iter()
        .find(|p| {
            let c: Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
            c["group"]["family"] == family && c["group"]["rank"] == rank && c["target"] == target
        })
        .expect("certificate shipped")
}

#[test]
fn roots_a4_gamma() {
    let v = json(&kazhdan(&["roots", "A", "4", "--format", "json"]));
    assert_eq!(v["gamma"], 3);
    assert_eq!(v["system"]["roots"].as_array().unwrap().len(), 20);
}

#[test]
fn roots_f4_short_incidence() {
    let v = json(&kazhdan(&["roots", "F", "4", "--format", "json"]));
    assert_eq!(v["incidence"]["short"]["C2"], 3);
    assert_eq!(v["incidence"]["short"]["A2"], 4);
}

#[test]
fn roots_a1_has_no_planes() {
    let out = kazhdan(&["roots", "A", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("gamma = 0"));
    assert!(text.contains("no admissible planes"));
}

#[test]
fn invalid_input_exits_2() {
    assert_eq!(kazhdan(&["roots", "Q", "3"]).status.code(), Some(2));
    assert_eq!(kazhdan(&["roots", "E", "9"]).status.code(), Some(2));
    assert_eq!(kazhdan(&["solve", "B", "3"]).status.code(), Some(2));
    assert_eq!(kazhdan(&["solve", "A", "2", "--target", "nope"]).status.code(), Some(2));
    assert_eq!(kazhdan(&["trace", "2"]).status.code(), Some(2));
    assert_eq!(kazhdan(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "radius = 2\nradious = 3\n").unwrap();
    let out = kazhdan(&["--config", cfg.to_str().unwrap(), "roots", "A", "2"]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn starved_solver_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = kazhdan(&[
        "solve",
        "A",
        "2",
        "--target",
        "adj",
        "-R",
        "1",
        "--max-iter",
        "3",
        "--output",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!std::fs::read_dir(dir.path()).unwrap().any(|e| e
        .unwrap()
        .file_name()
        .to_string_lossy()
        .starts_with("cert-")));
}

#[test]
fn shipped_certificates_verify() {
    let certs = shipped();
    assert!(certs.len() >= 3);
    let mut args = vec!["verify".to_string()];
    args.extend(certs.iter().map(|p| p.display().to_string()));
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    let out = kazhdan(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(String::from_utf8_lossy(&out.stdout).matches("ok ").count(), certs.len());
}

#[test]
fn tampered_certificate_exits_4() {
    let src = shipped_for("A", 2, "adj");
    let dir = tempfile::tempdir().unwrap();
    let mut cert: Value = serde_json::from_str(&std::fs::read_to_string(&src).unwrap()).unwrap();
    let gram = cert["gram"]["path"].as_str().unwrap().to_string();
    std::fs::copy(src.parent().unwrap().join(&gram), dir.path().join(&gram)).unwrap();
    cert["lambda_certified"] = serde_json::json!({"num": "1", "den": "1"});
    let path = dir.path().join("cert-tampered.json");
    std::fs::write(&path, serde_json::to_string_pretty(&cert).unwrap()).unwrap();
    let out = kazhdan(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn report_schema_and_references() {
    let v = json(&kazhdan(&["report", "--max-rank", "8", "--format", "json"]));
    let rows = v["rows"].as_array().unwrap();
    assert!(rows.len() > 30);
    for r in rows {
        for key in ["type", "n", "R", "lambda", "S_size", "kappa_lb", "method", "sources"] {
            assert!(!r[key].is_null(), "{key} missing in {r}");
        }
        let is_f4 = r["type"] == "F";
        if let Some(m) = r["matches_reference"].as_bool() {
            assert_eq!(m, !is_f4, "{r}");
        }
        if !is_f4 && !r["reference"].is_null() {
            let d = r["kappa_lb"].as_f64().unwrap() - r["reference"].as_f64().unwrap();
            assert!(d.abs() <= 1e-6, "{r}");
        }
    }
    let e7 = rows
        .iter()
        .find(|r| r["type"] == "E" && r["n"] == 7 && r["table"] == "overview")
        .unwrap();
    let expected = (2.0 * 16.0 * 0.273954f64 / 252.0).sqrt();
    assert!((e7["kappa_lb"].as_f64().unwrap() - expected).abs() < 1e-9);
    assert!(v["flags"]
        .as_array()
        .unwrap()
        .iter()
        .any(|f| f.as_str().unwrap().starts_with("F4")));
}

#[test]
fn certified_constant_marks_rows() {
    let cert = shipped_for("C", 2, "delta_sq");
    let v = json(&kazhdan(&[
        "report",
        "--only",
        "C",
        "--max-rank",
        "4",
        "--format",
        "json",
        "--certificate",
        cert.to_str().unwrap(),
    ]));
    let rows = v["rows"].as_array().unwrap();
    let c2 = rows
        .iter()
        .find(|r| r["type"] == "C" && r["n"] == 2 && r["R"] == 2)
        .unwrap();
    assert_eq!(c2["annotation"], "reproduced-certified");
    let c2r3 = rows
        .iter()
        .find(|r| r["type"] == "C" && r["n"] == 2 && r["R"] == 3)
        .unwrap();
    assert_eq!(c2r3["annotation"], "paper-constant");
    let lambda = c2["lambda"].as_str().unwrap();
    let (num, den) = lambda.split_once('/').unwrap_or((lambda, "1"));
    let value = num.parse::<f64>().unwrap() / den.parse::<f64>().unwrap();
    assert!((0.8698..0.8699).contains(&value), "{lambda}");
}

#[test]
fn report_only_c_covers_ranks_2_to_20() {
    let v = json(&kazhdan(&["report", "--only", "C", "--format", "json"]));
    let rows = v["rows"].as_array().unwrap();
    for f in ["B", "C"] {
        let mut ns: Vec<u64> = rows
            .iter()
            .filter(|r| r["type"] == f && r["table"] == "overview")
            .map(|r| r["n"].as_u64().unwrap())
            .collect();
        ns.dedup();
        assert_eq!(ns, (2..=20).collect::<Vec<_>>(), "{f}");
    }
    assert!(rows.iter().all(|r| r["type"] == "B" || r["type"] == "C"));
    let crossover = v["crossover"].as_array().unwrap();
    assert_eq!(crossover.len(), 18);
}

#[test]
fn report_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = kazhdan(&["report", "--max-rank", "4", "--output", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert!(v["rows"].is_array());
    assert!(std::fs::read_to_string(dir.path().join("report.txt"))
        .unwrap()
        .contains("G "));
}

#[test]
fn malformed_constants_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("constants.json");
    std::fs::write(&path, "{\"version\": 1, \"constants\": [{\"statement\": 3}]}").unwrap();
    let out = kazhdan(&["report", "--constants", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn trace_replays_levels() {
    let v = json(&kazhdan(&["trace", "5"]));
    assert_eq!(v["trace"]["divisor"], 3 * 32 * 2);
    assert_eq!(v["trace"]["inequality"], serde_json::json!([6, 2, 6]));
    assert_eq!(v["trace"]["identities_hold"], true);
    assert_eq!(v["bound"]["s_size"], 100);
}

#[test]
fn export_writes_sdpa() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a2.dat-s");
    let out = kazhdan(&[
        "export",
        "A",
        "2",
        "--target",
        "adj",
        "-R",
        "1",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.lines().any(|l| !l.starts_with('*') && !l.starts_with('"')));
}
