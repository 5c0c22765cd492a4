use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn drf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drf"))
        .args(args)
        .output()
        .expect("drf runs")
}

fn ok(args: &[&str]) -> String {
    let out = drf(args);
    assert!(
        out.status.success(),
        "drf {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn init_defaults_to_the_dumbbell() {
    let json: Value = serde_json::from_str(&ok(&["init"])).unwrap();
    assert_eq!(json["n"], 80);
    assert_eq!(json["s"].as_array().unwrap().len(), 80);
    assert_eq!(json["a"].as_array().unwrap().len(), 79);
    assert_eq!(json["end_treatment"], "cap");
    assert_eq!(json["t"], 0.0);
}

#[test]
fn cylinder_curvature_table() {
    let dir = tempfile::tempdir().unwrap();
    let lat = dir.path().join("cyl.json");
    ok(&["init", "--profile", "cylinder", "--n", "12", "--ends", "mirror", "-o", p(&lat)]);
    let csv = ok(&["curvature", "-i", p(&lat)]);
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "class_type,index,multiplicity,length,eps,A_or_V,K,R,Rc");
    let rc_s = 4.0 * std::f64::consts::PI / (5.0 * 3f64.sqrt() * 100.0);
    let (mut axial, mut sections) = (0, 0);
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        match cols[0] {
            "a" => {
                axial += 1;
                assert!(cols[8].parse::<f64>().unwrap().abs() < 1e-12);
            }
            "s" => {
                sections += 1;
                assert!((cols[8].parse::<f64>().unwrap() - rc_s).abs() < 1e-9);
            }
            _ => {}
        }
    }
    assert_eq!((sections, axial), (12, 11));
}

#[test]
fn resample_and_embed() {
    let dir = tempfile::tempdir().unwrap();
    let lat = dir.path().join("sphere.json");
    ok(&["init", "--profile", "sphere", "--n", "30", "-o", p(&lat)]);
    let r: Value = serde_json::from_str(&ok(&["resample", "-i", p(&lat), "--n", "45"])).unwrap();
    assert_eq!(r["s"].as_array().unwrap().len(), 45);
    let csv = ok(&["embed", "-i", p(&lat)]);
    assert_eq!(csv.lines().next().unwrap(), "i,z,rho,embeddable");
    assert_eq!(csv.lines().count(), 31);
}

#[test]
fn forman_on_a_path() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    fs::write(&g, r#"{"edges": [{"u": "a", "v": "b"}, {"u": "b", "v": "c"}, {"u": "c", "v": "d"}]}"#).unwrap();
    let csv = ok(&["forman", "-g", p(&g)]);
    let rc: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(rc, vec![0.5, 0.0, 0.5]);
}

#[test]
fn correspondence_rows() {
    let dir = tempfile::tempdir().unwrap();
    let lat = dir.path().join("l.json");
    ok(&["init", "--profile", "sphere", "--n", "5", "-o", p(&lat)]);
    let csv = ok(&["correspond", "-i", p(&lat)]);
    assert_eq!(csv.lines().count(), 1 + 142);
}

fn evolve_short(lat: &Path, out: &Path, extra: &[&str]) {
    let mut args = vec!["evolve", "-i", p(lat), "-o", p(out), "--t-max", "5", "--snapshot-every", "4"];
    args.extend_from_slice(extra);
    ok(&args);
}

#[test]
fn evolve_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let lat = dir.path().join("dumbbell.json");
    ok(&["init", "-o", p(&lat)]);
    let (one, two) = (dir.path().join("one"), dir.path().join("two"));
    evolve_short(&lat, &one, &["--threads", "1"]);
    evolve_short(&lat, &two, &["--threads", "4"]);
    for name in ["series.csv", "events.json", "snapshots/0000.json", "snapshots/0005.json"] {
        let a = fs::read(one.join(name)).unwrap();
        let b = fs::read(two.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs");
    }
    let series = fs::read_to_string(one.join("series.csv")).unwrap();
    assert_eq!(series.lines().next().unwrap(), "t,lobe,s_min,rho_min,argmin,volume,max_abs_rc");
    assert_eq!(series.lines().count(), 1 + 21);

    let manifest: Value = serde_json::from_str(&fs::read_to_string(one.join("manifest.json")).unwrap()).unwrap();
    let digest = hex::encode(Sha256::digest(fs::read(&lat).unwrap()));
    assert_eq!(manifest["input_sha256"], digest);
    assert_eq!(manifest["threads"], 1);
    assert!(!one.join("manifest.json.tmp").exists());
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let lat = dir.path().join("l.json");
    ok(&["init", "--profile", "sphere", "--n", "20", "-o", p(&lat)]);
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"dt": 0.5, "t_max": 100.0, "remesh_every": 7}"#).unwrap();
    let run = dir.path().join("run");
    evolve_short(&lat, &run, &["--config", p(&cfg), "--dt", "0.125"]);
    let manifest: Value = serde_json::from_str(&fs::read_to_string(run.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["dt"], 0.125);
    assert_eq!(manifest["config"]["t_max"], 5.0);
    assert_eq!(manifest["config"]["remesh_every"], 7);
    assert_eq!(manifest["config"]["surgery_threshold"], 0.8);
}

#[test]
fn domain_errors_exit_one_with_json() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"s": [2.0, 1.0], "a": [0.5], "end_treatment": "cap"}"#).unwrap();
    let out = drf(&["curvature", "-i", p(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(report["error"], "realizability");

    let out = drf(&["curvature", "-i", p(&dir.path().join("missing.json"))]);
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(report["error"], "io");

    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"dtt": 0.5}"#).unwrap();
    let out = drf(&["evolve", "-i", p(&bad), "-o", p(&dir.path().join("r")), "--config", p(&cfg)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(drf(&["init", "--bogus"]).status.code(), Some(2));
    assert_eq!(drf(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(drf(&["--threads", "0", "init"]).status.code(), Some(2));
}

#[test]
fn table_profile() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("t.csv");
    fs::write(&table, "x,s\n# flat tube\n0,5\n1,5\n2,5\n3,5\n").unwrap();
    let json: Value = serde_json::from_str(&ok(&["init", "--profile", "table", "--table", p(&table), "--n", "7"])).unwrap();
    assert_eq!(json["s"].as_array().unwrap().len(), 7);
    assert_eq!(json["a"][0], 0.5);
    assert_eq!(json["s"][3], 5.0);
    assert_eq!(drf(&["init", "--profile", "table"]).status.code(), Some(2));
}
