use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use projdyn_cli::{Manifest, MANIFEST_FILE};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn projdyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_projdyn")).args(args).output().expect("spawn projdyn")
}

fn run_in(out: &Path, args: &[&str]) -> Output {
    let mut all = args.to_vec();
    all.extend(["--out", out.to_str().unwrap()]);
    projdyn(&all)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// All files of a directory except the manifest, sorted by name.
fn outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != MANIFEST_FILE)
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn hypotheses_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let ab = data("ab.gens");
    let rot = data("rotation.gens");
    let o = run_in(&tmp.path().join("ab"), &["hypotheses", "--gens", ab.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = run_in(&tmp.path().join("rot"), &["hypotheses", "--gens", rot.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("rot/hypotheses.json")).unwrap()).unwrap();
    assert_eq!(report["h0"]["status"], "violated");
}

#[test]
fn parse_errors_cite_the_line() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("empty.gens");
    fs::write(&empty, "").unwrap();
    let o = run_in(&tmp.path().join("e"), &["hypotheses", "--gens", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("ParseError"), "{}", stderr(&o));
    assert!(tmp.path().join("e").join(MANIFEST_FILE).exists());

    let bad = tmp.path().join("bad.gens");
    fs::write(&bad, "dim 2\ngen a\n2 1\n1 x\n").unwrap();
    let o = run_in(&tmp.path().join("b"), &["spectrum", "--gens", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));
}

#[test]
fn missing_generator_file_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_in(tmp.path(), &["limitset", "--gens", "/nonexistent/file.gens"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("IoError"));
}

#[test]
fn spectrum_of_the_generators() {
    let tmp = tempfile::tempdir().unwrap();
    let ab = data("ab.gens");
    let o = run_in(tmp.path(), &["spectrum", "--gens", ab.to_str().unwrap(), "--max-len", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut rdr = csv::Reader::from_path(tmp.path().join("spectrum.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["word", "log_modulus"]);
    let rows: Vec<(String, f64)> = rdr
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].to_string(), r[1].parse().unwrap())
        })
        .collect();
    let golden = ((3.0 + 5f64.sqrt()) / 2.0).ln();
    assert_eq!(rows[0].0, "a");
    assert!((rows[0].1 - golden).abs() < 1e-12);
    assert_eq!(rows[1].0, "b");
    assert!((rows[1].1 - (2.0 + 3f64.sqrt()).ln()).abs() < 1e-12);
}

#[test]
fn limitset_csv_layout() {
    let tmp = tempfile::tempdir().unwrap();
    let ab = data("ab.gens");
    let o = run_in(tmp.path(), &["limitset", "--gens", ab.to_str().unwrap(), "--max-len", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut rdr = csv::Reader::from_path(tmp.path().join("limitset.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["word", "angle", "x0", "x1"]);
    for r in rdr.records() {
        let r = r.unwrap();
        let angle: f64 = r[1].parse().unwrap();
        let (x0, x1): (f64, f64) = (r[2].parse().unwrap(), r[3].parse().unwrap());
        assert!((0.0..std::f64::consts::PI).contains(&angle));
        assert!((x0.hypot(x1) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn rational_torus_orbit_is_finite() {
    let tmp = tempfile::tempdir().unwrap();
    let ab = data("ab.gens");
    let o = run_in(tmp.path(), &["torus", "--gens", ab.to_str().unwrap(), "--point", "1/5,2/5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("torus.json")).unwrap()).unwrap();
    let keys: Vec<&String> = report.as_object().unwrap().keys().collect();
    assert_eq!(keys.len(), 5);
    assert_eq!(report["finite"], true);
    let size = report["orbit_size"].as_u64().unwrap();
    let rows = fs::read_to_string(tmp.path().join("orbit.csv")).unwrap().lines().count() - 1;
    assert_eq!(rows as u64, size);
}

#[test]
fn float_torus_orbit_respects_the_precision_cap() {
    let tmp = tempfile::tempdir().unwrap();
    let ab = data("ab.gens");
    let gens = ab.to_str().unwrap();
    let o = run_in(tmp.path(), &["torus", "--gens", gens, "--point", "0.1,0.2", "--float", "--max-len", "40"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("PrecisionExceeded"));
    let o = run_in(tmp.path(), &["torus", "--gens", gens, "--point", "sqrt(2)-1,sqrt(3)-1", "--max-len", "8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("torus.json")).unwrap()).unwrap();
    assert_eq!(report["finite"], false);
    assert!(report["coverage_fraction"].as_f64().unwrap() > 0.0);
}

#[test]
fn walk_rejects_short_chains() {
    let tmp = tempfile::tempdir().unwrap();
    let ab = data("ab.gens");
    let o = run_in(tmp.path(), &["walk", "--gens", ab.to_str().unwrap(), "--steps", "500"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("InvalidConfig"));
}

#[test]
fn walk_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let ab = data("ab.gens");
    let args = ["walk", "--gens", ab.to_str().unwrap(), "--steps", "6000", "--trials", "50"];
    let o = run_in(tmp.path(), &args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let walk = fs::read_to_string(tmp.path().join("walk.csv")).unwrap();
    assert!(walk.starts_with("n,mean_delta,stderr\n0,"));
    let means: Vec<f64> = walk.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(means.windows(2).all(|w| w[1] < w[0]));
    let occupation = fs::read_to_string(tmp.path().join("occupation.csv")).unwrap();
    assert!(occupation.starts_with("z,x0,x1\n"));
    assert_eq!(occupation.lines().count(), 5001);
}

#[test]
fn replay_reproduces_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let gens = tmp.path().join("g.gens");
    fs::copy(data("ab.gens"), &gens).unwrap();
    let first = tmp.path().join("first");
    let o = run_in(&first, &["walk", "--gens", gens.to_str().unwrap(), "--steps", "3000", "--trials", "40"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    // Replay must not depend on the generator file still being there.
    fs::remove_file(&gens).unwrap();
    let second = tmp.path().join("second");
    let manifest = first.join(MANIFEST_FILE);
    let o = projdyn(&["replay", manifest.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(outputs(&first), outputs(&second));
    assert_eq!(fs::read(&manifest).unwrap(), fs::read(second.join(MANIFEST_FILE)).unwrap());
}

#[test]
fn thread_count_does_not_change_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let ab = data("ab.gens");
    let gens = ab.to_str().unwrap();
    for cmd in [
        vec!["walk", "--gens", gens, "--steps", "3000", "--trials", "64"],
        vec!["hypotheses", "--gens", gens],
        vec!["limitset", "--gens", gens, "--max-len", "6"],
    ] {
        let runs: Vec<_> = ["1", "4"]
            .iter()
            .map(|t| {
                let dir = tmp.path().join(format!("{}-{t}", cmd[0]));
                let mut args = cmd.clone();
                args.extend(["--threads", t]);
                let o = run_in(&dir, &args);
                assert!(o.status.code() != Some(1), "{}", stderr(&o));
                outputs(&dir)
            })
            .collect();
        assert_eq!(runs[0], runs[1], "{}", cmd[0]);
    }
}

#[test]
fn manifest_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let ab = data("ab.gens");
    let o = run_in(tmp.path(), &["shell", "--gens", ab.to_str().unwrap(), "--t", "3", "--c", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m = Manifest::read(&tmp.path().join(MANIFEST_FILE)).unwrap();
    assert_eq!(m.generators, fs::read_to_string(&ab).unwrap());
    let json = serde_json::to_string(&m).unwrap();
    assert_eq!(serde_json::from_str::<Manifest>(&json).unwrap(), m);
    match &m.command {
        projdyn_cli::Command::Shell(a) => assert_eq!((a.t, a.c), (3, 3.0)),
        other => panic!("unexpected command {other:?}"),
    }
}
