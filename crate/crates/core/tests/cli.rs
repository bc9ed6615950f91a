use std::path::{Path, PathBuf};
use std::process::Command;

use dmcompat::cli::{InstanceFile, NamedMatrix, ReportFile};
use dmcompat::linalg::{ComplexMatrix, C64};
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn dmcompat(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_dmcompat")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn write_instance(dir: &TempDir, name: &str, mats: &[ComplexMatrix]) -> PathBuf {
    let file = InstanceFile {
        dim: mats[0].rows(),
        matrices: mats
            .iter()
            .enumerate()
            .map(|(i, m)| NamedMatrix::from_matrix(format!("rho{i}"), m))
            .collect(),
        tolerances: None,
    };
    let path = dir.path().join(name);
    std::fs::write(&path, file.to_json()).unwrap();
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn real(rows: &[&[f64]]) -> ComplexMatrix {
    ComplexMatrix::from_real_rows(rows).unwrap()
}

fn plus() -> ComplexMatrix {
    real(&[&[0.5, 0.5], &[0.5, 0.5]])
}

fn generate(dir: &TempDir, name: &str, dim: usize, count: usize, seed: u64, mode: &str) -> PathBuf {
    let path = dir.path().join(name);
    let run = dmcompat(&[
        "generate", "--dim", &dim.to_string(), "--count", &count.to_string(), "--seed", &seed.to_string(),
        "--mode", mode, "--output", p(&path),
    ]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    path
}

#[test]
fn spin_pair_is_incompatible_but_overlapping() {
    let dir = TempDir::new().unwrap();
    let up = real(&[&[1.0, 0.0], &[0.0, 0.0]]);
    let input = write_instance(&dir, "spin.json", &[up, plus()]);
    let run = dmcompat(&["check", "--input", p(&input)]);
    assert_eq!(run.code, 1);
    let report = ReportFile::from_json(&run.stdout).unwrap();
    assert!(!report.bfm_compatible);
    assert!(report.witness.is_none());
    assert!(report.all_products_nonzero);
    assert!(!report.all_commute);
    assert!((report.pairwise_product_nonzero.values[0][1] - 0.5).abs() < 1e-12);
}

#[test]
fn maximally_mixed_and_plus_share_plus() {
    let dir = TempDir::new().unwrap();
    let mixed = real(&[&[0.5, 0.0], &[0.0, 0.5]]);
    let input = write_instance(&dir, "mixed.json", &[mixed, plus()]);
    let out = dir.path().join("report.json");
    let run = dmcompat(&["check", "--input", p(&input), "--output", p(&out)]);
    assert_eq!(run.code, 0);
    assert!(run.stdout.is_empty());
    let report = ReportFile::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report.intersection_dim, 1);
    let w = report.witness_vector().unwrap();
    let s = 0.5f64.sqrt();
    assert!((w[0] - C64::new(s, 0.0)).norm() < 1e-10);
    assert!((w[1] - C64::new(s, 0.0)).norm() < 1e-10);
}

#[test]
fn invalid_matrix_reports_validation_error() {
    let dir = TempDir::new().unwrap();
    let input = write_instance(&dir, "bad.json", &[real(&[&[1.0, 0.0], &[0.0, 1.0]]), plus()]);
    let run = dmcompat(&["check", "--input", p(&input)]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("TraceNotOne"), "{}", run.stderr);
    assert!(run.stdout.is_empty());

    let nh = real(&[&[0.5, 0.3], &[0.0, 0.5]]);
    let input = write_instance(&dir, "nh.json", &[nh]);
    let run = dmcompat(&["check", "--input", p(&input)]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("NotHermitian"), "{}", run.stderr);
}

#[test]
fn unreadable_or_malformed_input_exits_2() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(dmcompat(&["check", "--input", p(&missing)]).code, 2);
    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{ not json").unwrap();
    assert_eq!(dmcompat(&["check", "--input", p(&junk)]).code, 2);
    assert_eq!(dmcompat(&["check"]).code, 2);
    assert_eq!(dmcompat(&["frobnicate"]).code, 2);
    assert_eq!(dmcompat(&["--help"]).code, 0);
}

#[test]
fn tolerance_flags_are_validated() {
    let dir = TempDir::new().unwrap();
    let input = write_instance(&dir, "ok.json", &[plus()]);
    assert_eq!(dmcompat(&["check", "--input", p(&input), "--tol-rank", "1e-6"]).code, 0);
    assert_eq!(dmcompat(&["check", "--input", p(&input), "--tol-rank", "0"]).code, 2);
    assert_eq!(dmcompat(&["check", "--input", p(&input), "--tol-match", "0.5"]).code, 2);
    let run = dmcompat(&["check", "--input", p(&input), "--tol-rank", "1e-6"]);
    let report = ReportFile::from_json(&run.stdout).unwrap();
    assert_eq!(report.rank_rel, 1e-6);
    assert_eq!(report.match_abs, 1e-8);
}

#[test]
fn scenario_verb() {
    let dir = TempDir::new().unwrap();
    let input = write_instance(&dir, "two.json", &[real(&[&[0.75, 0.0], &[0.0, 0.25]]), plus()]);
    let run = dmcompat(&["scenario", "--input", p(&input)]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let report = ReportFile::from_json(&run.stdout).unwrap();
    let sc = report.scenario.unwrap();
    assert!(sc.success);
    assert_eq!(sc.observers.len(), 2);
    assert!(sc.observers.iter().all(|o| o.distance <= 1e-8 && o.outcome_probability > 0.0));

    let three = generate(&dir, "three.json", 3, 3, 5, "compatible");
    assert_eq!(dmcompat(&["scenario", "--input", p(&three)]).code, 0);

    let up = real(&[&[1.0, 0.0], &[0.0, 0.0]]);
    let down = real(&[&[0.0, 0.0], &[0.0, 1.0]]);
    let input = write_instance(&dir, "orth.json", &[up, down]);
    let run = dmcompat(&["scenario", "--input", p(&input)]);
    assert_eq!(run.code, 1);
    assert!(!run.stderr.is_empty());
}

#[test]
fn generate_pairwise_only_instance() {
    let dir = TempDir::new().unwrap();
    let path = generate(&dir, "planes.json", 3, 3, 0, "pairwise-only");
    let file = InstanceFile::load(&path).unwrap();
    for (a, b) in [(0, 1), (1, 2), (0, 2)] {
        let pair = InstanceFile {
            dim: 3,
            matrices: vec![file.matrices[a].clone(), file.matrices[b].clone()],
            tolerances: None,
        };
        let pp = dir.path().join(format!("pair{a}{b}.json"));
        std::fs::write(&pp, pair.to_json()).unwrap();
        assert_eq!(dmcompat(&["check", "--input", p(&pp)]).code, 0);
    }
    let run = dmcompat(&["check", "--input", p(&path)]);
    assert_eq!(run.code, 1);
    let report = ReportFile::from_json(&run.stdout).unwrap();
    assert!(report.all_products_nonzero);
}

#[test]
fn generate_is_deterministic_and_consistent() {
    let dir = TempDir::new().unwrap();
    let a = generate(&dir, "a.json", 4, 3, 7, "compatible");
    let b = generate(&dir, "b.json", 4, 3, 7, "compatible");
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let stdout = dmcompat(&["generate", "--dim", "4", "--count", "3", "--seed", "7", "--mode", "compatible"]);
    assert_eq!(stdout.stdout.as_bytes(), std::fs::read(&a).unwrap().as_slice());

    for seed in 0..10 {
        let c = generate(&dir, "c.json", 2 + seed as usize % 4, 2 + seed as usize % 3, seed, "compatible");
        assert_eq!(dmcompat(&["check", "--input", p(&c)]).code, 0);
        let run = dmcompat(&["scenario", "--input", p(&c)]);
        assert_eq!(run.code, 0);
        let i = generate(&dir, "i.json", 2 + seed as usize % 4, 2 + seed as usize % 3, seed, "incompatible");
        assert_eq!(dmcompat(&["check", "--input", p(&i)]).code, 1);
    }

    assert_eq!(dmcompat(&["generate", "--dim", "0", "--count", "2", "--mode", "compatible"]).code, 2);
    assert_eq!(dmcompat(&["generate", "--dim", "2", "--count", "3", "--mode", "pairwise-only"]).code, 2);
    assert_eq!(dmcompat(&["generate", "--dim", "2", "--count", "2", "--mode", "sideways"]).code, 2);
}

#[test]
fn reported_witness_has_positive_weight_everywhere() {
    let dir = TempDir::new().unwrap();
    let path = generate(&dir, "w.json", 5, 4, 3, "compatible");
    let run = dmcompat(&["check", "--input", p(&path)]);
    let report = ReportFile::from_json(&run.stdout).unwrap();
    let w = report.witness_vector().unwrap();
    let file = InstanceFile::load(&path).unwrap();
    let inst = file.validate(&Default::default()).unwrap();
    for rho in &inst.rhos {
        assert!(rho.matrix().expectation(&w).re > 0.0);
    }
}
