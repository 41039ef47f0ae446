use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_twoin1");

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str], threads: &str) -> Output {
    Command::new(BIN)
        .args(args)
        .env("TWOIN1_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn small_oc_config() -> String {
    std::fs::read_to_string(configs().join("table3.toml"))
        .unwrap()
        .replace("alternative = 10_000", "alternative = 3_000")
}

fn only_file(dir: &Path, ext: &str) -> PathBuf {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == ext))
        .collect();
    assert_eq!(v.len(), 1, "{v:?}");
    v.pop().unwrap()
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "oc.toml", &small_oc_config());
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let cfg = cfg.to_str().unwrap();
    assert!(
        run(&["oc", "--config", cfg, "--out", a.to_str().unwrap()], "1")
            .status
            .success()
    );
    assert!(
        run(&["oc", "--config", cfg, "--out", b.to_str().unwrap()], "4")
            .status
            .success()
    );
    for ext in ["csv", "json"] {
        let fa = only_file(&a, ext);
        let fb = only_file(&b, ext);
        assert_eq!(fa.file_name(), fb.file_name());
        assert_eq!(std::fs::read(fa).unwrap(), std::fs::read(fb).unwrap());
    }
}

#[test]
fn seed_flag_changes_results_and_name() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "oc.toml", &small_oc_config());
    let cfg = cfg.to_str().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(
        run(&["oc", "--config", cfg, "--out", a.to_str().unwrap()], "2")
            .status
            .success()
    );
    assert!(run(
        &[
            "oc",
            "--config",
            cfg,
            "--seed",
            "5",
            "--out",
            b.to_str().unwrap()
        ],
        "2"
    )
    .status
    .success());
    let (fa, fb) = (only_file(&a, "csv"), only_file(&b, "csv"));
    assert_ne!(fa.file_name(), fb.file_name());
    assert_ne!(std::fs::read(fa).unwrap(), std::fs::read(fb).unwrap());
}

#[test]
fn embedded_config_reproduces_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "oc.toml", &small_oc_config());
    let a = tmp.path().join("a");
    assert!(run(
        &[
            "oc",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            a.to_str().unwrap()
        ],
        "2"
    )
    .status
    .success());
    let meta: serde_json::Value =
        serde_json::from_slice(&std::fs::read(only_file(&a, "json")).unwrap()).unwrap();
    let again = write(tmp.path(), "again.json", &meta["config"].to_string());
    let b = tmp.path().join("b");
    assert!(run(
        &[
            "oc",
            "--config",
            again.to_str().unwrap(),
            "--out",
            b.to_str().unwrap()
        ],
        "3"
    )
    .status
    .success());
    assert_eq!(
        std::fs::read(only_file(&a, "csv")).unwrap(),
        std::fs::read(only_file(&b, "csv")).unwrap()
    );
}

#[test]
fn unknown_keys_fail_with_config_exit_code() {
    let tmp = tempfile::tempdir().unwrap();
    let text = small_oc_config().replace("seed = ", "sed = 1\nseed = ");
    let cfg = write(tmp.path(), "bad.toml", &text);
    let out = run(
        &[
            "oc",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            tmp.path().to_str().unwrap(),
        ],
        "1",
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sed"));

    let cfg = write(tmp.path(), "bad.yaml", "seed: 1");
    let out = run(&["oc", "--config", cfg.to_str().unwrap()], "1");
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["oc", "--config", "/nonexistent/x.toml"], "1");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn table1_sweep_gives_thirty_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(configs().join("table1.toml"))
        .unwrap()
        .replace("empirical_cmin = 1_000_000", "");
    let cfg = write(tmp.path(), "t1.toml", &text);
    let out = run(
        &[
            "cmin",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            tmp.path().to_str().unwrap(),
        ],
        "4",
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let mut r = csv::Reader::from_path(only_file(tmp.path(), "csv")).unwrap();
    let rows: Vec<csv::StringRecord> = r.records().map(|x| x.unwrap()).collect();
    assert_eq!(rows.len(), 30);
    let header = r.headers().unwrap().clone();
    let col = header.iter().position(|h| h == "c_min").unwrap();
    for row in &rows {
        row[col]
            .parse::<f64>()
            .expect("finite C_min for every cap above 1");
    }
}

#[test]
fn no_headroom_emits_sentinel() {
    let tmp = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(configs().join("cmin.toml"))
        .unwrap()
        .replace("m_max = 330", "m_max = 180")
        .replace("empirical_cmin = 1_000_000", "empirical_cmin = 200_000");
    let cfg = write(tmp.path(), "s.toml", &text);
    let out = run(
        &[
            "cmin",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            tmp.path().to_str().unwrap(),
        ],
        "4",
    );
    assert!(out.status.success());
    let body = std::fs::read_to_string(only_file(tmp.path(), "csv")).unwrap();
    assert_eq!(body.matches("unbounded-below").count(), 2, "{body}");
}

#[test]
fn table2_design_cmin_in_output() {
    let tmp = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(configs().join("cmin.toml"))
        .unwrap()
        .replace("empirical_cmin = 1_000_000", "");
    let cfg = write(tmp.path(), "c.toml", &text);
    let out = run(
        &[
            "cmin",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            tmp.path().to_str().unwrap(),
            "--format",
            "json",
        ],
        "2",
    );
    assert!(out.status.success());
    let meta: serde_json::Value =
        serde_json::from_slice(&std::fs::read(only_file(tmp.path(), "json")).unwrap()).unwrap();
    let c: f64 = meta["rows"][0]["c_min"].as_str().unwrap().parse().unwrap();
    assert!((c + 0.596).abs() < 0.01);
    assert_eq!(meta["rows"][0]["source"], "analytic");
}

#[test]
fn type1_curve_rows_and_limits() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = configs().join("figure2.toml");
    let out = run(
        &[
            "type1-curve",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            tmp.path().to_str().unwrap(),
        ],
        "4",
    );
    assert!(out.status.success());
    let mut r = csv::Reader::from_path(only_file(tmp.path(), "csv")).unwrap();
    let rows: Vec<csv::StringRecord> = r.records().map(|x| x.unwrap()).collect();
    assert_eq!(rows.len(), 3 * 5 * 121);
    for row in &rows {
        let cap: f64 = row[2].parse().unwrap();
        let total: f64 = row[7].parse().unwrap();
        if cap == 1.0 {
            assert!(total <= 0.025 + 1e-4);
        }
    }
}

#[test]
fn unreachable_duration_exits_with_saturation() {
    let tmp = tempfile::tempdir().unwrap();
    let text = small_oc_config().replace(
        "[accrual]\npreset = \"calibrated\"",
        "[accrual]\nrate = 6.0\ncontrol_median_os = 15.0\ncontrol_median_pfs = 8.0\n\
         phase2_patients = 180\nphase3_patients = 250",
    );
    let cfg = write(tmp.path(), "sat.toml", &text);
    let out = run(
        &[
            "oc",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            tmp.path().to_str().unwrap(),
        ],
        "2",
    );
    assert_eq!(
        out.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn power_study_single_point() {
    let tmp = tempfile::tempdir().unwrap();
    let text = small_oc_config().replace(
        "designs = [\"F2in1\", \"S2in1-180\", \"S2in1-330\", \"F2in1-CHW\"]",
        "designs = [\"F2in1\"]",
    );
    let cfg = write(tmp.path(), "p.toml", &text);
    let out = run(
        &[
            "power-study",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            tmp.path().to_str().unwrap(),
        ],
        "2",
    );
    assert!(out.status.success());
    let mut r = csv::Reader::from_path(only_file(tmp.path(), "csv")).unwrap();
    assert_eq!(r.records().count(), 1);
}
