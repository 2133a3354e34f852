use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cmop-ela"));
    c.env_remove("CMOP_CACHE_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures")
}

#[test]
fn list_suite_and_json() {
    let o = run(&["list", "--suite", "MW"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 1 + 14);

    let o = run(&["list", "--suite", "NOPE"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1);

    let o = run(&["list", "--json"]);
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 42);
}

fn features(out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["features", "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn features_record_and_rerun_is_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let args = ["--problem", "C2-DTLZ2", "--dim", "2", "--seed", "7"];
    assert!(features(&a, &args).status.success());
    assert!(features(&b, &args).status.success());
    let name = "C2-DTLZ2-D2-s7.json";
    let ta = fs::read(a.join(name)).unwrap();
    assert_eq!(ta, fs::read(b.join(name)).unwrap());
    let record: serde_json::Value = serde_json::from_slice(&ta).unwrap();
    assert_eq!(record["features"]["n_com"], 3);
    assert_eq!(record["schema_version"], 1);
    assert_eq!(record["features"].as_object().unwrap().len(), 29);
}

#[test]
fn only_one_family() {
    let dir = tempfile::tempdir().unwrap();
    let o = features(dir.path(), &["--problem", "MW7", "--only", "infocontent"]);
    assert!(o.status.success());
    let record: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("MW7-D2-s0.json")).unwrap()).unwrap();
    let defined: Vec<&String> = record["features"]
        .as_object()
        .unwrap()
        .iter()
        .filter(|(_, v)| !v.is_null())
        .map(|(k, _)| k)
        .collect();
    assert_eq!(defined, ["eps_s", "h_max", "m0"]);
}

#[test]
fn warm_cache_gives_identical_records() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let args = [
        "--problem",
        "DAS-CMOP1",
        "--only",
        "spacefill,infocontent,adaptivewalk",
    ];
    let plain = dir.path().join("plain");
    assert!(features(&plain, &args).status.success());
    for out in ["cold", "warm"] {
        let o = bin()
            .args(["features", "--out", dir.path().join(out).to_str().unwrap()])
            .args(args)
            .env("CMOP_CACHE_DIR", &cache)
            .output()
            .unwrap();
        assert!(o.status.success());
    }
    assert!(fs::read_dir(&cache).unwrap().count() >= 3);
    let name = "DAS-CMOP1-D2-s0.json";
    let reference = fs::read(plain.join(name)).unwrap();
    for out in ["cold", "warm"] {
        assert_eq!(
            fs::read(dir.path().join(out).join(name)).unwrap(),
            reference
        );
    }
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = features(dir.path(), &["--problem", "NOPE"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("NOPE"));
    let o = features(dir.path(), &["--problem", "DAS-CMOP7", "--dim", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = features(dir.path(), &["--problem", "MW1", "--only", "bogus"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["coverage", "--records", "/nonexistent/records"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gridscan_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "gridscan",
        "--problem",
        "MW7",
        "--resolution",
        "2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    for name in [
        "violation.csv",
        "feasibility.csv",
        "dominance_ratio.csv",
        "nondominated.csv",
    ] {
        let text = fs::read_to_string(dir.path().join(name)).unwrap();
        assert_eq!(text.lines().count(), 1 + 4, "{name}");
        assert!(text.starts_with("x1,x2,"));
    }
    let o = run(&[
        "gridscan",
        "--problem",
        "MW7",
        "--resolution",
        "201",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("1 feasible components"));
    let mask = fs::read_to_string(dir.path().join("feasibility.csv")).unwrap();
    assert_eq!(mask.lines().count(), 1 + 201 * 201);
}

#[test]
fn coverage_matches_golden_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let records = fixtures().join("records");
    let o = run(&[
        "coverage",
        "--records",
        records.to_str().unwrap(),
        "--target",
        "all",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let got = fs::read_to_string(dir.path().join("coverage.csv")).unwrap();
    let golden = fs::read_to_string(fixtures().join("coverage_all.csv")).unwrap();
    assert_eq!(got, golden);
    let bounds: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("normalization.json")).unwrap()).unwrap();
    assert_eq!(bounds["bounds"].as_object().unwrap().len(), 29);
}

#[test]
fn coverage_self_target_column_is_ones() {
    let dir = tempfile::tempdir().unwrap();
    let records = fixtures().join("records");
    let o = run(&[
        "coverage",
        "--records",
        records.to_str().unwrap(),
        "--target",
        "MW",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = fs::read_to_string(dir.path().join("coverage.csv")).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let col = rdr
        .headers()
        .unwrap()
        .iter()
        .position(|h| h == "MW")
        .unwrap();
    for row in rdr.records() {
        let row = row.unwrap();
        assert!(row[col].is_empty() || row[col] == *"1.000000", "{:?}", row);
    }
}

#[test]
fn coverage_flags_empty_features() {
    let dir = tempfile::tempdir().unwrap();
    let records = dir.path().join("records");
    fs::create_dir(&records).unwrap();
    for (file, suite) in [("C2-DTLZ2-D2-s0.json", "X"), ("MW7-D2-s0.json", "Y")] {
        let mut r: serde_json::Value =
            serde_json::from_slice(&fs::read(fixtures().join("records").join(file)).unwrap())
                .unwrap();
        r["suite"] = suite.into();
        r["features"]["basin_opt"] = serde_json::Value::Null;
        fs::write(records.join(file), r.to_string()).unwrap();
    }
    let o = run(&[
        "coverage",
        "--records",
        records.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("basin_opt"));
    let text = fs::read_to_string(dir.path().join("out/coverage.csv")).unwrap();
    assert!(text.lines().any(|l| l == "basin_opt,,"));
}

#[test]
fn sensitivity_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "sensitivity",
        "--problem",
        "C2-DTLZ2",
        "--exact",
        "3",
        "--samples",
        "5000,10000",
        "--eps",
        "0.02,0.05",
        "--repetitions",
        "3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 4);
    let counts = fs::read_to_string(dir.path().join("counts.csv")).unwrap();
    assert_eq!(counts.lines().count(), 1 + 12);
}
