use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn qse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qse")).args(args).output().unwrap()
}

fn circuit(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../circuits").join(name).to_string_lossy().into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_writes_report_and_measurement_csv() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("bell.json");
    let out = qse(&[
        "run",
        &circuit("bell_measured.qse"),
        "--backend",
        "both",
        "--seed",
        "3",
        "--report",
        path_str(&report),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["backend"], "both");
    assert!(json["final_amplitudes"].is_null());
    assert!(json["deviations"].is_array());
    assert!(json["max_deviation"].as_f64().unwrap() < 1e-9);
    assert!(json["counters"]["filters"].as_u64().unwrap() > 0);
    assert!(json["wall_time_seconds"].as_f64().unwrap() >= 0.0);
    let csv = std::fs::read_to_string(dir.path().join("bell.measurements.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "step,kind,index,v0,v1,p1,outcome,policy,seed");
    assert_eq!(rows.len(), 3);
    let bits: Vec<&str> = rows[1..].iter().map(|r| r.split(',').nth(6).unwrap()).collect();
    assert_eq!(bits[0], bits[1]);
}

#[test]
fn unmeasured_run_reports_amplitudes() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let out = qse(&["run", &circuit("bell.qse"), "--backend", "signal", "--report", path_str(&report)]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let amps = json["final_amplitudes"].as_array().unwrap();
    assert_eq!(amps.len(), 4);
    assert!((amps[3][0].as_f64().unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    assert!(json["deviations"].is_null());
}

#[test]
fn same_seed_same_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    let mut seen = Vec::new();
    for k in 0..2 {
        let report = dir.path().join(format!("r{k}.json"));
        assert!(qse(&["run", &circuit("time_bins.qse"), "--seed", "11", "--report", path_str(&report)])
            .status
            .success());
        seen.push(std::fs::read_to_string(dir.path().join(format!("r{k}.measurements.csv"))).unwrap());
    }
    assert_eq!(seen[0], seen[1]);
}

#[test]
fn spectrum_export() {
    let dir = tempfile::tempdir().unwrap();
    let out_csv: PathBuf = dir.path().join("spec.csv");
    let arg = format!("0,0,{}", out_csv.display());
    let out = qse(&["run", &circuit("spectrum_demo.qse"), "--spectrum", &arg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&out_csv).unwrap();
    assert!(text.starts_with("harmonic_index,real,imag\n"));
    let nonzero: Vec<i64> = text
        .lines()
        .skip(1)
        .filter_map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            let mag = f[1].parse::<f64>().unwrap().hypot(f[2].parse::<f64>().unwrap());
            (mag > 1e-12).then(|| f[0].parse().unwrap())
        })
        .collect();
    assert_eq!(nonzero, vec![-3, -1, 1, 3]);
    let time = std::fs::read_to_string(dir.path().join("spec_time.csv")).unwrap();
    assert!(time.starts_with("t_seconds,real,imag\n"));
}

#[test]
fn parse_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.qse");
    std::fs::write(&bad, "qubits f=2 s=0 t=0\ngate H f5\n").unwrap();
    let out = qse(&["run", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn missing_file_exits_with_code_three() {
    let out = qse(&["run", "/nonexistent/prog.qse"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn search_subcommand() {
    let out = qse(&["search", "--oracle", &circuit("search3.tt"), "--trials", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("solutions [2, 6]"), "{text}");
    assert!(text.contains("3/3 trials exact"), "{text}");
    let noisy = qse(&["search", "--oracle", &circuit("search3.tt"), "--noise-snr-db", "40", "--seed", "2"]);
    assert!(noisy.status.success());
}
