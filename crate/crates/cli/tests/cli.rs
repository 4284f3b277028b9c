use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use qwalk::{evolve, fidelity, position_distribution, CoinSpec, Distribution64, InitialSpec64};

fn qwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwalk")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = qwalk(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Data rows of a CSV report, header line and column names stripped.
fn rows(csv: &str) -> Vec<Vec<String>> {
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# qwalk "));
    lines.next().unwrap();
    lines.map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn blocks(csv: &str) -> BTreeMap<usize, BTreeMap<i64, f64>> {
    let mut out: BTreeMap<usize, BTreeMap<i64, f64>> = BTreeMap::new();
    for r in rows(csv) {
        out.entry(r[0].parse().unwrap()).or_default().insert(r[1].parse().unwrap(), r[2].parse().unwrap());
    }
    out
}

fn write(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name).to_str().unwrap().to_string();
    let mut full = args.to_vec();
    full.extend(["-o", &path]);
    stdout(&full);
    path
}

#[test]
fn simulate_writes_requested_blocks() {
    let b = blocks(&stdout(&["simulate", "--theta", "pi/3", "--mode", "sdc", "--steps", "12"]));
    assert_eq!(b.keys().copied().collect::<Vec<_>>(), (6..=12).collect::<Vec<_>>());
    for d in b.values() {
        assert!((d.values().sum::<f64>() - 1.0).abs() < 1e-12);
    }
    let b = blocks(&stdout(&["simulate", "--theta", "0", "--steps", "5", "--from", "0"]));
    for (t, d) in &b {
        assert_eq!(d.len(), 1);
        assert_eq!(d[&(*t as i64)], 1.0);
    }
}

#[test]
fn simulate_matches_library_hadamard_walk() {
    let b = blocks(&stdout(&["simulate", "--theta", "pi/4", "--mode", "sic", "--steps", "10", "--from", "10"]));
    let lib = position_distribution(&evolve(&InitialSpec64::zero(), &CoinSpec::hadamard(), 10).unwrap());
    for (n, p) in lib.iter() {
        assert_eq!(b[&10][&n], p);
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["simulate", "--theta", "3.59pi/5", "--steps", "20", "--init", "1/sqrt2,i/sqrt2"];
    assert_eq!(qwalk(&args).stdout, qwalk(&args).stdout);
    let sweep = ["sweep", "--summary"];
    assert_eq!(qwalk(&sweep).stdout, qwalk(&sweep).stdout);
}

#[test]
fn files_round_trip_into_fidelity_and_kl() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.csv", &["simulate", "--theta", "2pi/5", "--steps", "10"]);
    let q = write(dir.path(), "q.csv", &["simulate", "--theta", "2pi/5", "--mode", "sic", "--steps", "10"]);
    let lib = |spec| position_distribution(&evolve(&InitialSpec64::zero(), &spec, 10).unwrap());
    let expected =
        fidelity(&lib(CoinSpec::step_dependent(2.0 * PI / 5.0)), &lib(CoinSpec::step_independent(2.0 * PI / 5.0)));
    let out = rows(&stdout(&["fidelity", "--p-file", &p, "--against", "file", "--q-file", &q]));
    let f: f64 = out[0][7].parse().unwrap();
    assert!((f - expected).abs() < 1e-9);
    let same = rows(&stdout(&["kl", "--p-file", &p, "--q-file", &p]));
    assert_eq!(same[0][1].parse::<f64>().unwrap(), 0.0);
    // re-read distributions agree with the in-memory ones
    let back = blocks(&std::fs::read_to_string(&p).unwrap());
    let mem = lib(CoinSpec::step_dependent(2.0 * PI / 5.0));
    let file = Distribution64::new(back[&10].clone()).unwrap();
    assert!(file.max_abs_diff(&mem) < 1e-9);
}

#[test]
fn kl_support_mismatch_is_infinite_unless_smoothed() {
    let dir = tempfile::tempdir().unwrap();
    // at T=4 the free walk sits on +4 and the θ=π/2 walk on 0
    let p = write(dir.path(), "p.csv", &["simulate", "--theta", "0", "--steps", "4", "--from", "4"]);
    let q = write(dir.path(), "q.csv", &["simulate", "--theta", "pi/2", "--steps", "4", "--from", "4"]);
    assert_eq!(rows(&stdout(&["kl", "--p-file", &p, "--q-file", &q]))[0][1], "inf");
    let smoothed: f64 =
        rows(&stdout(&["kl", "--p-file", &p, "--q-file", &q, "--kl-epsilon", "1e-12"]))[0][1].parse().unwrap();
    assert!(smoothed.is_finite() && smoothed > 1.0);
}

#[test]
fn kl_vanishes_on_first_step() {
    let r = rows(&stdout(&["kl", "--theta", "pi/4", "--steps", "1"]));
    assert_eq!(r.len(), 2);
    assert_eq!(r[1][0], "1");
    assert_eq!(r[1][1].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn chessboard_rows() {
    let csv = stdout(&["chessboard", "--theta", "0", "--steps", "50"]);
    let header: Vec<String> = csv.lines().nth(1).unwrap().split(',').map(str::to_string).collect();
    assert_eq!(header.len(), 102);
    assert_eq!((header[1].as_str(), header[101].as_str()), ("-50", "50"));
    let r = rows(&csv);
    assert_eq!(r.len(), 51);
    for (t, row) in r.iter().enumerate() {
        let p: Vec<f64> = row[1..].iter().map(|x| x.parse().unwrap()).collect();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert_eq!(p[50 + t], 1.0);
    }
    let csv = stdout(&["chessboard", "--theta", "pi/2", "--steps", "8"]);
    for row in rows(&csv) {
        for (k, x) in row[1..].iter().enumerate() {
            let n = k as i64 - 8;
            if x.parse::<f64>().unwrap() != 0.0 {
                assert!((-2..=0).contains(&n), "nonzero cell at {n}");
            }
        }
    }
    let csv = stdout(&["chessboard", "--theta", "pi/5", "--steps", "30", "--init", "+i"]);
    for row in rows(&csv) {
        assert!((row[1..].iter().map(|x| x.parse::<f64>().unwrap()).sum::<f64>() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn table_one_reproduced() {
    let r = rows(&stdout(&["classify", "--table1"]));
    assert_eq!(r.len(), 9);
    assert!(r.iter().all(|row| row.last().unwrap() == "yes"), "{r:?}");
}

#[test]
fn classify_reads_toml_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    // a huge prominence leaves no peaks, so nothing is classical or semi-classical
    std::fs::write(&cfg, "peak_prominence = 2.0\n").unwrap();
    let r = rows(&stdout(&["classify", "--theta", "pi/12", "--config", cfg.to_str().unwrap()]));
    assert_eq!(r[0][2], "Quantum like");
    std::fs::write(&cfg, "no_such_key = 1\n").unwrap();
    assert_eq!(qwalk(&["classify", "--theta", "pi/12", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn decoherent_fidelity_example() {
    let r = rows(&stdout(&["fidelity", "--theta", "2pi/5", "--steps", "10", "--against", "decoherent", "--q", "0.8"]));
    let f: f64 = r[0][7].parse().unwrap();
    assert!((f - 0.973).abs() < 0.02, "{f}");
}

#[test]
fn decohere_purity_series() {
    let r = rows(&stdout(&["decohere", "--theta", "2pi/5", "--steps", "10", "--q", "0.5", "--purity"]));
    assert_eq!(r.len(), 11);
    let purity: Vec<f64> = r.iter().map(|row| row[1].parse().unwrap()).collect();
    assert!((purity[0] - 1.0).abs() < 1e-12);
    assert!(purity.windows(2).all(|w| w[1] <= w[0] + 1e-12));
}

#[test]
fn json_records_carry_step_theta_mode() {
    let out = stdout(&["entropy", "--theta", "pi/5", "--steps", "4", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let recs = v.as_array().unwrap();
    assert_eq!(recs.len(), 5);
    for (t, r) in recs.iter().enumerate() {
        assert_eq!(r["step"], t);
        assert_eq!(r["mode"], "sdc");
        assert_eq!(r["theta"], PI / 5.0);
        assert!(r["coin_entropy"].as_f64().unwrap() <= std::f64::consts::LN_2 + 1e-12);
    }
}

#[test]
fn bloch_edges_are_antipodal() {
    let r = rows(&stdout(&["bloch", "--theta", "pi/3", "--steps", "6", "--edges"]));
    assert_eq!(r.len(), 6);
    for row in r {
        assert!((row[9].parse::<f64>().unwrap() + 1.0).abs() < 1e-10);
        assert!(row[10].parse::<f64>().unwrap() < 1e-12);
    }
}

#[test]
fn sweep_summary_covers_all_angles() {
    let r = rows(&stdout(&["sweep", "--summary"]));
    assert_eq!(r.len(), 11 * 7);
    for row in r.iter().filter(|row| row[0] == "5") {
        assert_eq!(row[3], "1");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(qwalk(&["simulate", "--theta", "pi/"]).status.code(), Some(2));
    assert_eq!(qwalk(&["simulate", "--theta", "1", "--init", "1,1"]).status.code(), Some(2));
    assert_eq!(qwalk(&["fidelity", "--theta", "1", "--q", "1.5"]).status.code(), Some(2));
    assert_eq!(qwalk(&["simulate", "--theta", "1", "--steps", "20000"]).status.code(), Some(3));
    assert_eq!(qwalk(&["decohere", "--theta", "1", "--steps", "101"]).status.code(), Some(3));
    assert_eq!(qwalk(&["simulate", "--theta", "1", "-o", "/nonexistent/dir/x.csv"]).status.code(), Some(1));
    assert_eq!(qwalk(&["kl", "--p-file", "/nonexistent.csv", "--q-file", "/nonexistent.csv"]).status.code(), Some(1));
    let capped = Command::new(env!("CARGO_BIN_EXE_qwalk"))
        .env("QWALK_MAX_STEPS", "5")
        .args(["entropy", "--theta", "1", "--steps", "6"])
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(3));
    let density_capped = Command::new(env!("CARGO_BIN_EXE_qwalk"))
        .env("QWALK_MAX_DENSITY_STEPS", "3")
        .args(["decohere", "--theta", "1", "--steps", "4"])
        .output()
        .unwrap();
    assert_eq!(density_capped.status.code(), Some(3));
}
