use std::io::Write;
use std::process::{Command, Output};

use renyivar::dist::renyi_div;
use renyivar::{Alpha, Dist};

fn renyivar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_renyivar")).args(args).output().expect("binary runs")
}

fn problem_file(text: &[u8]) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text).unwrap();
    f
}

fn certificate(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("certificate is JSON")
}

#[test]
fn certificate_values_round_trip_exactly() {
    let f = problem_file(br#"{"kind": "iid_divergence", "alpha": 0.3, "nu": [0.1, 0.2, 0.7], "theta": [0.4, 0.4, 0.2]}"#);
    let out = renyivar(&["div", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let nu = Dist::new(vec![0.1, 0.2, 0.7]).unwrap();
    let theta = Dist::new(vec![0.4, 0.4, 0.2]).unwrap();
    let direct = renyi_div(Alpha::new(0.3).unwrap(), &nu, &theta).unwrap().to_f64();
    assert_eq!(certificate(&out)["result"]["value"].as_f64().unwrap(), direct);
}

#[test]
fn input_hash_tracks_input_bytes() {
    let a = problem_file(br#"{"kind": "growth", "m": [[1.0]]}"#);
    let b = problem_file(br#"{"kind": "growth",  "m": [[1.0]]}"#);
    let ha = certificate(&renyivar(&["growth", a.path().to_str().unwrap()]))["input_sha256"].clone();
    let hb = certificate(&renyivar(&["growth", b.path().to_str().unwrap()]))["input_sha256"].clone();
    assert_ne!(ha, hb);
    assert_eq!(ha, "28514270f6cd196f438e7cd2855da1905ee3f4e04ae523deb02c4ebefbb8f91e");
}

#[test]
fn csv_and_json_carry_the_same_fields() {
    let f = problem_file(br#"{"kind": "iid_variational", "g": [0.5, -1.0], "mu": [0.5, 0.5], "theta": [0.9, 0.1]}"#);
    let path = f.path().to_str().unwrap();
    let json = certificate(&renyivar(&["certify", path]));
    let csv = String::from_utf8(renyivar(&["certify", path, "--csv"]).stdout).unwrap();
    let mut reader = csv::Reader::from_reader(csv.as_bytes());
    let rows: Vec<(String, String)> =
        reader.records().map(|r| r.unwrap()).map(|r| (r[0].to_string(), r[1].to_string())).collect();
    let slack: f64 = rows.iter().find(|(k, _)| k == "result.slack").unwrap().1.parse().unwrap();
    assert_eq!(slack, json["result"]["slack"].as_f64().unwrap());
    assert!(slack >= 0.0);
    assert_eq!(rows.last().unwrap(), &("pass".to_string(), "true".to_string()));
}

#[test]
fn missing_file_and_bad_bytes_are_input_errors() {
    let out = renyivar(&["div", "/nonexistent/problem.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read"));

    let f = problem_file(b"{\"kind\": \"growth\",\n \"m\": [[1.0]] \xff}");
    let out = renyivar(&["growth", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn bad_flags_are_input_errors() {
    let f = problem_file(br#"{"kind": "growth", "m": [[1.0]]}"#);
    let path = f.path().to_str().unwrap();
    assert_eq!(renyivar(&["growth", path, "--tol", "-1"]).status.code(), Some(2));
    assert_eq!(renyivar(&["growth", path, "--seed", "3"]).status.code(), Some(2));
    assert_eq!(renyivar(&["frobnicate", path]).status.code(), Some(2));
}

#[test]
fn seed_changes_search_but_not_reference() {
    let f = problem_file(
        br#"{"kind": "oracle", "target": "random_search", "problem": "markov_renyi", "alpha": 0.5,
             "nu": [[0.2, 0.3], [0.3, 0.2]], "theta": [[0.4, 0.1], [0.1, 0.4]], "options": {"trials": 64}}"#,
    );
    let path = f.path().to_str().unwrap();
    let a = certificate(&renyivar(&["oracle", path, "--seed", "1"]));
    let b = certificate(&renyivar(&["oracle", path, "--seed", "2"]));
    assert_eq!(a["result"]["reference"], b["result"]["reference"]);
    assert_ne!(a["result"]["best"], b["result"]["best"]);
    assert_eq!(a["pass"], true);
    // infimum problem: no sample falls below the closed form
    assert!(a["result"]["best"].as_f64().unwrap() >= a["result"]["reference"].as_f64().unwrap() - 1e-8);
}
