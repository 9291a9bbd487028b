use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn pbp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pbp")).args(args).output().expect("spawn pbp")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_occupied_exterior_fills_box() {
    let o = pbp(&["simulate", "--rule", "modified", "--r", "3", "--p", "0", "--q", "0", "--side", "21", "--exterior", "occupied"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["origin_occupied"], true);
    assert_eq!(v["density"], 1.0);
    assert_eq!(v["config"]["side"], 21);
}

#[test]
fn simulate_full_density_at_round_zero() {
    let dir = tempfile::tempdir().unwrap();
    let snap = dir.path().join("s.txt");
    let o = pbp(&["simulate", "--p", "1", "--q", "0", "--side", "5", "--snapshot", path(&snap)]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!((v["density"].as_f64(), v["rounds"].as_u64()), (Some(1.0), Some(0)));
    let text = std::fs::read_to_string(&snap).unwrap();
    assert!(text.starts_with("# pbp "));
    assert_eq!(text.lines().filter(|l| l.ends_with(" O")).count(), 125);
}

#[test]
fn bad_arguments_exit_2() {
    assert_eq!(code(&pbp(&["simulate", "--bogus"])), 2);
    assert_eq!(code(&pbp(&["simulate", "--p", "0.7", "--q", "0.5"])), 2);
    assert_eq!(code(&pbp(&["scan", "--p", "", "--q", "0"])), 2);
    assert_eq!(code(&pbp(&["scan", "--p", "0.1", "--q", "0", "--trials", "0"])), 2);
    assert_eq!(code(&pbp(&["--help"])), 0);
}

#[test]
fn scan_rows_and_determinism() {
    let args = ["scan", "--p", "0.1,0.3", "--q", "0,0.05", "--trials", "10", "--side", "9", "--seed", "4"];
    let a = pbp(&args);
    assert_eq!(code(&a), 0);
    let text = String::from_utf8(a.stdout.clone()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# pbp "));
    assert_eq!(lines[1], "p,q,rule,variant,box_side,exterior,trials,estimate,ci95,seed");
    assert_eq!(lines.len(), 6);
    assert_eq!(pbp(&args).stdout, a.stdout);
}

#[test]
fn scan_json_format() {
    let o = pbp(&["scan", "--p", "0.2", "--q", "0", "--trials", "4", "--side", "5", "--format", "json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["estimates"].as_array().unwrap().len(), 1);
}

#[test]
fn config_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let kv = dir.path().join("scan.conf");
    std::fs::write(&kv, "# grid\np = 0.1,0.2\nq = 0\ntrials = 3\nside = 5\n").unwrap();
    let o = pbp(&["scan", "--config", path(&kv), "--trials", "6"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().nth(2).unwrap().contains(",5,empty,6,"));

    let js = dir.path().join("sim.json");
    std::fs::write(&js, r#"{"p": 1, "side": 3}"#).unwrap();
    let o = pbp(&["--config", path(&js), "simulate"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["occupied"], 27);

    assert_eq!(code(&pbp(&["scan", "--config", "/nonexistent/x.conf"])), 2);
}

#[test]
fn shell_all_black() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("shell.txt");
    let o = pbp(&["shell", "--n", "20", "--coloring", "all-black", "--dump", path(&dump)]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["status"], "Complete");
    assert_eq!(v["all_hold"], true);
    for k in ["s1", "s2", "s3", "s4"] {
        assert_eq!(v["report"][k], true);
    }
    let parsed = pbp_core::shell::parse_shell_dump(&std::fs::read_to_string(&dump).unwrap()).unwrap();
    assert_eq!(parsed.sites.len() as u64, v["s_size"].as_u64().unwrap());
}

#[test]
fn stego_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("stego.json");
    let snap = dir.path().join("stego.txt");
    let o = pbp(&["stego", "--fixture", "full", "--n", "12", "--L", "5", "--m", "2", "--out", path(&dump), "--snapshot", path(&snap)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = pbp(&["verify", "--dump", path(&dump)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["domination"]["holds"], true);

    // Same result from the written configuration.
    let o = pbp(&["verify", "--dump", path(&dump), "--snapshot", path(&snap)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    // Removing a closed keystone corner from the configuration is caught.
    let dumped: Value = serde_json::from_str(&std::fs::read_to_string(&dump).unwrap()).unwrap();
    let k = &dumped["structure"]["k"][0]["vertex"];
    let victim = format!("{} {} {} C", k[0], k[1], k[2]);
    let text = std::fs::read_to_string(&snap).unwrap();
    assert!(text.contains(&victim));
    let cut: String = text.lines().filter(|l| *l != victim).map(|l| format!("{l}\n")).collect();
    let snap2 = dir.path().join("cut.txt");
    std::fs::write(&snap2, cut).unwrap();
    let o = pbp(&["verify", "--dump", path(&dump), "--snapshot", path(&snap2)]);
    assert_eq!(code(&o), 3);
    assert_eq!(stdout_json(&o)["structure_ok"], false);

    // A corrupted dump is a configuration error; a missing one is I/O.
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"version\": 1").unwrap();
    assert_eq!(code(&pbp(&["verify", "--dump", path(&bad)])), 2);
    assert_eq!(code(&pbp(&["verify", "--dump", path(&dir.path().join("none.json"))])), 1);
}

#[test]
fn stego_without_good_boxes_fails() {
    let o = pbp(&["stego", "--n", "6", "--L", "2", "--m", "1", "--p", "0", "--q", "0"]);
    assert_eq!(code(&o), 3);
}
