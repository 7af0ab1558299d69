use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn sl2m(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sl2m")).args(args).env_remove("SL2_JOBS").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn shipped(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data").join(name)
}

#[test]
fn decides_the_worked_example() {
    let out = sl2m(&["decide", "--u", "2", "--v", "3", "--matrix", "2401 12975 250 1351"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out), json!({"status": "Member", "word": [3, 1, -1, 5, 1, -1, 2, 0], "sanov": false}));

    let out = sl2m(&["decide", "--u", "2", "--v", "3", "--matrix", "2401 12975 250 1351", "--trace"]);
    let v = stdout_json(&out);
    let trace = &v["trace"];
    assert_eq!(trace["steps"][0]["word"], "[[9,1,1,1,1,9,2,2,5]]");
    assert_eq!(trace["derivation"].as_array().unwrap().len(), 9);
    assert!(trace["divisibility"].as_array().unwrap().iter().all(|b| b == true));
}

#[test]
fn identity_has_the_empty_word() {
    let out = sl2m(&["decide", "--u", "3", "--v", "3", "--matrix", "1 0 0 1", "--strict"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["word"], json!([]));
}

#[test]
fn strict_mode_reports_through_the_exit_code() {
    let out = sl2m(&["decide", "--u", "3", "--v", "3", "--matrix", "19 21 9 10", "--strict"]);
    assert_eq!(code(&out), 2);
    assert_eq!(stdout_json(&out)["status"], "NotMember");
    let out = sl2m(&["decide", "--u", "2", "--v", "3", "--matrix", "1 1 0 1", "--strict"]);
    assert_eq!(code(&out), 3);
    let out = sl2m(&["decide", "--u", "2", "--v", "3", "--matrix", "1 1 0 1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["status"], "NotInAmbient");
}

#[test]
fn bad_input_maps_to_distinct_codes() {
    assert_eq!(code(&sl2m(&["decide", "--u", "2", "--v", "3", "--matrix", "1 2 3"])), 64);
    assert_eq!(code(&sl2m(&["decide", "--u", "2", "--v", "3"])), 64);
    assert_eq!(code(&sl2m(&["--bogus"])), 64);
    assert_eq!(code(&sl2m(&["decide", "--u", "2", "--v", "3", "--matrix", "2 3 1 1"])), 65);
    assert_eq!(code(&sl2m(&["decide", "--u", "1", "--v", "3", "--matrix", "1 0 0 1"])), 66);
    assert_eq!(code(&sl2m(&["decide", "--u", "2", "--v", "2", "--matrix", "1 0 0 1"])), 0);
    let help = sl2m(&["--help"]);
    assert_eq!(code(&help), 0);
    assert!(String::from_utf8_lossy(&help.stdout).contains("65"));
}

#[test]
fn transforms_on_the_command_line() {
    let run = |args: &[&str]| {
        let out = sl2m(args);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        stdout_json(&out)
    };
    assert_eq!(run(&["transform", "--fn", "fuv", "--u", "2", "--v", "3", "[[9,1,1,1,1,9,2,2,5]]"]), "[[9,2,-3,10,3,-2,6]]");
    assert_eq!(run(&["transform", "--fn", "c", "12975/1351"]), "[[9,1,1,1,1,9,2,2,5]]");
    assert_eq!(run(&["transform", "--fn", "e", "[[5]]"]), "5");
    assert_eq!(run(&["transform", "--fn", "guv", "--u", "2", "--v", "3", "[[9,2,-3,10,3,-2,6]]"]), "[[9,1,1,1,1,9,2,2,5]]");
    let traced = run(&["transform", "--fn", "c", "-3/5", "--trace"]);
    assert_eq!(traced["result"], "[[-1,2,2]]");
    assert_eq!(traced["trace"].as_array().unwrap().len(), 1);

    assert_eq!(code(&sl2m(&["transform", "--fn", "guv", "--u", "2", "--v", "3", "[[3,1,4]]"])), 65);
    assert_eq!(code(&sl2m(&["transform", "--fn", "fuv", "[[3]]"])), 64);
    assert_eq!(code(&sl2m(&["transform", "--fn", "e", "[3]"])), 64);
}

#[test]
fn oracle_check_runs_and_refuses_sanov() {
    let args = ["oracle-check", "--max-entry", "25", "--max-exp", "8", "--max-word-len", "8", "--samples", "300"];
    let sanov = sl2m(&[&args[..], &["--u", "2", "--v", "2"]].concat());
    assert_eq!(code(&sanov), 66);
    let out = sl2m(&[&args[..], &["--u", "3", "--v", "3"]].concat());
    assert_eq!(code(&out), 0);
    let report = stdout_json(&out);
    assert_eq!(report["success"], true);
    assert!(report["nonmembers_confirmed"].as_u64().unwrap() > 0);
}

#[test]
fn jobs_come_from_the_environment() {
    let base = ["oracle-check", "--u", "2", "--v", "3", "--max-entry", "10", "--max-exp", "4", "--max-word-len", "4"];
    let with = |jobs: &str| Command::new(env!("CARGO_BIN_EXE_sl2m")).args(base).env("SL2_JOBS", jobs).output().unwrap();
    let one = with("1");
    assert_eq!(code(&one), 0);
    assert_eq!(stdout_json(&one), stdout_json(&sl2m(&base)));
    assert_eq!(code(&with("many")), 64);
}

#[test]
fn corpus_generation_and_verification() {
    let dir = tempfile::tempdir().unwrap();
    let gen = |name: &str| {
        let path = dir.path().join(name);
        let p = path.to_str().unwrap();
        let out = sl2m(&["corpus", "gen", "--seed", "7", "--u", "2", "--v", "3", "--members", "5", "--ambient", "5", "--out", p]);
        assert_eq!(code(&out), 0);
        fs::read_to_string(path).unwrap()
    };
    let first = gen("a.jsonl");
    assert_eq!(first, gen("b.jsonl"));
    assert_eq!(first.lines().count(), 11);
    let stdout = sl2m(&["corpus", "gen", "--seed", "7", "--u", "2", "--v", "3", "--members", "5", "--ambient", "5", "--out", "-"]);
    assert_eq!(String::from_utf8(stdout.stdout).unwrap(), first);

    let good = shipped("corpus_3_3.jsonl");
    let out = sl2m(&["corpus", "verify", "--in", good.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["success"], true);

    let tampered = dir.path().join("tampered.jsonl");
    let text = fs::read_to_string(&good).unwrap().replacen("\"NotMember\"", "\"NotInAmbient\"", 1);
    fs::write(&tampered, text).unwrap();
    let out = sl2m(&["corpus", "verify", "--in", tampered.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout_json(&out)["status_mismatches"], 1);

    let broken = dir.path().join("broken.jsonl");
    fs::write(&broken, "{\"v\":1}\n").unwrap();
    assert_eq!(code(&sl2m(&["corpus", "verify", "--in", broken.to_str().unwrap()])), 65);
    let missing = dir.path().join("missing.jsonl");
    assert_eq!(code(&sl2m(&["corpus", "verify", "--in", missing.to_str().unwrap()])), 74);
}
