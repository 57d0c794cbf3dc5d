use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

const FANO: &str = "coords:7,7:(1,3);(1,4);(1,5);(1,6);(2,2);(2,4);(2,5);(2,7);(3,2);(3,3);(3,6);(3,7);\
(4,1);(4,4);(4,6);(4,7);(5,1);(5,3);(5,5);(5,7);(6,1);(6,2);(6,5);(6,6);(7,1);(7,2);(7,3);(7,4)";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmatrank"))
        .args(args)
        .env_remove("QMATRANK_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Compares stdout with `tests/golden/<name>`; `UPDATE_GOLDEN=1` rewrites it.
fn golden(name: &str, args: &[&str], code: i32) {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(code),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "golden", name].iter().collect();
    let got = stdout(&out);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, &got).unwrap();
    }
    let want = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(got, want, "{args:?}");
}

#[test]
fn count_rothe_json() {
    golden(
        "count_rothe_21534.json",
        &["--format", "json", "count", "rothe:21534", "--rank", "5", "--factor"],
        0,
    );
}

#[test]
fn count_text() {
    golden("count_lambda.txt", &["count", "lambda:3:2,1", "--rank", "2"], 0);
}

#[test]
fn count_at_q_json() {
    golden(
        "count_at_q.json",
        &[
            "--format",
            "json",
            "count",
            "lambda:3:2,1",
            "--rank",
            "2",
            "--at-q",
            "3",
        ],
        0,
    );
}

#[test]
fn fano_gives_samples() {
    golden(
        "count_fano_samples.json",
        &["--format", "json", "--q-list", "2,3", "count", FANO, "--rank", "7"],
        2,
    );
}

#[test]
fn rook_text() {
    golden(
        "rook_skew_ne.txt",
        &["rook", "skew:4:4,4,3,2/3,1", "--rank", "3", "--convention", "NE"],
        0,
    );
}

#[test]
fn perm_hull_json() {
    golden(
        "perm_hull_21534.json",
        &["--format", "json", "perm", "21534", "--hull"],
        0,
    );
}

#[test]
fn series_json() {
    golden("series_6.json", &["--format", "json", "series", "6"], 0);
}

#[test]
fn bruhat_text() {
    golden("bruhat_3412.txt", &["bruhat", "3412", "--poincare"], 0);
}

#[test]
fn json_envelope() {
    for args in [
        vec!["--format", "json", "count", "lambda:2:2", "--rank", "1"],
        vec!["--format", "json", "count", "rothe:2143", "--rank", "4"],
        vec![
            "--format",
            "json",
            "rook",
            "lambda:3:3,2",
            "--rank",
            "2",
            "--convention",
            "SE",
        ],
        vec!["--format", "json", "perm", "4132", "--rothe"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
        let obj = v.as_object().unwrap();
        let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
        keys.sort_unstable();
        assert_eq!(keys, ["provenance", "query", "result"], "{args:?}");
        assert!(obj["query"]["command"].is_string());
    }
}

#[test]
fn exit_codes_for_errors() {
    assert_eq!(run(&["count", "bogus", "--rank", "1"]).status.code(), Some(1));
    assert_eq!(
        run(&["--q-list", "6", "count", "lambda:3:2,1", "--rank", "2"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(run(&["verify", "nope", "--n", "3"]).status.code(), Some(1));
    assert_eq!(run(&["verify", "rothe", "--n", "3"]).status.code(), Some(0));
}

#[test]
fn printed_board_spec_round_trips() {
    let out = run(&["--format", "json", "perm", "21534", "--hull"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let spec = v["result"]["hull"]["spec"].as_str().unwrap();
    let direct = run(&["rook", "hull:21534", "--rank", "5", "--convention", "SE"]);
    let via_spec = run(&["rook", spec, "--rank", "5", "--convention", "SE"]);
    assert_eq!(direct.status.code(), Some(0));
    assert_eq!(stdout(&direct), stdout(&via_spec));
}

#[test]
fn trace_text() {
    golden(
        "count_trace.txt",
        &["count", "coords:4,4:(1,1);(2,2);(3,3);(4,4)", "--rank", "3", "--trace"],
        0,
    );
}
