use std::io::Write;
use std::process::{Command, Output, Stdio};

use satrans_cli::acceptance::{Counters, Suite};
use satrans_cli::args::Level;
use satrans_core::counting::s_closed;
use satrans_core::BigCount;

const BIN: &str = env!("CARGO_BIN_EXE_satrans");

const CHICKENFOOT: &str = r#"{"m":1,"n":1,"relations":[[[0,0],[0,1]],[[0,0],[1,0]],[[0,0],[1,1]]]}"#;

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(BIN)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn satrans");
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn count_examples() {
    let o = run(&["count", "1", "1"], None);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "7\n"));
    let o = run(&["count", "3", "0"], None);
    assert_eq!(stdout(&o), "8\n");
    let o = run(&["count", "2", "2", "--all-methods"], None);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("s(2,2) = 115, 5 methods agree"), "{text}");
    for method in ["recurrence", "closed", "egf", "codes", "bruteforce"] {
        let o = run(&["count", "2", "2", "--method", method], None);
        assert_eq!(stdout(&o), "115\n", "{method}");
    }
}

#[test]
fn count_limits_and_budget() {
    let o = run(&["count", "3", "3", "--method", "bruteforce"], None);
    assert_eq!(code(&o), 2);
    let o = run(&["count", "65", "1"], None);
    assert_eq!(code(&o), 2);
    let o = run(&["count", "9", "2", "--method", "codes"], None);
    assert_eq!(code(&o), 2);
    let o = run(&["count", "9", "2", "--method", "codes", "--budget", "9"], None);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), s_closed(9, 2).to_string());
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    let o = run(&["count", "64", "64", "--method", "egf"], None);
    assert_eq!(stdout(&o).trim(), s_closed(64, 64).to_string());
}

#[test]
fn count_table_formats() {
    let o = run(&["count", "2", "3", "--table", "--format", "csv"], None);
    assert_eq!(stdout(&o), "m/n,0,1,2,3\n0,1,2,4,8\n1,2,7,23,73\n2,4,23,115,533\n");
    let o = run(&["count", "1", "1", "--table"], None);
    assert_eq!(stdout(&o), "m\\n 0 1\n  0 1 2\n  1 2 7\n");
}

#[test]
fn invalid_combinations_are_rejected() {
    for args in [
        &["count", "1", "1", "--all-methods", "--table"][..],
        &["count", "1", "1", "--format", "csv"],
        &["count", "1", "1", "--method", "closed", "--all-methods"],
        &["enumerate", "1", "1", "--format", "csv"],
        &["count", "x", "1"],
        &["selftest", "quick", "--only", "13"],
    ] {
        assert_eq!(code(&run(args, None)), 1, "{args:?}");
    }
}

#[test]
fn enumerate_examples() {
    let o = run(&["enumerate", "1", "1", "--format", "codes"], None);
    assert_eq!(stdout(&o).lines().count(), 7);
    let o = run(&["enumerate", "0", "2"], None);
    assert_eq!(stdout(&o).lines().count(), 4);
    let o = run(&["enumerate", "3", "2", "--format", "json"], None);
    let json = stdout(&o);
    assert_eq!(BigCount::from(json.lines().count()), s_closed(3, 2));
    let o = run(&["enumerate", "1", "1", "--format", "dot"], None);
    assert_eq!(stdout(&o).matches("graph ").count(), 7);

    // Round trip through verify.
    let o = run(&["verify", "-"], Some(&json));
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).ends_with("533 documents, 533 valid, 533 saturated\n"));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn verify_examples() {
    let o = run(&["verify", "-"], Some(CHICKENFOOT));
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("valid transfer system, NOT saturated"), "{text}");
    assert_eq!(code(&run(&["verify", "-", "--require-saturated"], Some(CHICKENFOOT))), 4);

    let cover = r#"{"m":3,"n":2,"horizontal":[[0,0],[0,1],[0,2],[1,0],[2,0]],"vertical":[[0,0],[1,0],[0,1],[1,1],[2,1]]}"#;
    let o = run(&["verify", "-"], Some(cover));
    let text = stdout(&o);
    assert_eq!(code(&o), 0, "{text}");
    assert!(text.contains("codes:                    [3,1,1] [2,3]"), "{text}");
    assert!(text.contains("valid saturated cover"));

    let o = run(&["verify", "-"], Some(&CHICKENFOOT[..30]));
    assert_eq!(code(&o), 3);

    // Not closed under restriction: (0,0) -> (1,1) alone.
    let o = run(&["verify", "-"], Some(r#"{"m":1,"n":1,"relations":[[[0,0],[1,1]]]}"#));
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("closed under restriction: FAIL"));
    let o = run(&["verify", "-"], Some(r#"{"m":1,"n":1,"relations":[[[1,0],[0,1]]]}"#));
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("refines order:            FAIL"));
    let o = run(&["verify", "-"], Some(r#"{"m":1,"n":1,"horizontal":[[0,1]],"vertical":[]}"#));
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("(1) horizontal prefixes:  FAIL"));
}

#[test]
fn realize_examples() {
    let o = run(&["realize", "-", "--p", "5", "--q", "7"], Some(r#"{"m":1,"n":0,"relations":[]}"#));
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains(r#""index_set":[0,1,4]"#));

    let all = stdout(&run(&["enumerate", "1", "1"], None));
    let o = run(&["realize", "-", "--p", "5", "--q", "7"], Some(&all));
    assert_eq!(code(&o), 0);
    let certs: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(certs.len(), 7);
    assert!(certs.iter().all(|c| c["verified"] == true));
    let full: Vec<u64> = (0..35).collect();
    assert!(certs.iter().any(|c| c["index_set"] == serde_json::json!(full)));

    assert_eq!(code(&run(&["realize", "-", "--p", "5", "--q", "7"], Some(CHICKENFOOT))), 4);
    assert_eq!(code(&run(&["realize", "-", "--p", "5", "--q", "5"], Some(CHICKENFOOT))), 1);
    assert_eq!(code(&run(&["realize", "-", "--p", "5", "--q", "7"], Some(r#"{"m":2,"n":0,"relations":[]}"#))), 1);
    assert_eq!(code(&run(&["realize", "-", "--p", "5", "--q", "7"], Some("{"))), 3);
}

#[test]
fn output_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("satrans-cli-test-{}.txt", std::process::id()));
    let o = run(&["count", "1", "2", "--output", path.to_str().unwrap()], None);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "23\n");
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn selftest_quick_passes() {
    let o = run(&["selftest", "quick"], None);
    let text = stdout(&o);
    assert_eq!(code(&o), 0, "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 12);
}

fn broken_closed(m: usize, n: usize) -> BigCount {
    let v = s_closed(m, n);
    if m == 3 && n == 2 { v + 1u32 } else { v }
}

#[test]
fn mutated_closed_formula_fails_the_suite() {
    let mut suite = Suite::new(Level::Full);
    suite.counters = Counters { closed: broken_closed, ..Counters::default() };
    let mut out = Vec::new();
    assert!(!suite.run_all(None, &mut out).unwrap());
    let text = String::from_utf8(out).unwrap();
    for id in [3, 4, 7, 8, 12] {
        assert!(text.contains(&format!("FAIL {id:>2} ")), "criterion {id} should fail:\n{text}");
    }
    assert!(text.contains("repro: satrans selftest full --only 3"));
}

#[test]
fn json_schemas_match_emitted_documents() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../schemas");
    let samples = [
        ("transfer-system.schema.json", CHICKENFOOT.to_string()),
        ("cover.schema.json", stdout(&run(&["enumerate", "1", "1"], None)).lines().next().unwrap().to_string()),
        (
            "certificate.schema.json",
            stdout(&run(&["realize", "-", "--p", "5", "--q", "7"], Some(r#"{"m":1,"n":0,"relations":[]}"#))),
        ),
    ];
    for (file, sample) in samples {
        let schema: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(format!("{dir}/{file}")).unwrap()).unwrap();
        let doc: serde_json::Value = serde_json::from_str(sample.trim()).unwrap_or_else(|e| panic!("{file}: {e}: {sample}"));
        let mut required: Vec<&str> = schema["required"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
        let mut keys: Vec<&str> = doc.as_object().unwrap().keys().map(String::as_str).collect();
        let mut props: Vec<&str> = schema["properties"].as_object().unwrap().keys().map(String::as_str).collect();
        required.sort();
        keys.sort();
        props.sort();
        assert_eq!(required, keys, "{file}");
        assert_eq!(props, keys, "{file}");
    }
}
