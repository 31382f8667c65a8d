use serde_json::Value;

use crate::execute;

const SCHEMA: &str = include_str!("../schema/output.schema.json");

struct Output {
    code: u8,
    stdout: String,
    stderr: String,
}

fn wsf_env(args: &[&str], threads_env: Option<&str>) -> Output {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = execute(
        std::iter::once("wsf").chain(args.iter().copied()),
        threads_env,
        &mut out,
        &mut err,
    );
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn wsf(args: &[&str]) -> Output {
    wsf_env(args, None)
}

fn stdout(args: &[&str]) -> String {
    let out = wsf(args);
    assert!(out.code == 0, "wsf {args:?} exited {}: {}", out.code, out.stderr);
    out.stdout
}

fn validate(def: &str, text: &str) {
    let mut schema: Value = serde_json::from_str(SCHEMA).unwrap();
    let root = schema.as_object_mut().unwrap();
    root.remove("anyOf");
    root.insert("$ref".into(), Value::String(format!("#/$defs/{def}")));
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let instance: Value = serde_json::from_str(text).unwrap();
    let errors: Vec<String> = validator.iter_errors(&instance).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{def}: {errors:?}");
}

#[test]
fn eval_matches_worked_examples() {
    assert_eq!(
        stdout(&["eval", "--m", "4", "--x", "0110"]),
        "m,variant,modulus,x,weighted_index,value\n4,f,4,0110,3,0\n"
    );
    let g = stdout(&["eval", "--m", "4", "--variant", "g", "--x", "1111"]);
    assert!(g.ends_with("4,g,5,1111,5,1\n"), "{g}");
}

#[test]
fn table1_single_row() {
    assert_eq!(
        stdout(&["table1", "--m-max", "1"]),
        "m,max_abs,normalized_log\n1,1.000,0.000\n"
    );
}

#[test]
fn count_example() {
    assert_eq!(
        stdout(&["count", "--m", "5", "--k", "2", "--b", "0"]),
        "m,k,b,count\n5,2,0,2\n"
    );
}

#[test]
fn measures_small_cases_are_exact() {
    let text = stdout(&["measures", "--m-max", "3", "--format", "json"]);
    let rows: Vec<Value> = serde_json::from_str(&text).unwrap();
    assert_eq!(rows[1]["weight"], 3);
    assert_eq!(rows[1]["avg_sensitivity_exact"], "1");
    assert_eq!(rows[2]["weight"], 6);
    assert_eq!(rows[2]["avg_sensitivity_exact"], "3/2");
    assert_eq!(rows[2]["max_sensitivity"], 3);
}

#[test]
fn table1_fixture_mismatch_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "m,max_abs,normalized_log\n1,1,0\n2,0.600,0.000\n").unwrap();
    let out = wsf(&[
        "table1",
        "--m-max",
        "2",
        "--compare-fixture",
        "--fixture",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("m=2"));
}

#[test]
fn over_cap_request_exits_one() {
    let out = wsf(&["table1", "--m-max", "40"]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(wsf(&["eval", "--m", "4"]).code, 1);
    assert_eq!(wsf(&["no-such-command"]).code, 1);
    assert_eq!(wsf(&["eval", "--m", "4", "--x", "01"]).code, 1);
    assert_eq!(wsf(&["--help"]).code, 0);
}

#[test]
fn bound_check_exit_code_follows_form() {
    let displayed = wsf(&["bound-check", "--m-max", "8"]);
    assert_eq!(displayed.code, 2);
    let corrected = wsf(&["bound-check", "--m-max", "8", "--form", "corrected"]);
    assert_eq!(corrected.code, 0);
    assert_eq!(displayed.stdout, corrected.stdout);
}

#[test]
fn zero_sum_with_zero_allowed_finds_counterexamples() {
    let out = wsf(&["zero-sum", "--m", "4", "--include-zero"]);
    assert_eq!(out.code, 2);
    assert!(out.stdout.contains("0;1;3"));
    assert_eq!(wsf(&["zero-sum", "--m", "4"]).code, 0);
}

#[test]
fn output_is_independent_of_thread_count() {
    for args in [
        &["measures", "--m", "18"][..],
        &["spectrum", "--m", "18"],
        &["zero-sum", "--m-max", "14", "--mode", "sampled", "--samples", "500"],
        &["sieve-verify", "--k-max", "5", "--trials", "30"],
    ] {
        let one = stdout(&[args, &["--threads", "1"]].concat());
        let four = stdout(&[args, &["--threads", "4"]].concat());
        assert_eq!(one, four, "{args:?}");
    }
}

#[test]
fn threads_env_is_validated() {
    assert_eq!(wsf_env(&["constants"], Some("zero")).code, 1);
    assert_eq!(wsf_env(&["constants"], Some("2")).code, 0);
    // The flag takes precedence over the environment.
    assert_eq!(wsf_env(&["constants", "--threads", "2"], Some("zero")).code, 0);
}

#[test]
fn output_file_receives_the_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = wsf(&[
        "count",
        "--m",
        "5",
        "--k",
        "2",
        "--b",
        "0",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(path).unwrap(), "m,k,b,count\n5,2,0,2\n");
}

#[test]
fn json_output_conforms_to_schema() {
    let cases: [(&str, &[&str]); 12] = [
        ("eval", &["eval", "--m", "5", "--variant", "g", "--x", "10110"]),
        ("table", &["table", "--m", "3"]),
        ("measures", &["measures", "--m-max", "6", "--proof-terms"]),
        ("spectrum", &["spectrum", "--m", "8"]),
        ("spectrum_coefficients", &["spectrum", "--m", "4", "--coefficients"]),
        ("table1", &["table1", "--m-max", "6"]),
        ("table1", &["table1", "--m-max", "6", "--compare-fixture"]),
        ("count", &["count", "--m", "6", "--exclude", "0,3"]),
        ("bound_check", &["bound-check", "--m-max", "6", "--form", "corrected"]),
        ("sieve_verify", &["sieve-verify", "--k-max", "3", "--trials", "5"]),
        ("zero_sum", &["zero-sum", "--m-max", "8"]),
        ("constants", &["constants"]),
    ];
    for (def, args) in cases {
        validate(def, &stdout(&[args, &["--format", "json"]].concat()));
    }
}

#[test]
fn csv_and_json_carry_the_same_rows() {
    let csv = stdout(&["count", "--m", "4"]);
    let json: Vec<Value> = serde_json::from_str(&stdout(&["count", "--m", "4", "--format", "json"])).unwrap();
    assert_eq!(csv.lines().count() - 1, json.len());
    let first: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(first, ["4", "0", "0", "1"]);
    assert_eq!(json[0]["count"], 1);
}

#[test]
#[should_panic(expected = "count")]
fn schema_rejects_unknown_fields() {
    validate("count", r#"[{"m": 4, "k": 0, "b": 0, "count": 1, "extra": true}]"#);
}
