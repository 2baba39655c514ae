use std::path::Path;
use std::process::Command;

fn uroe(args: &[&str]) -> (i32, String) {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let out = Command::new(env!("CARGO_BIN_EXE_uroe"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
    )
}

#[test]
fn exit_codes_follow_the_status() {
    let (code, out) = uroe(&["check-metric", "line6.emx"]);
    assert_eq!(code, 0);
    assert!(out.contains(r#""status":"pass""#));

    let (code, out) = uroe(&["check-metric", "bad_triangle.emx"]);
    assert_eq!(code, 1);
    assert!(out.contains(r#""rule":"triangle""#));

    let (code, out) = uroe(&["check-metric", "malformed/no_header.emx"]);
    assert_eq!(code, 2);
    assert!(out.contains(r#""status":"error""#));
}

#[test]
fn pretty_reports_parse_to_the_same_document() {
    let args = ["norm", "tridiag6.smx"];
    let (_, plain) = uroe(&args);
    let (_, pretty) = uroe(&["--pretty", args[0], args[1]]);
    let a: serde_json::Value = serde_json::from_str(&plain).unwrap();
    let b: serde_json::Value = serde_json::from_str(&pretty).unwrap();
    assert_eq!(a, b);
    assert!(pretty.lines().count() > 1);
}

#[test]
fn infinite_values_are_reported_as_strings() {
    let (code, out) = uroe(&[
        "propagation",
        "cross_pairs.smx",
        "--metric",
        "two_pairs.emx",
    ]);
    assert_eq!(code, 1);
    assert!(out.contains(r#""inf""#), "{out}");
}

#[test]
fn help_exits_zero() {
    let (code, out) = uroe(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("morita"));
}
