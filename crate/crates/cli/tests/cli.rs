use std::io::Write;
use std::process::{Command, Output, Stdio};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lowdigit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_lowdigit"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

#[test]
fn construct_reports_degree_and_self_check() {
    let o = run(&["construct", "--p", "2", "--e", "3", "--format", "json"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["coeffs"], serde_json::json!(["0", "0", "0", "0", "1"]));
    assert_eq!(v["degree"], "4");
    assert_eq!(v["self_check"], "passed");
    assert_eq!(v["e"], 3);

    let o = run(&[
        "construct",
        "--p",
        "2",
        "--e",
        "3",
        "--method",
        "oracle-minimal",
    ]);
    assert!(stdout(&o).contains("degree:     3"));
}

#[test]
fn invalid_parameters_exit_two() {
    assert_eq!(
        run(&["construct", "--p", "4", "--e", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["construct", "--p", "3", "--e", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["impossible", "--p", "2", "--r", "1", "--e", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["oracle", "--p", "2", "--e", "3", "--r", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&[
            "oracle",
            "--p",
            "2",
            "--e",
            "3",
            "--target",
            "remove-low-digits"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        run(&["construct", "--p", "263", "--e", "1"]).status.code(),
        Some(2)
    );
}

#[test]
fn guards_exit_four() {
    let o = run(&["construct", "--p", "7", "--e", "20", "--method", "hs15"]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(
        run(&["bench", "--p", "7", "--e", "7"]).status.code(),
        Some(4)
    );
    assert_eq!(run(&["table", "--pmax", "17"]).status.code(), Some(4));
    let o = run(&["oracle", "--p", "2", "--e", "3", "--degree-cap", "2"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn verify_reports_first_counterexample() {
    let identity = r#"{"p":"2","e":2,"basis":"monomial","coeffs":["0","1"]}"#;
    let o = run_with_stdin(&["verify", "-"], identity);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("x = 2"));

    let o = run_with_stdin(&["verify", "-", "--format", "json"], identity);
    assert_eq!(json(&o)["counterexample"]["x"], "2");

    let square = r#"{"p":"2","e":2,"basis":"monomial","coeffs":["0","0","1"]}"#;
    assert_eq!(
        run_with_stdin(&["verify", "-"], square).status.code(),
        Some(0)
    );

    // Newton form of x^2 is x + x(x-1)
    let falling = r#"{"p":"2","e":2,"basis":"falling","coeffs":["0","1","1"]}"#;
    assert_eq!(
        run_with_stdin(&["verify", "-"], falling).status.code(),
        Some(0)
    );

    let bad = r#"{"p":"2","e":2,"basis":"monomial","coeffs":["0","4"]}"#;
    assert_eq!(run_with_stdin(&["verify", "-"], bad).status.code(), Some(2));
    assert_eq!(
        run_with_stdin(&["verify", "-", "--p", "3"], square)
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn oracle_verdicts() {
    let o = run(&["oracle", "--p", "2", "--e", "3", "--format", "json"]);
    let v = json(&o);
    assert_eq!(v["kind"], "representable");
    assert_eq!(v["minimal_degree"], "3");

    let o = run(&[
        "oracle",
        "--p",
        "2",
        "--e",
        "3",
        "--target",
        "remove-low-digits",
        "--r",
        "2",
        "--format",
        "json",
    ]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["kind"], "not_representable");
    assert_eq!(v["failing_index"], "4");
    assert_eq!(v["required_divisor"], "8");
    assert_eq!(v["actual_difference"], "4");

    let o = run(&[
        "oracle", "--p", "3", "--e", "2", "--target", "constant", "--c", "5", "--format", "json",
    ]);
    assert_eq!(json(&o)["minimal_degree"], "0");
}

#[test]
fn impossibility_certificate_json() {
    let o = run(&[
        "impossible",
        "--p",
        "2",
        "--r",
        "2",
        "--e",
        "3",
        "--format",
        "json",
    ]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["contradiction"], true);
}

#[test]
fn tables_are_csv_by_default() {
    let o = run(&["table", "--pmax", "5", "--emax", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("p,e,method,degree,nonscalar_mults,depth")
    );
    assert!(text.contains("2,2,ch18-analytic,2,,"));
    // three primes, two exponents, five methods
    assert_eq!(lines.count(), 3 * 2 * 5);

    let o = run(&["bench", "--p", "3", "--e", "2", "--format", "json"]);
    let rows = json(&o);
    assert!(rows.as_array().unwrap().iter().all(|r| r["p"] == "3"));
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("l.json");
    let path = path.to_str().unwrap();
    let o = run(&[
        "construct",
        "--p",
        "3",
        "--e",
        "2",
        "--format",
        "json",
        "-o",
        path,
    ]);
    assert!(o.status.success() && o.stdout.is_empty());
    assert_eq!(
        run(&["verify", path, "--p", "3", "--e", "2"]).status.code(),
        Some(0)
    );
}
