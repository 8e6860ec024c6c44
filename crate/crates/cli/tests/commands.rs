//! End-to-end runs of the `peakon` binary: output formats, exit statuses
//! and diagnostics.

use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const SQRT3: f64 = 1.732_050_807_568_877_2;

fn peakon(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_peakon"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary starts");
    child
        .stdin
        .take()
        .expect("stdin is piped")
        .write_all(stdin.as_bytes())
        .expect("stdin accepts input");
    child.wait_with_output().expect("binary finishes")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("stderr is UTF-8")
}

fn json(output: &Output) -> Value {
    serde_json::from_str(&stdout(output)).expect("stdout is JSON")
}

fn single_pair_configuration() -> String {
    let position = SQRT3.ln();
    let mass = SQRT3 / 4.0;
    serde_json::json!({"K": 1, "x": [-position, position], "m_odd": [mass], "n_even": [mass]})
        .to_string()
}

fn number(value: &Value) -> f64 {
    value.as_f64().expect("a JSON number")
}

#[test]
fn forward_reproduces_the_single_pair_closed_form() {
    let output = peakon(&["forward"], &single_pair_configuration());
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let text = stdout(&output);
    let key_offsets: Vec<usize> = [
        "\"lambda\":",
        "\"mu\":",
        "\"a\":",
        "\"b\":",
        "\"b_inf\":",
        "\"b_inf_star\":",
    ]
    .iter()
    .map(|key| {
        text.find(key)
            .unwrap_or_else(|| panic!("{key} missing from {text}"))
    })
    .collect();
    assert!(key_offsets.windows(2).all(|w| w[0] < w[1]), "{text}");
    let value = json(&output);
    assert!((number(&value["lambda"][0]) - 8.0).abs() <= 1e-12 * 8.0);
    assert!((number(&value["a"][0]) - 2.0).abs() <= 1e-12 * 2.0);
    assert!((number(&value["b_inf"]) - 0.75).abs() <= 1e-12);
    assert!((number(&value["b_inf_star"]) - 0.75).abs() <= 1e-12);
    assert_eq!(value["mu"], Value::Array(vec![]));
    assert_eq!(value["b"], Value::Array(vec![]));
}

#[test]
fn serialized_output_parses_back_to_the_same_values() {
    let config: peakon_spectral::core_types::InterlacingConfiguration = serde_json::from_str(
        r#"{"K":2,"x":[-1.25,0.3,0.7,2.9],"m_odd":[0.4,3.1],"n_even":[1.7,0.2]}"#,
    )
    .expect("configuration deserializes");
    let expected =
        peakon_spectral::forward_spectral::forward_map(&config).expect("valid configuration");
    let output = peakon(
        &["forward"],
        r#"{"K":2,"x":[-1.25,0.3,0.7,2.9],"m_odd":[0.4,3.1],"n_even":[1.7,0.2]}"#,
    );
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let parsed: peakon_spectral::core_types::SpectralData =
        serde_json::from_str(&stdout(&output)).expect("spectral data deserializes");
    assert_eq!(parsed, expected);
}

#[test]
fn roundtrip_of_a_valid_configuration_succeeds() {
    let input =
        r#"{"K":3,"x":[-2.0,-0.5,0.1,0.9,1.4,2.6],"m_odd":[1.0,0.5,2.0],"n_even":[3.0,0.25,1.5]}"#;
    let output = peakon(&["roundtrip"], input);
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let report = json(&output);
    assert_eq!(report["direction"], "configuration");
    assert_eq!(report["passed"], true);
    assert!(number(&report["max_relative_error"]) <= 1e-8);
}

#[test]
fn roundtrip_of_spectral_data_runs_inverse_first() {
    let input =
        r#"{"lambda":[0.5,2.0],"mu":[1.0],"a":[1.0,0.3],"b":[0.7],"b_inf":1.2,"b_inf_star":0.9}"#;
    let output = peakon(&["roundtrip", "--tol", "1e-9"], input);
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let report = json(&output);
    assert_eq!(report["direction"], "spectral");
    assert_eq!(number(&report["tolerance"]), 1e-9);
}

#[test]
fn inverse_rejects_data_violating_the_single_pair_constraint() {
    let input = r#"{"lambda":[1],"mu":[],"a":[1],"b":[],"b_inf":0.5,"b_inf_star":0.5}"#;
    let output = peakon(&["inverse"], input);
    assert_eq!(output.status.code(), Some(1));
    assert!(
        stderr(&output).contains("single-pair constraint"),
        "{}",
        stderr(&output)
    );
    assert!(stdout(&output).is_empty());
}

#[test]
fn inverse_recovers_the_single_pair_configuration() {
    let input = r#"{"lambda":[8],"mu":[],"a":[2],"b":[],"b_inf":0.75,"b_inf_star":0.75}"#;
    let output = peakon(&["inverse"], input);
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let value = json(&output);
    assert!((number(&value["x"][0]) + SQRT3.ln()).abs() <= 1e-12);
    assert!((number(&value["x"][1]) - SQRT3.ln()).abs() <= 1e-12);
    assert!((number(&value["m_odd"][0]) - SQRT3 / 4.0).abs() <= 1e-12);
    assert!((number(&value["n_even"][0]) - SQRT3 / 4.0).abs() <= 1e-12);
}

#[test]
fn malformed_json_is_an_input_error_with_a_location() {
    let output = peakon(&["forward"], "{\n  \"x\": [0, 1,\n");
    assert_eq!(output.status.code(), Some(2));
    let message = stderr(&output);
    assert!(message.contains("malformed JSON at line"), "{message}");
    assert!(message.contains("column"), "{message}");
}

#[test]
fn bad_fields_are_reported_by_path() {
    let output = peakon(&["forward"], r#"{"x":[0,"zz"],"m_odd":[1],"n_even":[1]}"#);
    assert_eq!(output.status.code(), Some(2));
    assert!(
        stderr(&output).contains("field `x[1]`"),
        "{}",
        stderr(&output)
    );

    let output = peakon(&["forward"], r#"{"x":[0,1],"n_even":[1]}"#);
    assert_eq!(output.status.code(), Some(2));
    assert!(
        stderr(&output).contains("field `m_odd`: missing"),
        "{}",
        stderr(&output)
    );
}

#[test]
fn invalid_configurations_are_validation_failures() {
    let output = peakon(
        &["forward"],
        r#"{"K":1,"x":[1,0],"m_odd":[1],"n_even":[-1]}"#,
    );
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr(&output).lines().count() >= 2, "{}", stderr(&output));

    let output = peakon(
        &["forward"],
        r#"{"K":2,"x":[0,1],"m_odd":[1],"n_even":[1]}"#,
    );
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr(&output).contains("K = 2"), "{}", stderr(&output));
}

#[test]
fn rational_forward_is_exact_for_the_single_pair_example() {
    // e^{x} = (1/√3, √3) is irrational, so use e^{x} = (1, 2) with m₁ = 1, n₂ = 1/2.
    let input = r#"{"K":1,"exp_x":["1","2"],"m_odd":[1],"n_even":["1/2"]}"#;
    let output = peakon(&["forward", "--mode", "rational"], input);
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let value = json(&output);
    assert_eq!(value["b_inf"], "1");
    assert_eq!(value["b_inf_star"], "1");
    assert_eq!(value["A"], serde_json::json!(["1", "-1/2"]));
    assert_eq!(number(&value["lambda"][0]), 2.0);
    assert_eq!(number(&value["a"][0]), 2.0);
}

#[test]
fn rational_inverse_recovers_exact_quantities() {
    let input = r#"{"lambda":[8],"mu":[],"a":[2],"b":[],"b_inf":"3/4","b_inf_star":0.75}"#;
    let output = peakon(&["inverse", "--mode", "rational"], input);
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    assert_eq!(
        json(&output),
        serde_json::json!({"K": 1, "exp_2x": ["1/3", "3"], "mass_exp_minus_x": ["3/4", "1/4"]})
    );
}

#[test]
fn rational_conserved_quantities_are_exact() {
    let input = r#"{"K":1,"exp_x":["1","2"],"m_odd":[1],"n_even":["1/2"]}"#;
    let output = peakon(&["conserved", "--mode", "rational"], input);
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    assert_eq!(
        json(&output),
        serde_json::json!({"A": ["1/4"], "A_twin": []})
    );
}

#[test]
fn rational_mode_rejects_float_only_commands() {
    let input = r#"{"K":1,"exp_x":["1","2"],"m_odd":[1],"n_even":["1/2"]}"#;
    let output = peakon(&["evolve", "--mode", "rational"], input);
    assert_eq!(output.status.code(), Some(2));
    assert!(
        stderr(&output).contains("--mode float"),
        "{}",
        stderr(&output)
    );
}

#[test]
fn evolve_writes_one_row_per_time_sample() {
    let input = r#"{"K":2,"x":[0,1,2,3],"m_odd":[1,1],"n_even":[2,1]}"#;
    let output = peakon(
        &["evolve", "--t0", "-0.5", "--t1", "0.5", "--steps", "4"],
        input,
    );
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let text = stdout(&output);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,x_1,x_2,x_3,x_4,m_1,n_2,m_3,n_4"));
    let rows: Vec<Vec<f64>> = lines
        .map(|line| {
            line.split(',')
                .map(|cell| cell.parse().expect("numeric cell"))
                .collect()
        })
        .collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0][0], -0.5);
    assert_eq!(rows[4][0], 0.5);
    assert!(rows
        .iter()
        .all(|row| row.len() == 9 && row[1..5].windows(2).all(|w| w[0] < w[1])));
}

#[test]
fn evolve_rejects_an_empty_time_grid() {
    let input = r#"{"K":1,"x":[0,1],"m_odd":[1],"n_even":[1]}"#;
    let output = peakon(&["evolve", "--steps", "0"], input);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn wavefunction_lists_both_sides_of_every_breakpoint() {
    let input = r#"{"K":1,"x":[0,1],"m_odd":[1],"n_even":[2]}"#;
    let output = peakon(&["wavefunction", "--lambda", "1/2"], input);
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let text = stdout(&output);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "y,phi1,phi2,phi3");
    assert_eq!(lines[1], "-1,1,0,0");
    assert_eq!(lines.len(), 7);

    let output = peakon(&["wavefunction"], input);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("--lambda"), "{}", stderr(&output));
}

#[test]
fn conserved_quantities_match_the_forward_numerators() {
    let input = r#"{"K":1,"x":[0,1],"m_odd":[1],"n_even":[2]}"#;
    let output = peakon(&["conserved"], input);
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let value = json(&output);
    assert_eq!(value["A"].as_array().map(Vec::len), Some(1));
    assert_eq!(value["A_twin"], Value::Array(vec![]));
}

#[test]
fn verify_runs_a_named_suite_and_rejects_unknown_names() {
    let output = peakon(&["verify", "--suite", "single-pair"], "");
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("suite single-pair: PASS"), "{text}");
    assert!(text.contains("all suites passed"), "{text}");

    let output = peakon(&["verify", "--suite", "no-such-suite"], "");
    assert_eq!(output.status.code(), Some(2));
    assert!(
        stderr(&output).contains("unknown suite"),
        "{}",
        stderr(&output)
    );
}

#[test]
fn input_and_output_files_replace_the_standard_streams() {
    let dir = std::env::temp_dir().join(format!("peakon-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temporary directory");
    let input = dir.join("config.json");
    let result = dir.join("spectral.json");
    std::fs::write(&input, single_pair_configuration()).expect("input written");
    let output = peakon(
        &[
            "forward",
            "--input",
            input.to_str().expect("UTF-8 path"),
            "--output",
            result.to_str().expect("UTF-8 path"),
        ],
        "",
    );
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    assert!(stdout(&output).is_empty());
    let value: Value =
        serde_json::from_str(&std::fs::read_to_string(&result).expect("output written"))
            .expect("JSON");
    assert!((number(&value["lambda"][0]) - 8.0).abs() <= 1e-11);

    let missing = dir.join("missing.json");
    let output = peakon(
        &["forward", "--input", missing.to_str().expect("UTF-8 path")],
        "",
    );
    assert_eq!(output.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).expect("cleanup");
}
