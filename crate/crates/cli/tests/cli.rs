use std::io::Write;
use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = foldcf_cli::run(std::iter::once("foldcf").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn spec_file(json: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(json.as_bytes()).unwrap();
    f
}

fn dump(name: &str) -> String {
    let (code, out, _) = run(&["examples", "--dump", name]);
    assert_eq!(code, 0);
    out
}

#[test]
fn gen_from_spec_file() {
    let f = spec_file(&dump("lur1"));
    let (code, out, _) = run(&["gen", "--spec", f.path().to_str().unwrap(), "--n", "4"]);
    assert_eq!(code, 0);
    let lines: Vec<Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[3]["x"], "132875521042766180738219532288");
    assert_eq!(lines[2]["u"], "33048");
    assert_eq!(lines[1]["z"], "12");
}

#[test]
fn expand_and_verify() {
    let f = spec_file(&dump("altlur2"));
    let path = f.path().to_str().unwrap();
    let (code, out, _) = run(&["expand", "--spec", path, "--n", "3"]);
    assert_eq!((code, out.as_str()), (0, "[0;2,2,1,1,2,2,2,2]\n"));

    let (code, out, _) = run(&["expand", "--spec", path, "--n", "3", "--json"]);
    assert_eq!(code, 0);
    let trace: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(trace["cf"], "[0;2,2,1,1,2,2,2,2]");
    assert_eq!(trace["case"], "SpecialPierceX1Eq2");
    assert_eq!(trace["stages"][2]["step"]["concatenations_applied"], 1);

    let k = spec_file(&dump("kempner:2"));
    let (code, out, _) = run(&["verify", "--spec", k.path().to_str().unwrap(), "--n", "6"]);
    assert_eq!(code, 0);
    let report: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["stages"].as_array().unwrap().len(), 6);
}

#[test]
fn verify_failure_exits_one() {
    let f = spec_file(r#"{"variant":"ExplicitX","x_list":["2","6","72"]}"#);
    let (code, out, _) = run(&["verify", "--spec", f.path().to_str().unwrap(), "--n", "3"]);
    assert_eq!(code, 1);
    let report: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["passed"], false);
}

#[test]
fn fold_command() {
    let (code, out, _) = run(&["fold", "--cf", "[0;3]", "--z", "12", "--sign", "-1"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("[0;2,1,11,3]"));
    let step: Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(step["sign"], "-1");
    assert_eq!(step["length_after"], 4);

    let (code, out, _) = run(&["fold", "--cf", "[0;2,2,1,1]", "--z", "3", "--sign", "+1"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("[0;2,2,1,1,2,2,2,2]\n"));
}

#[test]
fn input_errors_exit_two() {
    let bad_json = spec_file("{not json");
    let missing_u1 = spec_file(r#"{"variant":"LurothA"}"#);
    for args in [
        vec!["fold", "--cf", "[0;3", "--z", "2", "--sign", "1"],
        vec!["fold", "--cf", "[0;3]", "--z", "0", "--sign", "1"],
        vec!["fold", "--cf", "[0;3]", "--z", "2", "--sign", "2"],
        vec!["fold", "--cf", "[0;0,3]", "--z", "2", "--sign", "1"],
        vec!["gen", "--example", "nope", "--n", "2"],
        vec!["gen", "--spec", bad_json.path().to_str().unwrap(), "--n", "2"],
        vec!["gen", "--spec", missing_u1.path().to_str().unwrap(), "--n", "2"],
        vec!["gen", "--spec", "/nonexistent/spec.json", "--n", "2"],
        vec!["gen", "--example", "lur1"],
        vec!["gen", "--n", "2"],
        vec!["gen", "--example", "lur1", "--n", "2", "--bogus"],
        vec!["examples"],
        vec!["frobnicate"],
    ] {
        let (code, _, err) = run(&args);
        assert_eq!(code, 2, "{args:?}");
        assert!(!err.is_empty(), "{args:?}");
    }
}

#[test]
fn digit_budget_flag() {
    let (code, _, err) = run(&["gen", "--example", "lur1", "--n", "8", "--digit-budget", "100"]);
    assert_eq!(code, 2);
    assert!(err.contains("budget is 100"), "{err}");
    let (code, _, _) = run(&["gen", "--example", "lur1", "--n", "4", "--digit-budget", "100"]);
    assert_eq!(code, 0);
}

#[test]
fn digit_budget_environment() {
    let bin = env!("CARGO_BIN_EXE_foldcf");
    let out = Command::new(bin)
        .args(["gen", "--example", "lur1", "--n", "8"])
        .env("FOLDCF_DIGIT_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(bin).args(["expand", "--example", "lur1", "--n", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "[0;2,1,11,3,5201,1,2,11,1,2]\n");
}

#[test]
fn examples_listing() {
    let (code, out, _) = run(&["examples", "--list"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().collect::<Vec<_>>(), ["lur1", "altlur2", "zjisj", "kempner:<u>"]);

    let lur1: Value = serde_json::from_str(&dump("lur1")).unwrap();
    assert_eq!(lur1["variant"], "LurothA");
    assert_eq!(lur1["u1"], "3");
    assert_eq!(lur1["m"], "1");
    assert_eq!(lur1["alpha"]["const"], serde_json::json!(["1"]));

    let kempner: Value = serde_json::from_str(&dump("kempner:2")).unwrap();
    assert_eq!(kempner["variant"], "ExplicitX");
    assert_eq!(kempner["x_list"].as_array().unwrap()[..4], serde_json::json!(["2", "4", "16", "256"]).as_array().unwrap()[..]);
}

#[test]
fn mu_report() {
    let (code, out, _) = run(&["mu", "--example", "lur1", "--n", "6"]);
    assert_eq!(code, 0);
    let report: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["predicted"]["closed_form"], "2+sqrt(3)");
    assert_eq!(report["window_start"], 10);
    let est = report["estimate"].as_f64().unwrap();
    assert!((est - 3.732).abs() < 0.2, "{est}");

    let (code, out, _) = run(&["mu", "--example", "kempner:2", "--n", "8", "--window", "10"]);
    assert_eq!(code, 0);
    let report: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["window_start"], 10);
    assert!(report["predicted"].is_null());

    let (code, _, _) = run(&["mu", "--example", "lur1", "--n", "2", "--window", "50"]);
    assert_eq!(code, 2);
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["gen", "--example", "zjisj", "--n", "6"],
        vec!["expand", "--example", "lur1", "--n", "4", "--json"],
        vec!["mu", "--example", "altlur2", "--n", "5"],
        vec!["examples", "--dump", "altlur2", "--pretty"],
    ] {
        assert_eq!(run(&args), run(&args), "{args:?}");
    }
}

#[test]
fn help_goes_to_stdout() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("expand"));
}
