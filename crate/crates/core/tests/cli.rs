use std::path::PathBuf;
use std::process::Command;

use clap::Parser;
use stokes_resum::cli::{run, Cli};

const BIN: &str = env!("CARGO_BIN_EXE_stokes-resum");

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn report(args: &[&str]) -> stokes_resum::cli::Report {
    let cli = Cli::try_parse_from(std::iter::once("stokes-resum").chain(args.iter().copied())).unwrap();
    run(&cli).unwrap()
}

fn exit_code(args: &[&str]) -> i32 {
    Command::new(BIN).args(args).output().unwrap().status.code().unwrap()
}

#[test]
fn demo_euler_verdict() {
    let r = report(&["demo", "euler", "--degree", "14"]);
    assert!(r.passed);
    assert_eq!(r.json["verdict"]["mismatches"], 0);
    assert_eq!(r.json["parameters"]["degree"], 14);
    let table = r.json["result"]["off_diagonal"].as_array().unwrap();
    let first = &table[1];
    assert_eq!(first["coefficient"], "-1/2");
}

#[test]
fn demo_airy_verdict() {
    let r = report(&["demo", "airy", "--degree", "6"]);
    assert!(r.passed);
    assert_eq!(r.json["verdict"]["exact_match"], true);
}

#[test]
fn check_groupoid_verdict() {
    let r = report(&["check-groupoid", "--kind", "pair", "--k", "3", "--degree", "10"]);
    assert!(r.passed);
    assert!(r.json["result"]["axioms"].as_array().unwrap().iter().all(|a| a["passed"] == true));
}

#[test]
fn resum_from_files() {
    let (sys, model) = (data("euler_system.json"), data("euler_model.json"));
    let r = report(&["resum", "--system", &sys, "--model", &model, "--chart", "pair", "--k", "2", "--degree", "6", "--mu-chart"]);
    assert!(r.passed);
    assert_eq!(r.json["inputs"]["system"].as_str().unwrap().len(), 64);
    let airy = report(&[
        "resum",
        "--system",
        &data("airy_system.json"),
        "--model",
        &data("airy_model.json"),
        "--chart",
        "pair",
        "--k",
        "3",
        "--degree",
        "6",
        "--pre-gauge",
        &data("airy_pre_gauge.json"),
        "--gauge",
        &data("airy_gauge.json"),
    ]);
    let e11 = &airy.json["result"]["sigma"]["entries"][0]["coeffs"];
    assert!(e11.as_array().unwrap().iter().any(|t| t[0] == 3 && t[1] == 3 && t[2] == "-7/6"));
}

#[test]
fn output_is_byte_stable_across_runs_and_threads() {
    let args = ["demo", "euler", "--degree", "10"];
    let out = |threads: &str| {
        let o = Command::new(BIN).args(args).env("STOKES_RESUM_THREADS", threads).output().unwrap();
        assert!(o.status.success());
        o.stdout
    };
    let a = out("1");
    assert_eq!(a, out("1"));
    assert_eq!(a, out("4"));
}

#[test]
fn exit_codes_partition_failures() {
    assert_eq!(exit_code(&["demo", "euler", "--degree", "4"]), 0);
    // malformed input
    assert_eq!(exit_code(&["transport", "--system", "/nonexistent.json", "--path", "1,0;2,0", "--tol", "1e-10"]), 2);
    assert_eq!(exit_code(&["push", "--system", &data("euler_model.json"), "--n", "2"]), 2);
    assert_eq!(exit_code(&["transport", "--system", &data("airy_system.json"), "--path", "1,0;-1,0", "--tol", "1e-10"]), 2);
    assert_eq!(exit_code(&["demo", "euler", "--degree", "-1"]), 2);
    // mathematical failure: the Airy leading term is nilpotent
    assert_eq!(exit_code(&["stokes-directions", "--system", &data("airy_system.json")]), 3);
    // tolerance failure
    assert_eq!(exit_code(&["transport", "--system", &data("airy_system.json"), "--path", "1,0;2,0", "--tol", "1e-15"]), 4);
}

#[test]
fn transport_and_companion() {
    let r = report(&["transport", "--system", &data("airy_system.json"), "--path", "5,0;4,0.5", "--tol", "1e-12"]);
    assert!(r.json["result"]["steps"].as_u64().unwrap() > 0);
    let c = report(&["companion", "--operator", &data("airy_operator.json")]);
    let want: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(data("airy_companion_system.json")).unwrap()).unwrap();
    assert_eq!(c.json["result"]["system"], want);
}

#[test]
fn output_flag_writes_the_file() {
    let path = std::env::temp_dir().join(format!("stokes-resum-{}.json", std::process::id()));
    let p = path.to_string_lossy().into_owned();
    assert_eq!(exit_code(&["-o", &p, "push", "--system", &data("euler_system.json"), "--n", "1"]), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("\"command\": \"push\""));
    std::fs::remove_file(path).unwrap();
}
