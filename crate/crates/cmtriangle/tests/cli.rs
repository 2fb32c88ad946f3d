use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cmtriangle"))
}

fn code(args: &[&str]) -> i32 {
    bin().args(args).output().unwrap().status.code().unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["lambda"]), 1);
    assert_eq!(code(&["--prec", "64", "lambda", "--u", "0.9,0.1"]), 2);
    assert_eq!(code(&["--bound", "1", "search", "--delta", "7"]), 3);
}

#[test]
fn precision_from_environment() {
    let out = bin()
        .env("CMTRIANGLE_PREC", "80")
        .args(["--json", "lambda", "--u", "0,0"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["lambda"]["prec"], 80);
    assert_eq!(code(&["--prec", "63", "lambda", "--u", "0,0"]), 1);
}

#[test]
fn phitilde_json() {
    let out = bin()
        .args([
            "--prec",
            "128",
            "--json",
            "phitilde",
            "--u",
            "-0.2053959791202087719727821630347,-0.06673719914319860455000559944939",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let re: f64 = v["phi_tilde_sq"]["re"].as_str().unwrap().parse().unwrap();
    assert!((re + 2527.0 / 36.0).abs() < 1e-12);
}

#[test]
fn classfield_text_report() {
    let out = bin().args(["classfield", "--delta", "7"]).output().unwrap();
    assert!(out.status.success());
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("phi~^2 = -2527/36"), "{s}");
    assert!(s.contains("C(M) = M"), "{s}");
}
