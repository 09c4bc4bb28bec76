use std::process::{Command, Output};

fn ruelle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ruelle")).args(args).output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    ruelle(args).status.code().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = ruelle(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&["--bogus"]), 4);
    assert_eq!(code(&["measure", "--potential", "{bad"]), 4);
    assert_eq!(code(&["pressure", "--gamma", "1.9"]), 4);
    assert_eq!(code(&["--threads", "0", "measure"]), 4);
    assert_eq!(code(&["eigen-approx", "--truncation", "32"]), 3);
    assert_eq!(code(&["measure", "--volume", "30"]), 3);
    assert_eq!(code(&["measure", "--out", "/nonexistent/dir/m.csv"]), 3);
    assert_eq!(
        code(&[
            "fkg-verify",
            "--rule",
            "explicit",
            "--couplings=-1",
            "--max-volume",
            "2"
        ]),
        2
    );
    assert_eq!(code(&["fkg-verify", "--gamma", "1.88", "--max-volume", "3"]), 0);
}

#[test]
fn csv_headers() {
    let first = |args: &[&str]| stdout(args).lines().next().unwrap().to_string();
    assert_eq!(
        first(&["measure", "--volume", "3"]),
        "index,word,log_weight,weight_normalized"
    );
    assert_eq!(
        first(&["eigen-approx", "--truncation", "4", "--iters", "3"]),
        "t,z_value"
    );
    assert!(
        first(&["kernel-eigen", "--kind", "product", "--gamma", "3", "--word-depth", "3"])
            .starts_with("t_embedding,phi_value,quadrature_kind,depth_or_samples")
    );
}

#[test]
fn measure_weights_sum_to_one() {
    let text = stdout(&[
        "measure",
        "--volume",
        "5",
        "--boundary",
        "alt",
        "--gamma",
        "1.5",
        "--beta",
        "2",
    ]);
    let total: f64 = text
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap())
        .sum();
    assert_eq!(text.lines().count(), 33);
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn pressure_report_has_positive_margin() {
    let text = stdout(&["pressure", "--gamma", "3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["pressure_estimate", "upper_bound", "margin", "gamma", "beta", "K"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert!(v["margin"].as_f64().unwrap() > 0.0);
}

#[test]
fn inline_potential_matches_flags() {
    let flags = stdout(&[
        "measure",
        "--volume",
        "3",
        "--kind",
        "product",
        "--rule",
        "explicit",
        "--couplings",
        "0.5,0.25",
    ]);
    let spec = r#"{"kind":"product_type","h":0.0,"beta":1.0,"couplings":{"rule":"explicit","params":["1/2",0.25]},"truncation_K":2,"spin_scale":1.0}"#;
    assert_eq!(stdout(&["measure", "--volume", "3", "--potential", spec]), flags);
}
