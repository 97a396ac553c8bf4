use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cone-exit"))
        .args(args)
        .env_remove("CONE_EXIT_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Parsed CSV rows (header excluded).
fn rows(out: &Output) -> (Vec<String>, Vec<Vec<String>>) {
    let text = stdout(out);
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().unwrap().iter().map(str::to_owned).collect();
    let body = rdr
        .records()
        .map(|r| r.unwrap().iter().map(str::to_owned).collect())
        .collect();
    (header, body)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = run(&all);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn eval_examples() {
    let out = run(&["eval", "--m", "1", "--x", "1"]);
    assert!(out.status.success());
    let (header, body) = rows(&out);
    assert_eq!(header, ["x", "phi", "phi_tilde"]);
    assert!((num(&body[0][2]) - 0.5).abs() < 1e-15);

    let v = json(&["eval", "--m", "2", "--x", "0"]);
    assert_eq!(v["rows"][0]["phi"], 1.0);

    let v = json(&["eval", "--m", "4", "--x", "1"]);
    assert!((v["rows"][0]["phi"].as_f64().unwrap() - 1.0 / 17.0).abs() < 1e-15);
}

#[test]
fn csv_numbers_have_seventeen_significant_digits() {
    let out = run(&["eval", "--m", "3", "--x", "0.5,1,2"]);
    let (_, body) = rows(&out);
    assert_eq!(body.len(), 3);
    for row in body {
        for field in row {
            let mantissa = field.split('e').next().unwrap().replace(['-', '.'], "");
            assert_eq!(mantissa.len(), 17, "{field}");
        }
    }
}

#[test]
fn factor_examples() {
    let pick = |out: &Output, q: &str| -> Vec<String> {
        rows(out)
            .1
            .into_iter()
            .filter(|r| r[0] == q)
            .map(|r| r[2].clone())
            .collect()
    };
    let out = run(&["factor", "--m", "2"]);
    assert!(out.status.success());
    let scales: Vec<f64> = pick(&out, "scale").iter().map(|s| num(s)).collect();
    assert_eq!(scales.len(), 1);
    assert!((scales[0] - 2.0).abs() < 1e-14);
    assert_eq!(pick(&out, "k_tilde_half_gaussian"), ["true"]);

    let out = run(&["factor", "--m", "3"]);
    let scales: Vec<f64> = pick(&out, "scale").iter().map(|s| num(s)).collect();
    assert!((scales[0] - 4.0).abs() < 1e-14 && scales.len() == 1);

    let out = run(&["factor", "--m", "4"]);
    assert_eq!(pick(&out, "coefficient"), ["1", "8", "8"]);
    let scales: Vec<f64> = pick(&out, "scale").iter().map(|s| num(s)).collect();
    assert!((scales[0] - 6.82843).abs() < 1e-5);
    assert!((scales[1] - 1.17157).abs() < 1e-5);
}

#[test]
fn factor_by_angle_and_cap() {
    let out = run(&["factor", "--c", "0.5235988"]);
    assert!(out.status.success());
    let v = json(&["factor", "--m", "60"]);
    assert_eq!(v["config"]["m"], 60);
    let out = run(&["factor", "--m", "61"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["factor", "--m", "2.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn levy_thorin_asym_examples() {
    let v = json(&["levy", "--m", "2", "--z", "1"]);
    assert!((v["rows"][0]["density"].as_f64().unwrap() - (-0.5f64).exp()).abs() < 1e-15);
    assert!(
        v["residual_summary"]["max_frullani_residual"]
            .as_f64()
            .unwrap()
            < 1e-7
    );

    let v = json(&["thorin", "--x", "1"]);
    let row = &v["rows"][0];
    assert!((row["thorin_exponent"].as_f64().unwrap() - 1.76275).abs() <= 1e-5);
    assert!(row["residual"].as_f64().unwrap() <= 1e-8);

    let v = json(&["asym", "--c", "1.5707963", "--x", "0"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for r in rows {
        assert_eq!(r["check"], 1.0);
    }
}

#[test]
fn quadrature_failure_exits_three() {
    let out = run(&["thorin", "--x", "1", "--tol", "1e-16"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["eval", "--x", "1"][..],
        &["eval", "--m", "1", "--c", "1", "--x", "1"],
        &["eval", "--m", "1", "--x", "-1"],
        &["mc-verify", "--m", "1", "--x", "1", "--n", "10"],
        &["sim", "--c", "4", "--x", "1", "--n", "1000"],
        &["--format", "csv"],
        &["bogus"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn step_cap_exits_four() {
    let out = run(&[
        "sim",
        "--c",
        "1",
        "--x",
        "1",
        "--n",
        "1000",
        "--max-steps",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn m_from_c() {
    let out = run(&["--m-from-c", "0.5235988"]);
    assert!(out.status.success());
    assert!((num(stdout(&out).trim()) - 3.0).abs() < 1e-6);
}

#[test]
fn mc_verify_example() {
    let out = run(&[
        "mc-verify",
        "--m",
        "1",
        "--x",
        "1",
        "--n",
        "1000000",
        "--seed",
        "7",
    ]);
    assert!(out.status.success());
    let (header, body) = rows(&out);
    let z = header.iter().position(|h| h == "z_score").unwrap();
    assert_eq!(body.len(), 2);
    for r in body {
        assert!(num(&r[z]).abs() <= 4.0, "{r:?}");
    }
}

#[test]
fn statistical_rejection_exits_one() {
    let out = run(&["mc-verify", "--m", "3", "--x", "0", "--n", "1000"]);
    assert!(out.status.success());
    // Without an allowance the bias of a coarse step is far beyond 4σ.
    let out = run(&[
        "sim",
        "--c",
        "0.5235987755982988",
        "--x",
        "1",
        "--n",
        "100000",
        "--step",
        "0.05",
        "--allowance",
        "0",
        "--method",
        "skew",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sim_example_near_one() {
    let v = json(&["sim", "--c", "1.5707963", "--x", "0", "--n", "1000"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for r in rows {
        assert!((r["mean"].as_f64().unwrap() - 1.0).abs() < 0.1, "{r}");
        assert_eq!(r["pass"], true);
    }
    assert!(v["config"].get("threads").is_none());
}

#[test]
fn seed_env_override() {
    let out = Command::new(env!("CARGO_BIN_EXE_cone-exit"))
        .args([
            "mc-verify",
            "--m",
            "2",
            "--x",
            "1",
            "--n",
            "1000",
            "--format",
            "json",
        ])
        .env("CONE_EXIT_SEED", "42")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["seed"], 42);
    let v = json(&["mc-verify", "--m", "2", "--x", "1", "--n", "1000"]);
    assert_eq!(v["config"]["seed"], 0xC0FFEE);
}

#[test]
fn out_file_matches_stdout() {
    let dir = std::env::temp_dir().join(format!("cone-exit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("eval.csv");
    let args = ["eval", "--m", "5", "--x", "0,1,10"];
    let direct = run(&args);
    let mut with_out = args.to_vec();
    let p = path.to_str().unwrap();
    with_out.extend(["--out", p]);
    let out = run(&with_out);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}
