use std::path::PathBuf;
use std::process::{Command, Output};

fn extropy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_extropy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = extropy(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

#[test]
fn eval_examples() {
    assert_eq!(
        stdout(&["eval", "--dist", "exp:1", "--kind", "rex", "--t", "0.7"]),
        "-0.250000\n"
    );
    assert_eq!(
        stdout(&["eval", "--dist", "unif:0:1", "--kind", "pex", "--t", "0.5"]),
        "-1.000000\n"
    );
    assert_eq!(
        stdout(&["eval", "--dist", "example1", "--kind", "rex", "--t", "1.0"]),
        "-0.518519\n"
    );
    assert_eq!(
        stdout(&["eval", "--dist", "example1", "--kind", "extropy"]),
        "-0.296296\n"
    );
}

#[test]
fn eval_of_derived_models() {
    // minimum of two exp(1) is exp(2)
    assert_eq!(
        stdout(&["eval", "--dist", "exp:1", "--order", "1:2", "--kind", "rex", "--t", "0.3"]),
        "-0.500000\n"
    );
    assert_eq!(
        stdout(&[
            "eval",
            "--dist",
            "exp:1",
            "--signature",
            "1,0",
            "--kind",
            "rex",
            "--t",
            "0.3"
        ]),
        "-0.500000\n"
    );
}

#[test]
fn scan_reports_classification_last() {
    let out = stdout(&[
        "scan", "--dist", "example1", "--kind", "rex", "--from", "0.01", "--to", "1.99",
        "--points", "200",
    ]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "t,value");
    assert_eq!(lines.len(), 202);
    assert_eq!(*lines.last().unwrap(), "classification,decreasing");
    let out = stdout(&[
        "scan", "--dist", "example1", "--order", "1:15", "--kind", "rex", "--from", "0.01", "--to",
        "0.99",
    ]);
    assert_eq!(out.lines().last().unwrap(), "classification,non-monotone");
}

#[test]
fn system_premises() {
    assert_eq!(
        stdout(&["system", "--signature", "0.5,0.5,0,0", "--check", "ipex"]),
        "ordered=true rational_monotone=true\n"
    );
    // ψ = (2 + 6x) / (1 + 2x) increases, but the signature is not non-decreasing
    assert_eq!(
        stdout(&["system", "--signature", "0.5,0.5,0,0", "--check", "drex"]),
        "ordered=false rational_monotone=true\n"
    );
}

#[test]
fn record_of_exponential() {
    let out = stdout(&["record", "--n", "2", "--k", "1", "--dist", "exp:1"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "t,survival,hazard,rex");
    let first: Vec<f64> = lines[1].split(',').map(|x| x.parse().unwrap()).collect();
    let t = first[0];
    assert!((first[1] - (1.0 + t) * (-t).exp()).abs() < 1e-6);
    assert!((first[2] - t / (1.0 + t)).abs() < 1e-6);
    assert_eq!(*lines.last().unwrap(), "classification,decreasing");
}

#[test]
fn simulate_prints_one_row() {
    let args = [
        "simulate", "--kind", "rex", "--n", "40", "--t", "0.1", "--h", "0.1", "--reps", "500",
        "--seed", "1",
    ];
    let out = stdout(&args);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines, ["kind,n,t,h,bias,rmse,drops", lines[1]]);
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(&fields[..4], ["rex", "40", "0.100000", "0.100000"]);
    let (bias, rmse): (f64, f64) = (fields[4].parse().unwrap(), fields[5].parse().unwrap());
    assert!(rmse >= bias.abs());
    assert_eq!(stdout(&args), out);
}

#[test]
fn simulate_from_config_file() {
    let path = scratch("study.json");
    std::fs::write(
        &path,
        r#"{"kind": "pex", "sample_sizes": [40], "t_grid": [0.5, 0.9], "bandwidths": [0.3], "replications": 50, "seed": 4}"#,
    )
    .unwrap();
    let out = stdout(&["simulate", "--config", path.to_str().unwrap()]);
    assert_eq!(out.lines().count(), 3);
    assert!(out
        .lines()
        .nth(2)
        .unwrap()
        .starts_with("pex,40,0.900000,0.300000,"));
    let overridden = stdout(&[
        "simulate",
        "--config",
        path.to_str().unwrap(),
        "--h",
        "0.5,0.7",
    ]);
    assert_eq!(overridden.lines().count(), 5);
}

#[test]
fn estimate_from_file() {
    let path = scratch("single.csv");
    std::fs::write(&path, "value\n1.0\n1.0\n").unwrap();
    let p = path.to_str().unwrap();
    // two coincident points behave like the single kernel at 1
    assert_eq!(
        stdout(&["estimate", "rex", "--data", p, "--h", "1", "--t", "0"]),
        "-0.183587\n"
    );
    assert_eq!(
        stdout(&["estimate", "pex", "--data", p, "--h", "1", "--t", "1"]),
        "-0.510061\n"
    );
}

#[test]
fn realdata_table() {
    let out = stdout(&["realdata"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "# rate 0.32 (mle 0.318776)");
    assert_eq!(lines[1], "t,h,theoretical,estimate");
    assert_eq!(lines.len(), 27);
    for line in &lines[2..] {
        assert_eq!(line.split(',').nth(2).unwrap(), "-0.080000");
    }
    let cell = |t: &str, h: &str| -> f64 {
        let prefix = format!("{t},{h},");
        let line = lines.iter().find(|l| l.starts_with(&prefix)).unwrap();
        line.rsplit(',').next().unwrap().parse().unwrap()
    };
    assert!((cell("0.100000", "0.500000") + 0.0799).abs() <= 0.003);
    assert!((cell("0.900000", "0.100000") + 0.1287).abs() <= 0.003);
    let small = stdout(&["realdata", "--t", "0.5", "--h", "0.3,0.9"]);
    assert_eq!(small.lines().count(), 4);
}

#[test]
fn out_flag_writes_file() {
    let path = scratch("eval.txt");
    let out = extropy(&[
        "eval",
        "--dist",
        "exp:2",
        "--kind",
        "rex",
        "--t",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "-0.500000\n");
}

#[test]
fn failures_exit_with_two_and_write_nothing() {
    let cases: [&[&str]; 7] = [
        &["eval", "--dist", "exp:-1", "--kind", "rex", "--t", "1"],
        &["eval", "--dist", "example1", "--kind", "rex", "--t", "3"],
        &["eval", "--dist", "exp:1", "--kind", "rex"],
        &["eval", "--dist", "gamma:2", "--kind", "extropy"],
        &["system", "--signature", "0.5,0.6", "--check", "ipex"],
        &["simulate", "--kind", "rex", "--h", "0", "--reps", "5"],
        &[
            "estimate",
            "rex",
            "--data",
            "/nonexistent/file.csv",
            "--h",
            "1",
            "--t",
            "0",
        ],
    ];
    for args in cases {
        let out = extropy(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}
