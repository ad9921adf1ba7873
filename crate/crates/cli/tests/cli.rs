use std::fs;
use std::process::{Command, Output};

fn dioph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dioph"))
        .args(args)
        .output()
        .expect("run dioph")
}

fn stdout(args: &[&str]) -> String {
    let out = dioph(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    dioph(args).status.code().expect("exit code")
}

#[test]
fn gamma_and_theta() {
    assert_eq!(stdout(&["gamma", "4", "8"]), "1\n");
    assert_eq!(stdout(&["gamma", "3", "5"]), "2\n");
    assert_eq!(stdout(&["theta", "15", "85"]), "6\n");
    let shown = stdout(&["gamma", "15", "85", "--show-solution"]);
    assert!(shown.contains("equation 2, x = 5, y = 0"), "{shown}");
    assert_eq!(shown, stdout(&["gamma", "15", "85", "--solve"]));
}

#[test]
fn domain_and_usage_errors() {
    assert_eq!(code(&["theta", "6", "3"]), 1);
    assert_eq!(code(&["gamma", "0", "3"]), 1);
    assert_eq!(code(&["gamma", "x", "3"]), 2);
    assert_eq!(code(&["verify", "--max", "0"]), 2);
    assert_eq!(code(&["delta", "--family", "power", "--count", "3"]), 2);
}

#[test]
fn delta_families() {
    let powers = stdout(&["delta", "--family", "power", "--k", "4", "--count", "34"]);
    assert_eq!(
        powers.trim(),
        "1,2,1,1,1,2,2,1,2,2,1,2,1,2,1,2,1,2,1,1,2,1,2,1,2,1,2,1,2,1,2,1,2,1"
    );
    assert_eq!(
        stdout(&["delta", "--family", "ap", "--a", "2", "--r", "3", "--count", "3"]),
        "1,2,1\n"
    );
    let csv = stdout(&[
        "delta", "--family", "power", "--k", "4", "--count", "2", "--format", "csv",
    ]);
    assert_eq!(csv, "n,a_n,a_{n+1},gcd,gamma\n1,1,16,1,1\n2,16,81,1,2\n");
}

#[test]
fn delta_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("terms.txt");
    fs::write(&path, "1\n2\n3\n4\n5\n6\n7\n").unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(
        stdout(&["delta", "--family", "explicit", "--file", p, "--count", "6"]),
        "1,2,1,2,1,2\n"
    );
    assert_eq!(
        code(&["delta", "--family", "explicit", "--file", p, "--count", "7"]),
        1
    );
}

#[test]
fn fibonacci_runs() {
    let out = stdout(&["delta", "--family", "fibonacci", "--count", "11", "--runs"]);
    assert!(out.contains("1x2 2x3 1x3 2x3"), "{out}");
}

#[test]
fn periods_and_thresholds() {
    for (k, period) in [(1, 1), (2, 4), (3, 3)] {
        let report: serde_json::Value =
            serde_json::from_str(&stdout(&["period", "--k", &k.to_string()])).unwrap();
        assert_eq!(report["period"], period, "k={k}");
    }
    for (k, m) in [(1, 2), (2, 3), (3, 7)] {
        let out = stdout(&["mk", "--k", &k.to_string()]);
        assert_eq!(out.lines().next(), Some(m.to_string().as_str()));
    }
    assert!(stdout(&["mk", "--k", "3"]).contains("g(x) = 1 + 3x + 6x^2"));
}

#[test]
fn density_outputs() {
    assert_eq!(stdout(&["density", "--max", "3"]), "0.83333333\n");
    assert_eq!(
        stdout(&["density", "--max", "10", "--coprime"]),
        "0.65625000\n"
    );
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("h.csv");
    let svg = dir.path().join("h.svg");
    stdout(&[
        "density",
        "--max",
        "50",
        "--samples",
        "5",
        "--csv",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    let table = fs::read_to_string(&csv).unwrap();
    assert_eq!(
        table.lines().next(),
        Some("x,total_pairs,gamma1_pairs,ratio")
    );
    assert_eq!(table.lines().count(), 6);
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

#[test]
fn verify_sweeps() {
    assert_eq!(code(&["verify", "--max", "2"]), 0);
    let out = stdout(&["verify", "--max", "30", "--format", "jsonl", "--jobs", "2"]);
    for line in out.lines() {
        let rec: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(rec["record"], "summary");
        assert_eq!(rec["counterexamples"], 0);
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["density", "--max", "200", "--samples", "7", "--jobs", "3"];
    assert_eq!(stdout(&args), stdout(&args));
    let args = ["verify", "--max", "40", "--format", "jsonl"];
    assert_eq!(stdout(&args), stdout(&args));
}
