use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pseudoheat")).args(args).output().expect("spawn binary")
}

fn csv_rows(out: &Output) -> Vec<Vec<String>> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn roots_table_has_one_row_per_root() {
    for (n, kappa) in [("2", None), ("3", Some("1")), ("4", Some("-1")), ("7", Some("-1"))] {
        let mut args = vec!["--N", n];
        if let Some(k) = kappa {
            args.extend(["--kappa", k]);
        }
        args.push("roots");
        let out = run(&args);
        assert!(out.status.success(), "{args:?}");
        let rows = csv_rows(&out);
        assert_eq!(rows.len(), n.parse::<usize>().unwrap());
        for r in rows {
            let (re, im): (f64, f64) = (r[1].parse().unwrap(), r[2].parse().unwrap());
            assert!((re.hypot(im) - 1.0).abs() < 1e-14);
        }
    }
}

#[test]
fn kernel_rows_are_symmetric() {
    let out = run(&["--N", "4", "kernel", "--t", "0.7", "--xi-min", "-5", "--xi-max", "5", "--steps", "21"]);
    assert!(out.status.success());
    let p: Vec<f64> = csv_rows(&out).iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(p.len(), 21);
    for i in 0..p.len() {
        assert!((p[i] - p[p.len() - 1 - i]).abs() < 1e-12);
    }
    // the quartic kernel dips below zero in its tail
    assert!(p.iter().any(|&v| v < 0.0));
}

#[test]
fn json_matches_csv() {
    let csv = csv_rows(&run(&["--N", "6", "roots"]));
    let json: serde_json::Value = serde_json::from_slice(&run(&["--N", "6", "--format", "json", "roots"]).stdout).unwrap();
    let rows = json["rows"].as_array().unwrap();
    assert_eq!(rows.len(), csv.len());
    for (j, c) in rows.iter().zip(&csv) {
        assert_eq!(j[1].as_f64().unwrap(), c[1].parse::<f64>().unwrap());
    }
}

#[test]
fn output_is_byte_stable() {
    let args = ["--N", "4", "hitting", "--a", "0.5", "--x", "0", "--lambda", "1.5", "--t", "1"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["--N", "3", "roots"]).status.code(), Some(2));
    assert_eq!(run(&["--N", "4", "--kappa", "1", "roots"]).status.code(), Some(2));
    assert_eq!(run(&["--N", "1", "roots"]).status.code(), Some(2));
}

#[test]
fn verify_all_passes_for_brownian_motion() {
    let out = run(&["--N", "2", "verify-all", "--samples", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}
