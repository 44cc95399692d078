use std::path::PathBuf;
use std::process::{Command, Output};

use hyperheat_cli::run_validate_to;
use hyperheat_cli::validate::ValidationOptions;
use hyperheat_cli::Status;

fn hyperheat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperheat"))
        .args(args)
        .env_remove("HYPERHEAT_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("hyperheat-{}-{name}", std::process::id()))
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn validate_passes_on_fresh_build() {
    let out = hyperheat(&["validate", "--seed", "42", "--n", "8"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = stdout(&out);
    assert!(csv.starts_with("identity,n,max_residual,tolerance,pass\n"));
    assert!(rows(&csv).iter().all(|r| r[4] == "true"));
}

#[test]
fn validate_guards_grid_size() {
    assert_eq!(hyperheat(&["validate", "--n", "32"]).status.code(), Some(2));
}

#[test]
fn corrupted_inversion_constant_is_reported() {
    let mut opts = ValidationOptions::new(42, 4);
    opts.inversion_constant = 2.5;
    let mut sink = Vec::new();
    match run_validate_to(&opts, &mut sink).unwrap() {
        Status::Fail(msg) => assert!(msg.starts_with("inversion"), "{msg}"),
        Status::Pass => panic!("fault went unnoticed"),
    }
    assert_eq!(Status::Fail(String::new()).exit_code(), 1);
}

#[test]
fn solve_gaussian_row() {
    let out = hyperheat(&["solve", "--n", "256", "--times", "0.5", "--xs", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = stdout(&out);
    assert!(csv.starts_with("t,x,u_re,u_im_diag,oracle,abs_err\n"));
    let r = &rows(&csv)[0];
    let u: f64 = r[2].parse().unwrap();
    assert!((u - 0.57735).abs() <= 2e-2);
    let oracle: f64 = r[4].parse().unwrap();
    assert!((oracle - 1.0 / 3f64.sqrt()).abs() < 1e-15);
}

#[test]
fn solve_row_count_and_zero_boundary() {
    let out = hyperheat(&["solve", "--n", "32", "--g", "zero", "--times", "0.25,0.5,1", "--xs", "-1:1:0.25"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = rows(&stdout(&out));
    assert_eq!(rows.len(), 3 * 9);
    assert!(rows.iter().all(|r| r[2].parse::<f64>().unwrap() == 0.0));
}

#[test]
fn solve_without_closed_form_leaves_oracle_blank() {
    let out = hyperheat(&["solve", "--n", "32", "--g", "bump:0,1", "--xs", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &rows(&stdout(&out))[0];
    assert_eq!((r[4].as_str(), r[5].as_str()), ("", ""));
}

#[test]
fn solve_rejects_bad_input() {
    assert_eq!(hyperheat(&["solve", "--n", "32", "--times", "0"]).status.code(), Some(2));
    assert_eq!(hyperheat(&["solve", "--n", "32", "--times", "-1"]).status.code(), Some(2));
    assert_eq!(hyperheat(&["solve", "--n", "32", "--omega", "40"]).status.code(), Some(2));
    assert_eq!(hyperheat(&["solve", "--n", "32", "--g", "sawtooth"]).status.code(), Some(2));
}

#[test]
fn solve_reads_sampled_file() {
    let path = scratch("samples.csv");
    std::fs::write(&path, "# x,re,im\n-0.5,1,0\n0,2,0.5\n0.5,1\n").unwrap();
    let g = format!("file:{}", path.display());
    let out = hyperheat(&["solve", "--n", "16", "--omega", "1", "--omega-prime", "2", "--g", &g, "--xs", "0"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = &rows(&stdout(&out))[0];
    assert!(r[2].parse::<f64>().unwrap() > 0.0);
    std::fs::write(&path, "0,1,2,3\n").unwrap();
    let out = hyperheat(&["solve", "--n", "16", "--g", &g]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_file(&path).ok();
}

#[test]
fn output_is_deterministic() {
    let (a, b) = (scratch("a.csv"), scratch("b.csv"));
    for path in [&a, &b] {
        let out = hyperheat(&["solve", "--n", "64", "--times", "0.25,1", "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(!x.is_empty());
    assert_eq!(x, y);
    let threaded = Command::new(env!("CARGO_BIN_EXE_hyperheat"))
        .args(["solve", "--n", "64", "--times", "0.25,1"])
        .env("HYPERHEAT_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(threaded.stdout, x);
    std::fs::remove_file(a).ok();
    std::fs::remove_file(b).ok();
}

#[test]
fn kernel_table() {
    let out = hyperheat(&["kernel", "--n", "256", "--times", "0.5", "--xs", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &rows(&stdout(&out))[0];
    let k: f64 = r[2].parse().unwrap();
    assert!((k - 0.398_942_28).abs() <= 5e-3);
}

#[test]
fn converge_sweep() {
    let out = hyperheat(&["converge", "--n-list", "128,256,512"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = rows(&stdout(&out));
    let errs: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    assert!(rows.iter().all(|r| r[2] == "false"));
    let stderr = String::from_utf8_lossy(&out.stderr);
    let order: f64 = stderr
        .lines()
        .find_map(|l| l.strip_prefix("fitted order: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((0.7..=1.3).contains(&order), "{order}");
    assert_eq!(hyperheat(&["converge", "--n-list", "128,256"]).status.code(), Some(2));
}

#[test]
fn rates_default_sweep() {
    let out = hyperheat(&["rates"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = stdout(&out);
    assert!(csv.starts_with("check,param,observed,bound_or_bracket,pass\n"));
    for n in ["n=1,", "n=10,", "n=100,"] {
        assert!(csv.lines().any(|l| l.starts_with("p_bound,") && l.contains(n)), "{n}");
    }
}
