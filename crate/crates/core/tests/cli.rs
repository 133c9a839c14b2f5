use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sign-ldp"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const SMALL: &str = "estimator = two\nepsilon = 1\nn = 4000\nreplicates = 30\nsweep = n1\nsweep_values = 100, 400\n";

#[test]
fn fisher_reports_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["fisher", "--epsilon", "1", "--sigma", "2"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["optimal_variance"].as_f64().unwrap() - 29.422_236_506_518).abs() < 1e-9);
    assert!((v["t_eps"].as_f64().unwrap() - 0.462_117_157_260_009_76).abs() < 1e-15);
}

#[test]
fn lp_verify_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["lp-verify", "--k", "6", "--epsilon", "0.5"], dir.path()).status.code(), Some(0));
    assert_eq!(run(&["lp-verify", "--k", "8", "--epsilon", "3"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["lp-verify", "--k", "5", "--epsilon", "1"], dir.path()).status.code(), Some(1));
}

#[test]
fn simulate_is_byte_identical_across_workers_and_reruns() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("small.cfg"), SMALL).unwrap();
    let mut csvs = Vec::new();
    for (i, workers) in ["1", "4", "1", "8"].iter().enumerate() {
        let name = format!("out{i}.csv");
        let out = run(&["simulate", "small.cfg", "--seed", "17", "--workers", workers, "--output", &name], dir.path());
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        csvs.push(fs::read(dir.path().join(&name)).unwrap());
    }
    assert!(csvs.windows(2).all(|w| w[0] == w[1]));
    let text = String::from_utf8(csvs[0].clone()).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.starts_with("sweep_name,sweep_value,n,replicates,scaled_mse,ci_lo,ci_hi,clamp_rate,"));
    assert!(text.lines().nth(1).unwrap().starts_with("n1,100,4000,30,"));

    let other = run(&["simulate", "small.cfg", "--seed", "18", "--output", "other.csv"], dir.path());
    assert_eq!(other.status.code(), Some(0));
    assert_ne!(fs::read(dir.path().join("other.csv")).unwrap(), csvs[0]);
}

#[test]
fn manifest_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("small.cfg"), SMALL).unwrap();
    let out = run(&["simulate", "small.cfg", "--seed", "5", "--workers", "2"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read(dir.path().join("small.csv")).unwrap();
    let manifest = fs::read_to_string(dir.path().join("small.csv.manifest")).unwrap();
    for key in ["subcommand = simulate", "seed = 5", "output = small.csv", "n1 = auto", "sweep_values = 100,400"] {
        assert!(manifest.contains(key), "{key}\n{manifest}");
    }
    assert!(!manifest.contains("workers"));

    let again = run(&["simulate", "small.csv.manifest", "--seed", "5", "--output", "again.csv"], dir.path());
    assert_eq!(again.status.code(), Some(0), "{}", String::from_utf8_lossy(&again.stderr));
    assert_eq!(fs::read(dir.path().join("again.csv")).unwrap(), csv);
}

#[test]
fn simulate_failure_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(p.join("small.cfg"), SMALL).unwrap();
    // Seed is mandatory.
    assert_eq!(run(&["simulate", "small.cfg"], p).status.code(), Some(1));
    // Missing config: I/O error and nothing written.
    assert_eq!(run(&["simulate", "absent.cfg", "--seed", "1"], p).status.code(), Some(3));
    assert!(!p.join("absent.csv").exists());
    // Unwritable output directory.
    let out = run(&["simulate", "small.cfg", "--seed", "1", "--output", "no/such/dir/x.csv"], p);
    assert_eq!(out.status.code(), Some(3));

    fs::write(p.join("big.cfg"), format!("{SMALL}budget = 1000\n")).unwrap();
    assert_eq!(run(&["simulate", "big.cfg", "--seed", "1"], p).status.code(), Some(4));
    assert!(!p.join("big.csv").exists());

    fs::write(p.join("bad.cfg"), "epsilon = 1\nn = 100\nreplicates\n").unwrap();
    assert_eq!(run(&["simulate", "bad.cfg", "--seed", "1"], p).status.code(), Some(1));
    fs::write(p.join("n1.cfg"), "epsilon = 1\nn = 100\nreplicates = 4\nn1 = 100\n").unwrap();
    assert_eq!(run(&["simulate", "n1.cfg", "--seed", "1"], p).status.code(), Some(1));
    assert!(!p.join("n1.csv").exists());
}

#[test]
fn estimate_synthetic_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["estimate", "--synthetic", "--n", "20000", "--theta", "-0.4", "--seed", "3"];
    let a = run(&args, dir.path());
    let b = run(&args, dir.path());
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["stages"].as_array().unwrap().len(), 2);
    assert!((v["theta_hat"].as_f64().unwrap() + 0.4).abs() < 0.1);

    let three = run(
        &["estimate", "--estimator", "three", "--synthetic", "--n", "60000", "--theta", "84.5", "--n1", "700"],
        dir.path(),
    );
    let v = json(&three);
    assert_eq!(v["clamped_flags"].as_array().unwrap().len(), 3);
    assert!((v["stages"][0].as_f64().unwrap() - 84.5).abs() <= 1.0);
}

#[test]
fn estimate_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let lines: Vec<String> = (0..100_000)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            z.to_string()
        })
        .collect();
    fs::write(dir.path().join("data.txt"), lines.join("\n")).unwrap();
    let out = run(&["estimate", "--input", "data.txt", "--epsilon", "1", "--theta0", "0"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(json(&out)["theta_hat"].as_f64().unwrap().abs() < 0.03);

    let n1 = run(&["estimate", "--input", "data.txt", "--n1", "100000"], dir.path());
    assert_eq!(n1.status.code(), Some(1));
    assert_eq!(run(&["estimate", "--input", "missing.txt"], dir.path()).status.code(), Some(3));
    fs::write(dir.path().join("junk.txt"), "1\nabc\n").unwrap();
    assert_eq!(run(&["estimate", "--input", "junk.txt"], dir.path()).status.code(), Some(1));
    assert_eq!(run(&["estimate"], dir.path()).status.code(), Some(1));
    assert_eq!(run(&["estimate", "--synthetic", "--n", "10"], dir.path()).status.code(), Some(1));
}
