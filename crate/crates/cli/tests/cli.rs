use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn qusa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qusa"))
        .args(args)
        .output()
        .expect("qusa runs")
}

fn run(dir: &Path, command: &str, config: &str, out: &str) -> (i32, PathBuf) {
    let cfg = dir.join(format!("{out}.toml"));
    fs::write(&cfg, config).unwrap();
    let out = dir.join(out);
    let o = qusa(&[
        command,
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    (o.status.code().unwrap(), out)
}

const TOY: &str = "triodes 2\nwire 0.x 1.x\nwire 0.y 1.y\nwire 0.z 1.z\n";

fn read(p: PathBuf) -> String {
    fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

#[test]
fn solve_lists_toy_solutions_per_model() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("toy.net"), TOY).unwrap();
    let (code, out) = run(
        dir.path(),
        "solve",
        "[network]\npath = \"toy.net\"\n",
        "tri",
    );
    assert_eq!(code, 0);
    assert_eq!(read(out.join("solutions.txt")), "XX\nYY\nZZ\n");
    let (code, out) = run(dir.path(), "solve", "model = \"equ\"\n", "equ");
    assert_eq!(code, 0);
    assert_eq!(read(out.join("solutions.txt")), "XX\nYY\nZZ\nSingSing\n");
    let report: serde_json::Value =
        serde_json::from_str(&read(out.join("solutions.json"))).unwrap();
    assert_eq!(report["count"], 4);
}

#[test]
fn solve_exit_codes() {
    let dir = TempDir::new().unwrap();
    let (code, out) = run(
        dir.path(),
        "solve",
        "[network]\ntext = \"triodes 0\"\n",
        "empty",
    );
    assert_eq!(code, 0);
    assert_eq!(read(out.join("solutions.txt")), "\n");

    // x and y of one triode wired equal, and its z wired to its x: no triplet fits.
    let unsat = "[network]\ntext = \"triodes 1\\nwire 0.x 0.y\\nwire 0.z 0.x\"\n";
    assert_eq!(run(dir.path(), "solve", unsat, "unsat").0, 1);

    let (code, _) = run(dir.path(), "solve", "cap = 1\n", "capped");
    assert_eq!(code, 3);
    assert_eq!(run(dir.path(), "solve", "bogus = 1\n", "unknown").0, 2);
    assert_eq!(
        run(
            dir.path(),
            "solve",
            "[network]\npath = \"missing.net\"\n",
            "missing"
        )
        .0,
        2
    );
    let bad_line = "[network]\ntext = \"triodes 2\\nwire 0.x 1.q\"\n";
    let o = qusa(&["solve", "--config", "/nonexistent.toml"]);
    assert_eq!(o.status.code(), Some(2));
    let cfg = dir.path().join("parse.toml");
    fs::write(&cfg, bad_line).unwrap();
    let out = dir.path().join("parse");
    let o = qusa(&[
        "solve",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert!(!out.join("solutions.txt").exists());
}

#[test]
fn simulation_cap_is_a_refusal() {
    let dir = TempDir::new().unwrap();
    let cfg = "[network]\ntext = \"triodes 8\"\n[schedule]\ndt = 1.0\nprojection_interval = 1.0\ntotal_time = 1.0\n";
    assert_eq!(run(dir.path(), "simulate-comparison", cfg, "big").0, 3);
}

const SHORT: &str =
    "seed = 3\n[schedule]\ndt = 1.0\nprojection_interval = 5.0\ntotal_time = 40.0\n";

#[test]
fn projected_run_reports_removed_norm_every_interval() {
    let dir = TempDir::new().unwrap();
    let (code, out) = run(dir.path(), "simulate-projected", SHORT, "p");
    assert_eq!(code, 0);
    let csv = read(out.join("trajectory.csv"));
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "t,p_S,p_F,p_V,energy,removed_norm");
    assert_eq!(rows.len(), 2 + 8);
    assert!(rows[1].ends_with(','));
    for r in &rows[2..] {
        let removed: f64 = r.rsplit(',').next().unwrap().parse().unwrap();
        assert!((0.0..1.0).contains(&removed));
    }
}

#[test]
fn symmetrized_run_has_no_singlet_weight() {
    let dir = TempDir::new().unwrap();
    let (code, out) = run(dir.path(), "simulate-symmetrized", SHORT, "s");
    assert_eq!(code, 0);
    for r in read(out.join("trajectory.csv")).lines().skip(1) {
        assert_eq!(r.split(',').nth(3), Some("0"));
    }
}

#[test]
fn manifest_rerun_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let cfg = format!("dump_fields = true\n{SHORT}snapshot_times = [10.0]\n");
    let (code, first) = run(dir.path(), "simulate-comparison", &cfg, "a");
    assert_eq!(code, 0);
    let manifest = first.join("manifest.json");
    let second = dir.path().join("b");
    let o = qusa(&[
        "simulate-comparison",
        "--config",
        manifest.to_str().unwrap(),
        "--out",
        second.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in [
        "trajectory.csv",
        "fields.csv",
        "snapshots/snapshot_000.csv",
        "manifest.json",
    ] {
        assert_eq!(read(first.join(f)), read(second.join(f)), "{f}");
    }
    let o = qusa(&["ensemble", "--config", manifest.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn seed_flag_overrides_config() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, SHORT).unwrap();
    let go = |seed: &str, out: &str| {
        let out = dir.path().join(out);
        let o = qusa(&[
            "simulate-projected",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            seed,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        read(out.join("trajectory.csv"))
    };
    assert_eq!(go("5", "x"), go("5", "y"));
    assert_ne!(go("5", "x"), go("6", "z"));
    assert!(read(dir.path().join("x/manifest.json")).contains("\"seed\": 5"));
}

#[test]
fn ensemble_writes_fit_report() {
    let dir = TempDir::new().unwrap();
    let cfg =
        format!("{SHORT}[ensemble]\nn = 20\nwindow = {{ rule = \"frustrated\", level = 0.5 }}\n");
    let (code, out) = run(dir.path(), "ensemble", &cfg, "e");
    assert_eq!(code, 0);
    assert_eq!(read(out.join("ensemble.csv")).lines().count(), 1 + 9);
    let fit: serde_json::Value = serde_json::from_str(&read(out.join("takeoff_fit.json"))).unwrap();
    for key in ["window", "k_fit", "k_removed", "r_squared", "n"] {
        assert!(fit.get(key).is_some(), "{key}");
    }
}

#[test]
fn zeno_sweep_reports_first_order() {
    let dir = TempDir::new().unwrap();
    let cfg = "[noise]\namplitude = { kind = \"constant\", b0 = 0.3 }\n[zeno]\ninterval_divisors = [8, 16, 32, 64]\n";
    let (code, out) = run(dir.path(), "zeno-sweep", cfg, "z");
    assert_eq!(code, 0);
    let fit: serde_json::Value = serde_json::from_str(&read(out.join("scaling.json"))).unwrap();
    assert!(fit["exponent"].as_f64().unwrap() >= 0.9);
    assert_eq!(fit["points"].as_array().unwrap().len(), 4);
    assert_eq!(read(out.join("zeno.csv")).lines().count(), 5);

    let two = "[zeno]\ninterval_divisors = [8, 16]\n";
    assert_eq!(run(dir.path(), "zeno-sweep", two, "z2").0, 2);
}

#[test]
fn leak_sweep_writes_one_csv_per_interval() {
    let dir = TempDir::new().unwrap();
    let cfg = "[hamiltonian]\ngamma = 0.001\n[schedule]\ndt = 2.0\nprojection_interval = 10.0\ntotal_time = 80.0\n[leak]\nintervals = [40.0, 20.0, 10.0]\nn = 4\n";
    let (code, out) = run(dir.path(), "leak-sweep", cfg, "l");
    assert_eq!(code, 0);
    for dt in ["40", "20", "10"] {
        assert!(out.join(format!("leak_dt_{dt}.csv")).exists());
    }
    assert_eq!(read(out.join("leak_points.csv")).lines().count(), 4);
    let fit: serde_json::Value = serde_json::from_str(&read(out.join("scaling.json"))).unwrap();
    assert!(fit["exponent"].is_f64() && fit["stderr"].is_f64() && fit["intercept"].is_f64());

    let two = cfg.replace("[40.0, 20.0, 10.0]", "[40.0, 10.0]");
    assert_eq!(run(dir.path(), "leak-sweep", &two, "l2").0, 2);
}

#[test]
fn anneal_writes_energy_trace() {
    let dir = TempDir::new().unwrap();
    let cfg = "model = \"equ\"\n[anneal]\nsteps = 100\n";
    let (code, out) = run(dir.path(), "anneal-classical", cfg, "a");
    assert_eq!(code, 0);
    let csv = read(out.join("anneal.csv"));
    assert_eq!(csv.lines().count(), 102);
    assert!(csv.starts_with("step,temperature,energy\n0,,"));
}
