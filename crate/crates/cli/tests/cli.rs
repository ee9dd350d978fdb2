use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn wsurf() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_wsurf"));
    cmd.env_remove("WSURF_THREADS");
    cmd
}

fn run(args: &[&str]) -> Output {
    wsurf().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name).display().to_string()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn tmp() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}

#[test]
fn classify_class_one() {
    let out = run(&["classify", "--alpha", "1", "--beta", "0", "--gamma", "0", "--delta", "0"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let d = json(&out);
    assert_eq!(d["class_id"], 1);
    assert_eq!(d["substitution"], "ν = -e^λ");
    assert!(stderr(&out).starts_with("class 1 (H=0): Δλ = e^λ"));
}

#[test]
fn classify_degenerate_and_umbilic_exit_2() {
    let out = run(&["classify", "--alpha", "1", "--beta", "1", "--gamma", "0", "--delta", "0"]);
    assert_eq!(code(&out), 2);
    assert!(out.stdout.is_empty());
    let out = run(&["classify", "--A", "1", "--B", "0", "--C", "0", "--D", "1"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("umbilic"));
}

#[test]
fn classify_euclidean_counterpart_flips_rhs() {
    let out = run(&["classify", "--alpha", "0", "--beta", "0", "--gamma", "-1", "--delta", "1", "--euclidean"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["descriptor"]["class_id"], 8);
    assert_eq!(v["descriptor"]["pde"]["rhs_text"], "-sin λ");
    assert_eq!(v["euclidean"]["rhs_text"], "sin λ");
    assert_eq!(v["euclidean"]["signature"], "EUCLIDEAN");
}

#[test]
fn classify_flags_override_config() {
    let dir = tmp();
    let cfg = write_config(dir.path(), "[relation]\nalpha = 1\nbeta = 0\ngamma = 0\ndelta = 0\n");
    assert_eq!(json(&run(&["classify", "--config", &cfg]))["class_id"], 1);
    let out = run(&["classify", "--config", &cfg, "--alpha", "0", "--gamma", "-1", "--delta", "1"]);
    assert_eq!(json(&out)["class_id"], 8);
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&run(&[])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["classify", "--alpha", "x"])), 1);
    assert_eq!(code(&run(&["classify", "--alpha", "1", "--A", "1"])), 1);
    assert_eq!(code(&run(&["solve", "/nonexistent/run.toml"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn unknown_config_keys_exit_1() {
    let dir = tmp();
    let text = std::fs::read_to_string(config("liouville.toml")).unwrap().replace("n = 65", "n = 65\ncells = 4");
    let out = run(&["solve", &write_config(dir.path(), &text)]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("cells"), "{}", stderr(&out));
}

#[test]
fn liouville_pipeline_writes_artifacts() {
    let dir = tmp();
    let out_dir = dir.path().join("out");
    let out = run(&["pipeline", &config("liouville.toml"), "--n", "33", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["verify"]["passed"], true);
    assert!(v["verify"]["report"]["gauss_max"].as_f64().unwrap() < 0.1);
    for f in ["surface.obj", "surface.ply", "verify.json", "solver.json", "parallel.json", "parallel_0.obj", "parallel_1.ply"] {
        assert!(out_dir.join(f).is_file(), "{f} missing");
    }
    let ply = std::fs::read(out_dir.join("surface.ply")).unwrap();
    assert!(ply.starts_with(b"ply\nformat binary_little_endian 1.0\n"));
    let verify: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("verify.json")).unwrap()).unwrap();
    assert_eq!(verify, v["verify"]);
}

#[test]
fn forced_non_convergence_exits_3() {
    let dir = tmp();
    let out = run(&["pipeline", &config("liouville.toml"), "--n", "17", "--max-iter", "1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("did not converge"));
}

#[test]
fn verification_failure_exits_4() {
    let dir = tmp();
    let text = std::fs::read_to_string(config("liouville.toml")).unwrap().replace("gauss_tol = 0.1", "gauss_tol = 1e-9");
    let out = run(&["verify", &write_config(dir.path(), &text), "--n", "17"]);
    assert_eq!(code(&out), 4);
    assert_eq!(json(&out)["passed"], false);
}

#[test]
fn kink_pipeline_passes() {
    let dir = tmp();
    let out = run(&["pipeline", &config("kink.toml"), "--out", dir.path().to_str().unwrap(), "--mesh", "obj"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(dir.path().join("surface.obj").is_file());
    assert!(!dir.path().join("surface.ply").exists());
}

fn orders(cfg: &str, levels: &str) -> Value {
    let out = run(&["convergence", cfg, "--levels", levels, "--json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    json(&out)["orders"].clone()
}

#[test]
fn convergence_orders_are_second() {
    let o = orders(&config("liouville.toml"), "17,33,65");
    let lam = o["lambda_error"].as_f64().unwrap();
    assert!((1.8..=2.2).contains(&lam), "class 1 order {lam}");
    let o = orders(&config("kink.toml"), "33,65,129");
    let lam = o["lambda_error"].as_f64().unwrap();
    assert!((1.8..=2.2).contains(&lam), "class 8 order {lam}");
}

#[test]
fn convergence_needs_three_levels() {
    let out = run(&["convergence", &config("liouville.toml"), "--levels", "17,33"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("at least 3 levels"));
}

#[test]
fn parallel_family_reports_each_offset() {
    let out = run(&["parallel", &config("liouville.toml"), "--n", "17", "--offset", "0.05", "--offset", "-0.05"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let fam = json(&out)["family"].clone();
    assert_eq!(fam.as_array().unwrap().len(), 2);
    for e in fam.as_array().unwrap() {
        assert_eq!(e["epsilon"], 1.0);
        assert!(e["scaled_difference"].as_f64().unwrap() < 1e-8);
    }
    // ν ranges over roughly [-2.4, -2], so 1 - aν vanishes near a = -0.45
    let out = run(&["parallel", &config("liouville.toml"), "--n", "17", "--offset", "-0.45"]);
    assert_eq!(code(&out), 4);
    assert!(json(&out)["family"][0]["error"].as_str().unwrap().contains("focal"));
}

#[test]
fn export_then_reconstruct_from_csv() {
    let dir = tmp();
    let d = dir.path().to_str().unwrap();
    let out = run(&["export", &config("liouville.toml"), "--n", "17", "--out", d]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    for f in ["fields.json", "residuals.json", "lambda.csv", "nu.csv"] {
        assert!(dir.path().join(f).is_file(), "{f} missing");
    }
    let fields: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("fields.json")).unwrap()).unwrap();
    assert!(fields["fields"]["gamma2"].is_array() || fields["fields"]["gamma2"].is_object());

    let lam = dir.path().join("lambda.csv");
    let again = PathBuf::from(d).join("again");
    let out = run(&["reconstruct", &config("liouville.toml"), "--n", "17", "--lambda", lam.to_str().unwrap(), "--out", again.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(std::fs::read(dir.path().join("surface.ply")).unwrap(), std::fs::read(again.join("surface.ply")).unwrap());
}

#[test]
fn thread_count_from_environment() {
    let args = ["verify", &config("liouville.toml"), "--n", "33"];
    let one = wsurf().args(args).env("WSURF_THREADS", "1").output().unwrap();
    let four = wsurf().args(args).env("WSURF_THREADS", "4").output().unwrap();
    assert_eq!(code(&one), 0, "{}", stderr(&one));
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(code(&wsurf().args(args).env("WSURF_THREADS", "0").output().unwrap()), 1);
    assert_eq!(code(&wsurf().args(args).env("WSURF_THREADS", "many").output().unwrap()), 1);
}
