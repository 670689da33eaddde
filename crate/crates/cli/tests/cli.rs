use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stablear"))
}

fn run(args: &[&str], threads: Option<&str>) -> Output {
    let mut c = bin();
    c.args(args);
    if let Some(t) = threads {
        c.env("STABLE_AR_THREADS", t);
    }
    c.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn simulate_to(path: &Path, extra: &[&str]) {
    let p = path.to_str().unwrap();
    let mut args = vec!["simulate", "--p", "1", "--theta", "0.5", "--alpha", "1.5", "--n", "150", "--seed", "11", "--out", p];
    args.extend_from_slice(extra);
    let o = run(&args, None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn cauchy_pdf_at_zero() {
    let o = run(&["stable", "pdf", "--alpha", "1", "--z", "0"], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "0.3183098862");
}

#[test]
fn gaussian_quantile() {
    // α = 2 is N(0, 2σ²)
    let o = run(&["stable", "quantile", "--alpha", "2", "--q", "0.5"], None);
    assert_eq!(stdout(&o).trim(), "0");
}

#[test]
fn missing_input_is_user_error() {
    let o = run(&["fit", "--input", "/definitely/not/here.csv", "--p", "1"], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("/definitely/not/here.csv"), "{}", stderr(&o));
}

#[test]
fn bad_line_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.csv");
    std::fs::write(&p, "x\n1.0\n2.0\noops\n").unwrap();
    let o = run(&["fit", "--input", p.to_str().unwrap(), "--p", "1"], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));
}

#[test]
fn bad_flags_are_user_errors() {
    assert_eq!(run(&["simulate", "--p", "2", "--theta", "0.5", "--alpha", "1.5", "--n", "10"], None).status.code(), Some(1));
    assert_eq!(run(&["simulate", "--p", "1", "--theta", "0.5", "--alpha", "2.5", "--n", "10"], None).status.code(), Some(1));
    assert_eq!(run(&["simulate", "--p", "1", "--theta", "1.0", "--alpha", "1.5", "--n", "10"], None).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"], None).status.code(), Some(1));
    assert_eq!(run(&["--help"], None).status.code(), Some(0));
    let o = run(&["stable", "pdf", "--alpha", "1", "--z", "0"], Some("zero"));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn simulate_is_reproducible_and_exact() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    simulate_to(&a, &[]);
    simulate_to(&b, &[]);
    let ta = std::fs::read(&a).unwrap();
    assert_eq!(ta, std::fs::read(&b).unwrap());
    assert_eq!(String::from_utf8(ta).unwrap().lines().count(), 150);
    let o = run(&["simulate", "--p", "1", "--theta", "0.5", "--alpha", "1.5", "--n", "150", "--seed", "11"], None);
    assert_eq!(o.stdout, std::fs::read(&a).unwrap());
}

#[test]
fn noncausal_simulation_accepts_negative_theta() {
    let o = run(&["simulate", "--p", "2", "--s", "1", "--theta", "-0.4,2.5", "--alpha", "1.2", "--beta", "-0.3", "--n", "20"], None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 20);
}

#[test]
fn pipeline_is_thread_count_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let x = dir.path().join("x.csv");
    simulate_to(&x, &[]);
    let xs = x.to_str().unwrap();
    let mut outputs = Vec::new();
    for t in ["1", "3"] {
        let fit = dir.path().join(format!("fit{t}.json"));
        let boot = dir.path().join(format!("boot{t}.json"));
        let diag = dir.path().join(format!("diag{t}"));
        let fs = fit.to_str().unwrap();
        let o = run(&["fit", "--input", xs, "--p", "1", "--profile", "test", "--starts", "30", "--seed", "4", "--out", fs], Some(t));
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let o = run(&["bootstrap", "--input", xs, "--fit", fs, "--B", "20", "--m", "60", "--seed", "5", "--out", boot.to_str().unwrap()], Some(t));
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let o = run(&["diagnose", "--input", xs, "--fit", fs, "--sims", "100", "--max-lag", "5", "--out-dir", diag.to_str().unwrap()], Some(t));
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        // fit paths differ per run and are recorded in manifests, so compare
        // the numeric content
        let strip = |p: &Path| {
            let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
            v.as_object_mut().unwrap().remove("manifest");
            v.to_string()
        };
        outputs.push((
            strip(&fit),
            strip(&boot),
            strip(&diag.join("report.json")),
            std::fs::read(diag.join("qq.csv")).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn fit_json_schema() {
    let dir = tempfile::tempdir().unwrap();
    let x = dir.path().join("x.csv");
    simulate_to(&x, &[]);
    let o = run(&["fit", "--input", x.to_str().unwrap(), "--p", "1", "--s", "0", "--profile", "test", "--starts", "20"], None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for k in ["p", "s", "theta", "phi", "tau", "loglik", "se_tau", "seed", "manifest"] {
        assert!(v.get(k).is_some(), "missing {k}");
    }
    for k in ["alpha", "beta", "sigma", "mu"] {
        assert!(v["tau"][k].is_f64());
    }
    assert_eq!(v["s"], 0);
    assert_eq!(v["se_tau"].as_array().unwrap().len(), 4);
    let sha = v["manifest"]["inputs"][x.to_str().unwrap()].as_str().unwrap();
    assert_eq!(sha.len(), 64);
}

#[test]
fn bootstrap_rejects_too_few_replicates() {
    let o = run(&["bootstrap", "--input", "a.csv", "--fit", "b.json", "--B", "5"], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--B"));
}

#[test]
fn bootstrap_rejects_mismatched_series() {
    let dir = tempfile::tempdir().unwrap();
    let x = dir.path().join("x.csv");
    simulate_to(&x, &[]);
    let fit = dir.path().join("fit.json");
    let o = run(&["fit", "--input", x.to_str().unwrap(), "--p", "1", "--s", "0", "--profile", "test", "--starts", "20", "--out", fit.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0));
    let y = dir.path().join("y.csv");
    std::fs::write(&y, "1\n2\n3\n").unwrap();
    let o = run(&["bootstrap", "--input", y.to_str().unwrap(), "--fit", fit.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("observations"), "{}", stderr(&o));
}
