use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn workmeter(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_workmeter")).args(args).arg("--out").arg(out).env_remove("WORKMETER_SEED").output().unwrap()
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    (header, rows)
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn tpm_passes_and_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    let out = workmeter(&["tpm", "--dim", "3", "--samples", "100", "--seed", "5"], &a);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&a.join("summary.json"))["max_residual"].as_f64().unwrap() <= 1e-10);
    workmeter(&["tpm", "--dim", "3", "--samples", "100", "--seed", "5"], &b);
    assert_eq!(fs::read(a.join("tpm.csv")).unwrap(), fs::read(b.join("tpm.csv")).unwrap());
    workmeter(&["tpm", "--dim", "3", "--samples", "100", "--seed", "6"], &c);
    assert_ne!(fs::read(a.join("tpm.csv")).unwrap(), fs::read(c.join("tpm.csv")).unwrap());
    let m = json(&a.join("manifest.json"));
    assert_eq!(m["command"], "tpm");
    assert_eq!(m["seed"], 5);
    assert_eq!(m["config"]["samples"], 100);
}

#[test]
fn seed_flag_beats_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str, env: Option<&str>, extra: &[&str]| {
        let d = dir.path().join(sub);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_workmeter"));
        cmd.args(["tpm", "--samples", "5"]).args(extra).arg("--out").arg(&d).env_remove("WORKMETER_SEED");
        if let Some(e) = env {
            cmd.env("WORKMETER_SEED", e);
        }
        assert!(cmd.output().unwrap().status.success());
        json(&d.join("manifest.json"))["seed"].as_u64().unwrap()
    };
    assert_eq!(run("env", Some("17"), &[]), 17);
    assert_eq!(run("flag", Some("17"), &["--seed", "3"]), 3);
    assert_eq!(run("none", None, &[]), 0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| workmeter(args, &dir.path().join("x")).status.code();
    assert_eq!(code(&["tpm", "--samples", "0"]), Some(2));
    assert_eq!(code(&["tpm", "--dim", "1"]), Some(2));
    assert_eq!(code(&["figure1", "--variant", "3"]), Some(2));
    assert_eq!(code(&["optimize", "--samples", "0"]), Some(2));
    assert_eq!(code(&["tpm", "--bogus"]), Some(2));
    assert_eq!(code(&["tpm", "--config", "/nonexistent/run.cfg"]), Some(3));
    // an impossible tolerance is a threshold failure
    assert_eq!(code(&["oscillator-check", "--protocols", "1", "--durations", "2", "--steps", "500", "--tolerance", "0"]), Some(1));
    let file = dir.path().join("file");
    fs::write(&file, "").unwrap();
    assert_eq!(workmeter(&["tpm", "--samples", "2"], &file.join("sub")).status.code(), Some(3));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "dim=4\nsamples=7\nseed=9\n").unwrap();
    let out = dir.path().join("o");
    let cfg_arg = cfg.to_str().unwrap();
    assert!(workmeter(&["tpm", "--config", cfg_arg, "--samples", "3"], &out).status.success());
    let m = json(&out.join("manifest.json"));
    assert_eq!((m["config"]["dim"].as_u64(), m["config"]["samples"].as_u64(), m["seed"].as_u64()), (Some(4), Some(3), Some(9)));
    assert_eq!(csv_rows(&out.join("tpm.csv")).1.len(), 3);
}

#[test]
fn oscillator_figure_has_constant_free_energy() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f");
    assert!(workmeter(&["figure1", "--system", "oscillator", "--protocol", "1"], &out).status.success());
    let (header, rows) = csv_rows(&out.join("figure1.csv"));
    assert_eq!(header, ["T", "deltaF", "deltaF_tilde", "avg_work"]);
    assert_eq!(rows.len(), 40);
    for r in &rows {
        assert_eq!(r[1], -0.25);
        assert!(r[1] <= r[2] + 1e-9 && r[2] <= r[3] + 1e-9);
    }
}

#[test]
fn qubit_figure_reaches_the_free_energy() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("q");
    assert!(workmeter(&["figure1", "--variant", "1", "--points", "6"], &out).status.success());
    let (_, rows) = csv_rows(&out.join("figure1.csv"));
    let last = rows.last().unwrap();
    assert_eq!(last[0], 50.0);
    assert!((last[2] - last[1]).abs() <= 0.01);
    assert!(rows.iter().all(|r| r[1] <= r[2] + 1e-9 && r[2] <= r[3] + 1e-9));
}

#[test]
fn work_traces() {
    let dir = tempfile::tempdir().unwrap();
    let constant = dir.path().join("c");
    assert!(workmeter(&["work-trace", "--protocol", "constant", "--duration", "5", "--steps", "500"], &constant).status.success());
    let (header, rows) = csv_rows(&constant.join("work_trace.csv"));
    assert_eq!(header, ["t", "dW", "cumulative_W"]);
    assert!(rows.iter().all(|r| r[1] == 0.0));

    let slow = dir.path().join("s");
    assert!(workmeter(&["work-trace", "--variant", "1", "--duration", "50", "--steps", "40000"], &slow).status.success());
    let (_, rows) = csv_rows(&slow.join("work_trace.csv"));
    let s = json(&slow.join("summary.json"));
    let total = rows.last().unwrap()[2];
    assert!((total - s["energy_difference"].as_f64().unwrap()).abs() <= 1e-3, "{total} {s}");

    let (e, m) = (dir.path().join("e"), dir.path().join("m"));
    let base = ["work-trace", "--duration", "2", "--steps", "400"];
    assert!(workmeter(&base, &e).status.success());
    assert!(workmeter(&[&base[..], &["--mode", "sampled", "--shots", "100000", "--seed", "2"]].concat(), &m).status.success());
    let exact = json(&e.join("summary.json"))["total_work"].as_f64().unwrap();
    let sampled = json(&m.join("summary.json"));
    let (mean, se) = (sampled["total_work"].as_f64().unwrap(), sampled["std_error"].as_f64().unwrap());
    assert!((mean - exact).abs() <= 4.0 * se, "{mean} vs {exact} ± {se}");
}

#[test]
fn optimize_writes_aggregates_and_respects_presets() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let args = ["optimize", "--dims", "2", "--samples", "3", "--steps-search", "200", "--steps-final", "1000", "--max-iters", "5", "--seed", "7"];
    assert!(workmeter(&args, &a).status.success());
    assert!(workmeter(&args, &b).status.success());
    assert_eq!(fs::read(a.join("aggregate.json")).unwrap(), fs::read(b.join("aggregate.json")).unwrap());
    assert!(!a.join("samples.partial.csv").exists());
    let agg = json(&a.join("aggregate.json"));
    let d2 = &agg[0];
    assert_eq!(d2["dim"], 2);
    assert_eq!(d2["n_samples"], 3);
    assert!(d2["mean_err_abs_opt"].as_f64().unwrap() <= d2["mean_err_abs_linear"].as_f64().unwrap());
    let m = json(&a.join("manifest.json"));
    assert_eq!((m["config"]["t-max"].as_f64(), m["config"]["points"].as_u64()), (Some(5.0), Some(5)));

    let c = dir.path().join("c");
    assert!(workmeter(&["optimize", "--strategy", "2", "--dims", "2", "--samples", "1", "--steps-search", "100", "--steps-final", "200", "--max-iters", "1", "--duration-grid", "3"], &c).status.success());
    let m = json(&c.join("manifest.json"));
    assert_eq!((m["config"]["t-max"].as_f64(), m["config"]["points"].as_u64()), (Some(20.0), Some(10)));
}
