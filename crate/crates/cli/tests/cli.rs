//! The `slowdown` binary: exit codes, flags and file outputs.

use std::path::Path;
use std::process::{Command, Output};

fn slowdown(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slowdown"))
        .args(args)
        .current_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("../.."))
        .env_remove("SLOWDOWN_API_BASE")
        .env_remove("SLOWDOWN_API_KEY")
        .env_remove("SLOWDOWN_CACHE_DIR")
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn analyze_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let base = ["analyze", "--from", "2016-01-01", "--to", "2018-03-31", "--format", "json", "--out", out];

    let all = slowdown(&[&base[..], &["--assets", "BTC,XRP"]].concat());
    assert_eq!(code(&all), 0, "{}", String::from_utf8_lossy(&all.stderr));
    let partial = slowdown(&[&base[..], &["--assets", "BTC,NOPE"]].concat());
    assert_eq!(code(&partial), 2);
    assert!(String::from_utf8_lossy(&partial.stdout).contains("NOPE"));
    let none = slowdown(&[&base[..], &["--assets", "NOPE"]].concat());
    assert_eq!(code(&none), 1);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&slowdown(&["analyze", "--from", "2016-01-01"])), 1);
    assert_eq!(code(&slowdown(&["frobnicate"])), 1);
    assert_eq!(code(&slowdown(&["sweep", "--param", "m", "--grid", "0:1"])), 1);
    assert_eq!(code(&slowdown(&["simulate", "--jobs", "0"])), 1);
    assert_eq!(code(&slowdown(&["--help"])), 0);
    // No endpoint configured.
    assert_eq!(code(&slowdown(&["fetch", "--asset", "BTC", "--from", "2016-01-01", "--to", "2016-01-10"])), 1);
}

#[test]
fn config_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let via_cfg = dir.path().join("cfg");
    let via_flags = dir.path().join("flags");
    std::fs::write(
        &cfg,
        format!(
            "[analysis]\nassets = [\"BTC\", \"DASH\"]\nfrom = \"2016-01-01\"\nto = \"2018-03-31\"\n\n\
             [output]\ndata_dir = \"data/synthetic\"\nout_dir = \"{}\"\n",
            via_cfg.display()
        ),
    )
    .unwrap();
    assert_eq!(code(&slowdown(&["analyze", "--config", cfg.to_str().unwrap()])), 0);
    let flags = slowdown(&[
        "analyze", "--assets", "BTC,DASH", "--from", "2016-01-01", "--to", "2018-03-31", "--bandwidth", "30",
        "--windows", "410,60", "--delta", "20", "--theta-mult", "1.0", "--out", via_flags.to_str().unwrap(),
        "--format", "json,csv,svg", "--jobs", "1",
    ]);
    assert_eq!(code(&flags), 0);
    assert_eq!(files(&via_cfg), files(&via_flags));
}

#[test]
fn analyze_is_deterministic_across_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, jobs: &str| {
        let out = dir.path().join(name);
        let o = slowdown(&[
            "analyze", "--assets", "BTC,XRP,LTC,XLM,XEM,DASH", "--from", "2016-01-01", "--to", "2018-03-31",
            "--out", out.to_str().unwrap(), "--jobs", jobs,
        ]);
        assert_eq!(code(&o), 0);
        files(&out)
    };
    let a = run("a", "1");
    assert_eq!(a.len(), 3 + 6 * 5);
    assert_eq!(a, run("b", "1"));
    assert_eq!(a, run("c", "3"));
}

#[test]
fn simulate_settles_on_lower_state_past_the_fold() {
    let dir = tempfile::tempdir().unwrap();
    let out = slowdown(&["simulate", "--r", "3", "--m", "3", "--D", "0.01", "--out", dir.path().to_str().unwrap(), "--format", "json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let (_, json) = &files(dir.path())[0];
    let v: serde_json::Value = serde_json::from_slice(json).unwrap();
    let tail = v["tail_mean"].as_f64().unwrap();
    assert!((tail - (-2.103_803_4)).abs() < 0.02, "{tail}");
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn simulate_without_noise_is_constant_and_reruns_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let args = |out: &Path| {
        vec!["simulate".to_string(), "--m".into(), "0".into(), "--D".into(), "0".into(), "--u0".into(), "0".into(),
             "--tmax".into(), "50".into(), "--out".into(), out.to_str().unwrap().into(), "--format".into(), "csv".into()]
    };
    let run = |out: &Path| code(&slowdown(&args(out).iter().map(String::as_str).collect::<Vec<_>>()));
    assert_eq!(run(&a), 0);
    assert_eq!(run(&b), 0);
    let (fa, fb) = (files(&a), files(&b));
    assert_eq!(fa, fb);
    let text = String::from_utf8(fa[0].1.clone()).unwrap();
    assert!(text.lines().skip(1).all(|l| l.ends_with(",0")), "{text}");

    let noisy = |out: &Path| {
        code(&slowdown(&["simulate", "--seed", "7", "--tmax", "50", "--out", out.to_str().unwrap()]))
    };
    let (c, d) = (dir.path().join("c"), dir.path().join("d"));
    assert_eq!(noisy(&c) + noisy(&d), 0);
    assert_eq!(files(&c), files(&d));
}

#[test]
fn sweep_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let single = dir.path().join("single");
    let o = slowdown(&["sweep", "--param", "D", "--grid", "0.05:0.05:1", "--realizations", "5", "--out", single.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let f = files(&single);
    assert_eq!(f.len(), 3);
    let csv = f.iter().find(|(n, _)| n.ends_with(".csv")).unwrap();
    let text = String::from_utf8(csv.1.clone()).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.starts_with("D,mean_ar1,stderr_ar1,mean_std,stderr_std,"));
    let svg = f.iter().find(|(n, _)| n.ends_with(".svg")).unwrap();
    assert_eq!(String::from_utf8_lossy(&svg.1).matches(r#"class="error-bar""#).count(), 2);

    let twice = |name: &str, jobs: &str| {
        let out = dir.path().join(name);
        let o = slowdown(&["sweep", "--param", "m", "--grid", "0:1.9:4", "--realizations", "8", "--jobs", jobs, "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        files(&out)
    };
    assert_eq!(twice("a", "1"), twice("b", "2"));
}

#[test]
fn bifurcation_reports_folds() {
    let dir = tempfile::tempdir().unwrap();
    let o = slowdown(&["bifurcation", "--grid", "-4:4:9", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("fold at m = -2.000000000, u = -1.000000000"), "{stdout}");
    assert!(stdout.contains("fold at m = 2.000000000, u = 1.000000000"));
    assert_eq!(files(dir.path()).len(), 3);
}
