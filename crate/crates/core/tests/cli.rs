use std::path::Path;
use std::process::Command;

use chemotaxis::harness::{read_field, run_cli, RunConfig};

const BIN: &str = env!("CARGO_BIN_EXE_chemotaxis");

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn short_steady(dir: &Path, extra: &str) -> String {
    write(dir, "cfg.toml", &format!("preset = \"steady-decay\"\n{extra}\n[time]\nt_end = 0.2\n"))
}

fn cli(args: &[&str]) -> i32 {
    let mut full = vec!["chemotaxis", "--quiet"];
    full.extend_from_slice(args);
    run_cli(full)
}

fn hash_line(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn run_writes_hashed_outputs_and_field_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = short_steady(dir.path(), "[output]\nname = \"s\"\nfields = true");
    let out = dir.path().join("out");
    assert_eq!(cli(&["--config", &cfg, "--out", out.to_str().unwrap(), "run"]), 0);

    let hash = RunConfig::load(Some(Path::new(&cfg)), None, Vec::new()).unwrap().hash();
    assert_eq!(hash.len(), 16);
    assert_eq!(hash_line(&out.join("s_series.csv")), format!("# config_hash={hash}"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("s_report.json")).unwrap()).unwrap();
    assert_eq!(report["config_hash"], hash.as_str());

    let dump = out.join("s_fields").join("v_00004.csv");
    assert_eq!(hash_line(&dump), format!("# config_hash={hash}"));
    let (t, dim, cells, values) = read_field(&dump).unwrap();
    assert_eq!((dim, cells, values.len()), (1, vec![128], 128));
    assert!((t - 0.2).abs() < 1e-9);
    let exact = (-2.0 * t).exp();
    assert!(values.iter().all(|v| (v / exact - 1.0).abs() < 1e-3));
}

#[test]
fn both_formulations_get_suffixed_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.toml", "preset = \"perturbed-1d\"\n[time]\nt_end = 0.05\n");
    let out = dir.path().join("out");
    assert_eq!(cli(&["--config", &cfg, "--out", out.to_str().unwrap(), "run"]), 0);
    assert!(out.join("perturbed-1d_uv_series.csv").exists());
    assert!(out.join("perturbed-1d_uw_series.csv").exists());
}

#[test]
fn exit_codes_follow_the_outcome() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = out.to_str().unwrap();

    let zero_signal = write(
        dir.path(),
        "zero.toml",
        "preset = \"steady-decay\"\n[initial.v]\nkind = \"constant\"\nvalue = 0.0\n",
    );
    assert_eq!(cli(&["--config", &zero_signal, "--out", o, "run"]), 4);

    let unknown = write(dir.path(), "unknown.toml", "preset = \"steady-decay\"\n[model]\ngamma = 1.0\n");
    assert_eq!(cli(&["--config", &unknown, "--out", o, "run"]), 4);
    assert_eq!(cli(&["--preset", "no-such-preset", "--out", o, "run"]), 4);
    assert_eq!(cli(&["--out", o, "run"]), 4);
    assert_eq!(cli(&["--bogus-flag"]), 4);

    let strict = short_steady(dir.path(), "[monitors.tolerances]\nmass = -1.0");
    assert_eq!(cli(&["--config", &strict, "--out", o, "run"]), 2);

    let ceiling = short_steady(dir.path(), "[monitors.blowup]\nceiling = 1.0");
    assert_eq!(cli(&["--config", &ceiling, "--out", o, "run"]), 3);
}

#[test]
fn environment_overrides_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = short_steady(dir.path(), "[output]\nname = \"env\"");
    let out = dir.path().join("out");
    let status = Command::new(BIN)
        .args(["--quiet", "--config", &cfg, "--out", out.to_str().unwrap(), "run"])
        .env("CHEMOTAXIS__TIME__T_END", "0.1")
        .env("CHEMOTAXIS__OUTPUT__NAME", "overridden")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out.join("overridden_series.csv").exists());
    let text = std::fs::read_to_string(out.join("overridden_series.csv")).unwrap();
    let last_t: f64 = text.lines().last().unwrap().split(',').next().unwrap().parse().unwrap();
    assert!((last_t - 0.1).abs() < 1e-9);

    let bad = Command::new(BIN)
        .args(["--quiet", "--config", &cfg, "--out", out.to_str().unwrap(), "run"])
        .env("CHEMOTAXIS__MODEL__CHI", "-1.0")
        .status()
        .unwrap();
    assert_eq!(bad.code(), Some(4));
}

#[test]
fn sweep_runs_a_small_grid_and_refuses_large_ones() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let small = write(
        dir.path(),
        "sweep.toml",
        "preset = \"steady-decay\"\n[time]\nt_end = 0.1\n[output]\nname = \"grid\"\n[sweep]\nchi = [0.5, 0.8]\nmu = [0.5, 1.0]\n",
    );
    assert_eq!(cli(&["--config", &small, "--out", out.to_str().unwrap(), "sweep"]), 0);
    let text = std::fs::read_to_string(out.join("grid_sweep.csv")).unwrap();
    assert!(text.starts_with("# config_hash="));
    assert_eq!(text.lines().count(), 2 + 4);

    let large = write(
        dir.path(),
        "large.toml",
        "preset = \"steady-decay\"\n[sweep]\nchi = [0.1, 0.2, 0.3]\nmu = [0.5, 1.0]\ncap = 4\n",
    );
    assert_eq!(cli(&["--config", &large, "--out", out.to_str().unwrap(), "sweep"]), 4);
}

#[test]
fn check_exponents_reports_the_calculus() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ex");
    let o = out.to_str().unwrap();
    assert_eq!(cli(&["--out", o, "check-exponents", "--chi", "0.8", "--mu", "0.5", "--n", "2"]), 0);
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("exponents.json")).unwrap()).unwrap();
    assert_eq!(doc["pair"][0].as_f64(), Some(1.28125));
    assert_eq!(doc["pair"][1].as_f64(), Some(0.140625));
    assert_eq!(doc["gates"]["chi_ok"], true);

    let printed = Command::new(BIN).args(["check-exponents", "--chi", "0.6", "--mu", "0.3", "--n", "4"]).output().unwrap();
    assert_eq!(printed.status.code(), Some(0));
    assert!(!String::from_utf8_lossy(&printed.stdout).is_empty());
    assert_eq!(cli(&["check-exponents", "--chi", "0.8", "--mu", "0.5"]), 4);
}

#[test]
fn verify_and_compare_write_hashed_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = out.to_str().unwrap();
    let cfg = short_steady(dir.path(), "[output]\nname = \"vf\"");
    assert_eq!(cli(&["--config", &cfg, "--out", o, "verify"]), 0);
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("vf_verify.json")).unwrap()).unwrap();
    assert!(doc["config_hash"].is_string());
    assert_eq!(cli(&["--config", &cfg, "--out", o, "verify", "--barrier", "nonsense"]), 4);

    let cmp = write(dir.path(), "cmp.toml", "preset = \"perturbed-1d\"\n[time]\nt_end = 0.05\n[output]\nname = \"cmp\"\n");
    assert_eq!(cli(&["--config", &cmp, "--out", o, "compare-formulations"]), 0);
    let text = std::fs::read_to_string(out.join("cmp_compare.csv")).unwrap();
    assert!(text.starts_with("# config_hash="));
    assert_eq!(text.lines().count(), 2 + 3);
}

#[test]
fn seed_flag_changes_only_noisy_runs() {
    let a = RunConfig::load(None, Some("perturbed-1d"), vec![("CHEMOTAXIS__SEED".into(), "1".into())]).unwrap();
    let b = RunConfig::load(None, Some("perturbed-1d"), vec![("CHEMOTAXIS__SEED".into(), "2".into())]).unwrap();
    assert_ne!(a.hash(), b.hash());
    let g = a.build_grid().unwrap();
    // without noise the sampled data ignore the seed
    assert_eq!(a.initial_fields(&g).unwrap(), b.initial_fields(&g).unwrap());
}
