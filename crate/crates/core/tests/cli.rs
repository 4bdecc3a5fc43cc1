use std::collections::BTreeMap;
use std::path::Path;

use hardy_nls::cli::run;
use hardy_nls::io::{parse_csv, parse_profile_csv};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("hardy-nls").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn summary(text: &str) -> BTreeMap<String, String> {
    text.lines()
        .filter_map(|l| l.split_once(": "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn num(map: &BTreeMap<String, String>, key: &str) -> f64 {
    map[key].parse().unwrap()
}

#[test]
fn constant_prints_cross_check() {
    let (code, out, _) = call(&["constant", "--d", "3", "--p", "10/3", "--c", "critical"]);
    assert_eq!(code, 0);
    let m = summary(&out);
    for key in ["c_hgn", "mass", "theta", "c_hgn_mass_critical", "cross_check_rel_diff"] {
        assert!(m.contains_key(key), "missing {key}");
    }
    assert!(num(&m, "cross_check_rel_diff") < 1e-12);
    assert!((num(&m, "theta") - 0.6).abs() < 1e-15);
}

#[test]
fn verify_reports_both_variants() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("j.csv");
    let (code, out, _) =
        call(&["verify", "--pohozaev", "--d", "3", "--p", "4", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let m = summary(&out);
    assert_eq!(m["consistent.result"], "Pass");
    assert_eq!(m["printed.result"], "Fail");
    let table = parse_csv(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(table.header[0].0, "hardy-nls");
    assert!(table.header.iter().any(|(k, _)| k == "ode_tol"));
    assert!(table.column("residual_consistent").is_some());
}

#[test]
fn usage_and_validation_errors() {
    let (code, _, err) = call(&["evolve", "--config", "missing.cfg"]);
    assert_eq!(code, 1);
    assert!(err.contains("missing.cfg"));
    assert_eq!(call(&["frobnicate"]).0, 1);
    assert_eq!(call(&["constant", "--d", "3", "--p", "10/3", "--bogus"]).0, 1);
    assert_eq!(call(&["constant", "--d", "3", "--p", "7"]).0, 1);
    assert_eq!(call(&["--help"]).0, 0);
}

fn write_config(dir: &Path) -> std::path::PathBuf {
    let cfg = dir.join("run.cfg");
    std::fs::write(
        &cfg,
        "# short run\nd = 3\np = 10/3\nc = critical\ndr_min = 0.02\nr_max = 10\n\
         dt = 0.01\nt_end = 0.05\nlog_interval = 0.01\nsnapshots = 0.05\ninitial = ground:0.9\n",
    )
    .unwrap();
    cfg
}

#[test]
fn evolve_is_deterministic() {
    let files = |dir: &Path| -> Vec<(String, Vec<u8>)> {
        let cfg = write_config(dir);
        let (code, out, err) = call(&["evolve", "--config", cfg.to_str().unwrap()]);
        assert_eq!(code, 0, "{err}");
        assert!(summary(&out).contains_key("mass_rel_drift"));
        let mut names: Vec<String> = std::fs::read_dir(dir)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .filter(|n| n.ends_with(".csv"))
            .collect();
        names.sort();
        names.into_iter().map(|n| (n.clone(), std::fs::read(dir.join(&n)).unwrap())).collect()
    };
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let fa = files(a.path());
    assert_eq!(fa.len(), 2);
    assert_eq!(fa, files(b.path()));
    let diag = parse_csv(std::str::from_utf8(&fa[0].1).unwrap()).unwrap();
    assert_eq!(diag.rows.len(), 6);
}

#[test]
fn snapshot_classifies_as_global() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    assert_eq!(call(&["evolve", "--config", cfg.to_str().unwrap()]).0, 0);
    let snap = dir.path().join("snapshot_t0.05.csv");
    let prof = parse_profile_csv(&snap, 3).unwrap();
    assert!(!prof.is_real());
    let (code, out, err) =
        call(&["classify", "--profile", snap.to_str().unwrap(), "--d", "3", "--p", "10/3", "--finite-variance"]);
    assert_eq!(code, 0, "{err}");
    let m = summary(&out);
    assert_eq!(m["verdict"], "Global");
    assert!(num(&m, "mass") < num(&m, "ground_state_mass"));
}
