use std::fs;
use std::process::{Command, Output};

use cohgrav::{parse_config, RunConfig};
use serde_json::Value;

fn cohgrav(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cohgrav")).args(args).output().unwrap()
}

fn stdout_json(o: &Output) -> serde_json::Map<String, Value> {
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    assert_eq!(text.lines().count(), 1, "{text}");
    match serde_json::from_str(&text).unwrap() {
        Value::Object(m) => m,
        v => panic!("not an object: {v}"),
    }
}

#[test]
fn entanglement_of_the_maximally_entangled_state() {
    let o = cohgrav(&["entanglement", "--alpha", "0.5", "--beta", "0.5"]);
    assert!(o.status.success());
    let m = stdout_json(&o);
    assert_eq!(m["negativity"], 0.5);
    assert_eq!(m["log_negativity"], 1.0);
    assert_eq!(m["concurrence"], 1.0);
    assert_eq!(m["class"], "maximally_entangled");
    // flat: no nested objects or arrays
    assert!(m.values().all(|v| !v.is_object() && !v.is_array()));
}

#[test]
fn complex_beta_uses_its_modulus() {
    let o = cohgrav(&["entanglement", "--alpha", "0.5", "--beta", "0.3", "--beta-im", "0.4"]);
    assert!(o.status.success());
    let m = stdout_json(&o);
    assert!((m["negativity"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn scales_for_the_massive_benchmark() {
    let o = cohgrav(&["scales", "--mass-kg", "1e-21", "--sigma-per-m", "1e22"]);
    assert!(o.status.success());
    let m = stdout_json(&o);
    let xi = m["xi"].as_f64().unwrap();
    let tau = m["tau_s"].as_f64().unwrap();
    assert!((1e-27..=1e-25).contains(&xi));
    assert!((3e-33..=3e-31).contains(&tau));
    assert_eq!(m["perturbative_ok"], true);
    assert_eq!(m["regime_ok"], false);
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
}

#[test]
fn invalid_state_is_a_validation_error_naming_key_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "state.alpha = 1.0\nstate.beta = 0.3\n").unwrap();
    let o = cohgrav(&["entanglement", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2") && err.contains("state.beta") && err.contains("1/4"), "{err}");
    assert!(o.stdout.is_empty());
}

#[test]
fn unknown_keys_and_flags_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("typo.cfg");
    fs::write(&cfg, "# comment\ngrid.nn = 8\n").unwrap();
    let o = cohgrav(&["print-config", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("grid.nn") && err.contains("line 2"), "{err}");

    assert_eq!(cohgrav(&["scales", "--set", "scales.mas_kg=1"]).status.code(), Some(1));
    assert_eq!(cohgrav(&["scales", "--no-such-flag"]).status.code(), Some(1));
}

#[test]
fn print_config_echoes_a_parseable_configuration() {
    let o = cohgrav(&["print-config", "--grid-n", "24", "--l-tilde", "2pi"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let parsed = parse_config(&text).unwrap();
    assert_eq!(parsed.grid_n, 24);
    assert_eq!(parsed.l_tilde, 2.0 * std::f64::consts::PI);

    let defaults = cohgrav(&["print-config"]);
    assert_eq!(parse_config(&String::from_utf8(defaults.stdout).unwrap()).unwrap(), RunConfig::default());
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "state.alpha = 1.0\nstate.beta = 0.0\n").unwrap();
    let o = cohgrav(&["entanglement", "--config", cfg.to_str().unwrap(), "--alpha", "0.5", "--beta", "0.5"]);
    assert!(o.status.success());
    assert_eq!(stdout_json(&o)["concurrence"], 1.0);
}

#[test]
fn source_field_at_zero_beta_has_no_coherence() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = cohgrav(&["source-field", "--beta", "0", "--grid-n", "8", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = stdout_json(&o);
    let hash = summary["config_sha256"].as_str().unwrap().to_string();

    for name in ["source.csv", "coherence.csv"] {
        let text = fs::read_to_string(out.join(name)).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), format!("# config_sha256={hash}"));
        assert_eq!(lines.next().unwrap(), "x,y,z,value");
        let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
        assert_eq!(rows.len(), 512);
        assert!(rows.iter().all(|r| r.len() == 4));
        if name == "coherence.csv" {
            assert!(rows.iter().all(|r| r[3] == 0.0));
        } else {
            assert!(rows.iter().any(|r| r[3] != 0.0));
        }
    }
    for name in ["source.json", "coherence.json", "summary.json"] {
        let m: Value = serde_json::from_str(&fs::read_to_string(out.join(name)).unwrap()).unwrap();
        assert_eq!(m["config_sha256"], hash.as_str(), "{name}");
    }
    let sidecar: Value = serde_json::from_str(&fs::read_to_string(out.join("coherence.json")).unwrap()).unwrap();
    assert_eq!(sidecar["grid_n"], 8);
    assert_eq!(sidecar["label"], "coherence");
    assert_eq!(sidecar["quad_rule"], "gk21");
}

#[test]
fn decay_writes_a_normalized_curve() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d");
    let o = cohgrav(&["decay", "--m-tilde", "0", "--k0", "50", "--times", "0,10,50", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = fs::read_to_string(out.join("decay.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# config_sha256="));
    assert_eq!(lines[1], "t,trace,magnitude,normalized,error");
    assert_eq!(lines.len(), 5);
    let first: Vec<f64> = lines[2].split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(first[3], 1.0);
    assert!(stdout_json(&o)["ratio_last"].as_f64().unwrap() < 0.1);
}

#[test]
fn non_convergence_exits_with_two() {
    let o = cohgrav(&["decay", "--times", "0", "--rel-tol", "1e-15", "--abs-tol", "1e-300", "--max-subdiv", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout_json(&o)["converged"], false);
}

#[test]
fn coincident_sites_warn() {
    let o = cohgrav(&["decay", "--l-tilde", "0", "--times", "0"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("L = 0"));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let out = dir.path().join(name);
        let o = cohgrav(&["ricci-field", "--grid-n", "8", "--threads", threads, "--out", out.to_str().unwrap()]);
        assert!(o.status.success());
        (o.stdout, fs::read(out.join("ricci.csv")).unwrap(), fs::read(out.join("ricci.json")).unwrap())
    };
    assert_eq!(run("a", "1"), run("b", "3"));
}
