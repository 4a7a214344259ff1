use num_complex::Complex64;
use sqrtop::config::RunConfig;
use sqrtop::field::{Field, Grid};
use std::path::Path;
use std::process::{Command, Output};

fn sqrtop(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqrtop"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn data_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn write_field(dir: &Path, name: &str, f: &Field) {
    std::fs::write(dir.join(name), f.to_text()).unwrap();
}

fn meta_result(path: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(path).unwrap();
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 3);
    lines.into_iter().find(|l| l["record"] == "result").unwrap()
}

#[test]
fn suite_identities_passes_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let o = sqrtop(dir.path(), &["suite", "identities", "--out", "a"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(summary["status"], "pass");
    let report = std::fs::read_to_string(dir.path().join("a/suite-identities.csv")).unwrap();
    for name in ["resolvent_kernel", "spectral_density", "laplace_bessel", "bromwich_density"] {
        assert!(report.contains(name), "{report}");
    }
    sqrtop(dir.path(), &["suite", "identities", "--out", "b"]);
    for f in ["suite-identities.csv", "suite-identities-notes.csv", "suite-identities-summary.json"] {
        let a = std::fs::read(dir.path().join("a").join(f)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f} differs between runs");
    }
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&sqrtop(dir.path(), &["suite", "no-such-suite"])), 2);
    assert_eq!(code(&sqrtop(dir.path(), &["frobnicate"])), 2);
    assert_eq!(code(&sqrtop(dir.path(), &["suite", "bessel", "--tol", "bogus=1"])), 2);
    assert_eq!(code(&sqrtop(dir.path(), &["suite", "bessel", "--tol", "bessel_recurrence=-1"])), 2);
}

#[test]
fn tightened_tolerances_fail_with_enumerated_failures() {
    let dir = tempfile::tempdir().unwrap();
    let o = sqrtop(dir.path(), &["suite", "all", "--tol", "*=1e-20"]);
    assert_eq!(code(&o), 1);
    let summary: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let failures = summary["failures"].as_array().unwrap();
    assert!(failures.len() > 20, "{summary}");
    assert!(failures.iter().any(|f| f == "bessel/recurrence_k2"));
    let report = std::fs::read_to_string(dir.path().join("suite-all.csv")).unwrap();
    assert!(report.lines().skip(1).any(|l| l.contains(",fail,")));
}

#[test]
fn free_table_has_three_columns_and_decays() {
    let dir = tempfile::tempdir().unwrap();
    let o = sqrtop(dir.path(), &["tabulate", "free", "--r-min", "0.01", "--r-max", "10", "--points", "400"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("tabulate-free.csv")).unwrap();
    assert!(text.contains("# mu = 1") && text.contains("# levy_normalization"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 400);
    assert!(rows.iter().all(|r| r.len() == 3));
    let tail: Vec<f64> = rows
        .iter()
        .filter(|r| r[0].parse::<f64>().unwrap() > 3.0)
        .map(|r| r[1].parse().unwrap())
        .collect();
    assert!(tail.windows(2).all(|w| w[1] < w[0]));
    assert!(rows.iter().any(|r| r[2] == "singular") && rows.iter().any(|r| r[2] == "asymptotic"));
}

#[test]
fn constant_b_at_zero_field_matches_free_table() {
    let dir = tempfile::tempdir().unwrap();
    sqrtop(dir.path(), &["tabulate", "free", "--points", "50"]);
    let o = sqrtop(dir.path(), &["tabulate", "constant-B", "--points", "50", "--b", "0,0,0"]);
    assert_eq!(code(&o), 0);
    let free = std::fs::read_to_string(dir.path().join("tabulate-free.csv")).unwrap();
    let b = std::fs::read_to_string(dir.path().join("tabulate-constant-B.csv")).unwrap();
    assert_eq!(data_rows(&free), data_rows(&b));
    // A field perpendicular to the ray changes the table.
    sqrtop(dir.path(), &["tabulate", "constant-B", "--points", "50", "--b", "0,0,0.5", "--output", "b.csv"]);
    let b = std::fs::read_to_string(dir.path().join("b.csv")).unwrap();
    assert_ne!(data_rows(&free), data_rows(&b));
}

#[test]
fn z_kernel_table_covers_every_region() {
    let dir = tempfile::tempdir().unwrap();
    let o = sqrtop(
        dir.path(),
        &["tabulate", "z-kernel", "--grid", "13,10", "--ct-min", "-3", "--ct-max", "3", "--r-min", "0.1", "--r-max", "2.9"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data_rows(&std::fs::read_to_string(dir.path().join("tabulate-z-kernel.csv")).unwrap());
    assert!(rows.iter().all(|r| r.len() == 5));
    for region in ["future-timelike", "past-timelike", "spacelike"] {
        assert!(rows.iter().any(|r| r[4] == region), "{region} missing");
    }
}

#[test]
fn empty_range_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&sqrtop(dir.path(), &["tabulate", "free", "--points", "0"])), 2);
    assert_eq!(code(&sqrtop(dir.path(), &["tabulate", "heat", "--r-min", "2", "--r-max", "1"])), 2);
    assert_eq!(code(&sqrtop(dir.path(), &["tabulate", "z-kernel", "--ct-points", "0"])), 2);
    assert_eq!(code(&sqrtop(dir.path(), &["tabulate", "nonsense"])), 2);
}

#[test]
fn sqrt_free_on_constant_field() {
    let dir = tempfile::tempdir().unwrap();
    let psi = Field::from_fn(Grid::periodic(8, 0.5).unwrap(), |_| Complex64::new(1.0, 0.0));
    write_field(dir.path(), "one.field", &psi);
    let o = sqrtop(dir.path(), &["apply", "sqrt-free", "one.field", "--params", "m=1.5", "--output", "out.field"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = Field::from_text(&std::fs::read_to_string(dir.path().join("out.field")).unwrap()).unwrap();
    for v in &out.data {
        assert!((v - Complex64::new(1.5, 0.0)).norm() < 1e-10);
    }
    let meta = meta_result(&dir.path().join("out.field.meta.jsonl"));
    assert!(meta["error_estimate"].as_f64().unwrap() < 1e-10, "{meta}");
}

#[test]
fn evolve_forward_and_back_recovers_input() {
    let dir = tempfile::tempdir().unwrap();
    let psi = Field::from_fn(Grid::periodic(12, 0.5).unwrap(), |x| {
        Complex64::new((-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 2.0).exp(), 0.1 * x[0])
    });
    write_field(dir.path(), "psi.field", &psi);
    assert_eq!(code(&sqrtop(dir.path(), &["apply", "evolve-spectral", "psi.field", "--t", "0.7", "--output", "fwd.field"])), 0);
    assert_eq!(code(&sqrtop(dir.path(), &["apply", "evolve-spectral", "fwd.field", "--t", "-0.7", "--output", "back.field"])), 0);
    let back = Field::from_text(&std::fs::read_to_string(dir.path().join("back.field")).unwrap()).unwrap();
    assert!(back.rel_l2_error(&psi).unwrap() < 1e-12);
}

#[test]
fn propagate_u_sidecar_reports_oracle_difference() {
    let dir = tempfile::tempdir().unwrap();
    let psi = Field::from_fn(Grid::radial(601, 0.02).unwrap(), |x| {
        Complex64::new((-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 2.0).exp(), 0.0)
    });
    write_field(dir.path(), "g.field", &psi);
    let o = sqrtop(dir.path(), &["apply", "propagate-U", "g.field", "--t", "0.5", "--grid", "601"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let meta = meta_result(&dir.path().join("propagate-U.field.meta.jsonl"));
    assert_eq!(meta["oracle"], "evolve-spectral");
    assert!(meta["oracle_difference"].as_f64().unwrap() < 1e-2, "{meta}");
    // A mismatched --grid is refused.
    assert_eq!(code(&sqrtop(dir.path(), &["apply", "propagate-U", "g.field", "--grid", "600"])), 2);
}

#[test]
fn malformed_and_missing_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let head = "SQRTFIELD 1\ngrid radial 16 0.1\ncomponents 1\ndata\n1 0\n";
    let text = format!("{head}x 0\n{}", "0 0\n".repeat(14));
    std::fs::write(dir.path().join("bad.field"), text).unwrap();
    let o = sqrtop(dir.path(), &["apply", "sqrt-free", "bad.field"]);
    assert_eq!(code(&o), 4);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains(&format!("byte {}", head.len())), "{err}");
    assert_eq!(code(&sqrtop(dir.path(), &["apply", "sqrt-free", "missing.field"])), 3);
    assert_eq!(code(&sqrtop(dir.path(), &["apply", "sqrt-free"])), 2);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.toml"),
        "suite = \"identities\"\noutput_dir = \"from-config\"\n[params]\nm = 2.0\n[tolerances]\nidentity_resolvent = 1e-7\n",
    )
    .unwrap();
    let o = sqrtop(dir.path(), &["suite", "--config", "run.toml"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = std::fs::read_to_string(dir.path().join("from-config/suite-identities.csv")).unwrap();
    assert!(report.contains("1.000e-7,identity_resolvent"));
    let o = sqrtop(dir.path(), &["suite", "--config", "run.toml", "--out", "flag", "--tol", "identity_resolvent=1e-9"]);
    assert_eq!(code(&o), 0);
    let report = std::fs::read_to_string(dir.path().join("flag/suite-identities.csv")).unwrap();
    assert!(report.contains("1.000e-9,identity_resolvent"));

    std::fs::write(dir.path().join("bad.toml"), "sute = \"identities\"\n").unwrap();
    assert_eq!(code(&sqrtop(dir.path(), &["suite", "--config", "bad.toml"])), 2);
    std::fs::write(dir.path().join("neg.toml"), "[tolerances]\nresolvent = 0.0\n").unwrap();
    assert_eq!(code(&sqrtop(dir.path(), &["info", "--config", "neg.toml"])), 2);
}

#[test]
fn config_round_trips() {
    let text = "command = \"apply\"\nsuite = \"dirac\"\ngrid = [16, 16, 16]\n\n[params]\nm = 0.5\nc = 2.0\nhbar = 1.0\ne = -1.0\n\n[fields]\ninput = \"in.field\"\n\n[tolerances]\n\"*\" = 0.001\nresolvent = 1e-9\n\n[tabulate]\nkind = \"heat\"\nt = 0.25\n\n[apply]\noperator = \"sqrt-B\"\nb = [0.0, 0.0, 0.5]\nmass_model = \"hermitian\"\n";
    let cfg = RunConfig::from_toml(text).unwrap();
    assert_eq!(cfg.tabulate.points, 200);
    let again = RunConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
    assert_eq!(cfg, again);
    assert_eq!(RunConfig::from_toml(&RunConfig::default().to_toml().unwrap()).unwrap(), RunConfig::default());
    assert!(RunConfig::from_toml("[apply]\nopertor = \"x\"\n").is_err());
}

#[test]
fn info_reports_effective_settings() {
    let dir = tempfile::tempdir().unwrap();
    let o = sqrtop(dir.path(), &["info", "--params", "m=2,c=3", "--tol", "resolvent=1e-9"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["params"]["mu"], 6.0);
    assert_eq!(v["tolerances"]["resolvent"], 1e-9);
    assert_eq!(v["tolerances"]["balakrishnan"], 1e-6);
    assert_eq!(code(&sqrtop(dir.path(), &["info", "--params", "q=1"])), 2);
}
