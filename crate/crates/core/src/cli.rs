//! Command-line front end: `suite`, `tabulate`, `apply` and `info`.
//!
//! Exit codes: 0 ok, 1 a check or computation failed, 2 usage, 3 I/O, 4 malformed data.

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::field::{Field, Grid};
use crate::kernel::{
    apply_constant_a, apply_constant_b, apply_free, free_profile, KernelProfile, MassConstruction, MassModel,
    LEVY_NORMALIZATION, ZETA_INV_R2,
};
use crate::params::PhysicalParams;
use crate::propagator::{apply_u, subordinated_heat_kernel, tabulate as z_tabulate, PropagatorOptions};
use crate::special::bessel_k_all;
use crate::spectral::{apply_spectral, evolve_spectral, radial_apply_spectral};
use crate::suites::{run_suite, SuiteReport, Tolerances, DEFAULT_TOLERANCES, SUITES};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "sqrtop", version, about = "Relativistic square-root operator: validation suites, kernel tables and field evaluation")]
pub struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory (default: current directory).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Tolerance override; `*` sets every tolerance. Repeatable.
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE")]
    pub tol: Vec<String>,
    /// Point counts: N or N,N,N for fields; N or N_CT,N_R for tables.
    #[arg(long, global = true, value_name = "N[,N,N]")]
    pub grid: Option<String>,
    /// Physical parameters, any subset of m, c, hbar, e.
    #[arg(long, global = true, value_name = "m=..,c=..,hbar=..,e=..")]
    pub params: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a validation suite (or `all`) and write its report.
    Suite { name: Option<String> },
    /// Tabulate a kernel: free, constant-A, constant-B, z-kernel or heat.
    Tabulate(TabulateArgs),
    /// Apply an operator to a field file: sqrt-free, sqrt-A, sqrt-B, evolve-spectral or propagate-U.
    Apply(ApplyArgs),
    /// Print parameters, tolerances and constants in effect.
    Info,
}

#[derive(Debug, Args)]
pub struct TabulateArgs {
    /// free, constant-A, constant-B, z-kernel or heat.
    pub kind: Option<String>,
    /// Smallest separation.
    #[arg(long)]
    pub r_min: Option<f64>,
    /// Largest separation.
    #[arg(long)]
    pub r_max: Option<f64>,
    /// Number of r samples.
    #[arg(long)]
    pub points: Option<usize>,
    /// z-kernel time range start.
    #[arg(long, allow_hyphen_values = true)]
    pub ct_min: Option<f64>,
    /// z-kernel time range end.
    #[arg(long, allow_hyphen_values = true)]
    pub ct_max: Option<f64>,
    /// Number of ct samples.
    #[arg(long)]
    pub ct_points: Option<usize>,
    /// Imaginary time of the heat kernel.
    #[arg(long)]
    pub t: Option<f64>,
    /// Constant vector potential.
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true, value_name = "X,Y,Z")]
    pub a: Option<[f64; 3]>,
    /// Constant magnetic field.
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true, value_name = "X,Y,Z")]
    pub b: Option<[f64; 3]>,
    /// Direction of the separation vector.
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true, value_name = "X,Y,Z")]
    pub direction: Option<[f64; 3]>,
    /// Output CSV (default: <out>/tabulate-<kind>.csv).
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ApplyArgs {
    /// sqrt-free, sqrt-A, sqrt-B, evolve-spectral or propagate-U.
    pub operator: Option<String>,
    /// Input field file.
    pub input: Option<PathBuf>,
    /// Evolution time.
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    /// Constant vector potential (sqrt-A, propagate-U).
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true, value_name = "X,Y,Z")]
    pub a: Option<[f64; 3]>,
    /// Constant magnetic field (sqrt-B).
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true, value_name = "X,Y,Z")]
    pub b: Option<[f64; 3]>,
    /// scalar, verbatim or hermitian.
    #[arg(long)]
    pub mass_model: Option<String>,
    /// Output field (default: <out>/<operator>.field).
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

fn parse_vec3(s: &str) -> std::result::Result<[f64; 3], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("'{t}' is not a number")))
        .collect::<std::result::Result<_, _>>()?;
    v.try_into().map_err(|_| "expected three comma-separated numbers".to_string())
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Usage(_) | Error::Domain(_) | Error::Unsupported(_) => 2,
        Error::Io(_) => 3,
        Error::Malformed { .. } => 4,
        _ => 1,
    }
}

/// Parse arguments and run; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Merge defaults, the config file and flags.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::from_toml(&read_text(p)?)?,
        None => RunConfig::default(),
    };
    if let Some(o) = &cli.out {
        cfg.output_dir = Some(o.clone());
    }
    if let Some(p) = &cli.params {
        cfg.params.apply_overrides(p)?;
    }
    for t in &cli.tol {
        let (k, v) = t
            .split_once('=')
            .ok_or_else(|| Error::usage(format!("--tol expects NAME=VALUE, got '{t}'")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::usage(format!("tolerance {k} has non-numeric value '{v}'")))?;
        let k = if k.trim() == "all" { "*" } else { k.trim() };
        cfg.tolerances.insert(k.to_string(), v);
    }
    if let Some(g) = &cli.grid {
        let dims = g
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| Error::usage(format!("--grid: '{t}' is not a count"))))
            .collect::<Result<Vec<_>>>()?;
        cfg.grid = Some(dims);
    }
    cfg.command = Some(
        match cli.command {
            Command::Suite { .. } => "suite",
            Command::Tabulate(_) => "tabulate",
            Command::Apply(_) => "apply",
            Command::Info => "info",
        }
        .to_string(),
    );
    match &cli.command {
        Command::Suite { name } => {
            if name.is_some() {
                cfg.suite = name.clone();
            }
        }
        Command::Tabulate(t) => {
            let tc = &mut cfg.tabulate;
            if t.kind.is_some() {
                tc.kind = t.kind.clone();
            }
            macro_rules! set {
                ($($f:ident),*) => { $(if let Some(v) = t.$f { tc.$f = v; })* };
            }
            set!(r_min, r_max, points, ct_min, ct_max, ct_points, t, a, b, direction);
            if let Some(o) = &t.output {
                cfg.fields.output = Some(o.clone());
            }
        }
        Command::Apply(a) => {
            let ac = &mut cfg.apply;
            if a.operator.is_some() {
                ac.operator = a.operator.clone();
            }
            if let Some(v) = a.t {
                ac.t = v;
            }
            if let Some(v) = a.a {
                ac.a = v;
            }
            if let Some(v) = a.b {
                ac.b = v;
            }
            if let Some(v) = &a.mass_model {
                ac.mass_model = v.clone();
            }
            if let Some(i) = &a.input {
                cfg.fields.input = Some(i.clone());
            }
            if let Some(o) = &a.output {
                cfg.fields.output = Some(o.clone());
            }
        }
        Command::Info => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn run(cli: Cli) -> Result<i32> {
    let cfg = resolve_config(&cli)?;
    match cli.command {
        Command::Suite { .. } => cmd_suite(&cfg),
        Command::Tabulate(_) => cmd_tabulate(&cfg),
        Command::Apply(_) => cmd_apply(&cfg),
        Command::Info => cmd_info(&cfg),
    }
}

fn out_dir(cfg: &RunConfig) -> PathBuf {
    cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("."))
}

/// One line to stdout; a closed pipe is not an error.
fn emit(line: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{line}");
}

fn read_text(p: &Path) -> Result<String> {
    std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

/// Write through a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(format!("{}: {e}", path.display()));
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(io)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("{}: not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    std::fs::write(&tmp, bytes).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        io(e)
    })
}

fn csv_bytes(rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.write_record(&r).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.into_inner().map_err(|e| Error::Io(e.to_string()))
}

fn params_json(p: &PhysicalParams) -> Value {
    json!({"m": p.m, "c": p.c, "hbar": p.hbar, "e": p.e, "mu": p.mu()})
}

fn cmd_suite(cfg: &RunConfig) -> Result<i32> {
    let name = cfg
        .suite
        .clone()
        .ok_or_else(|| Error::usage(format!("suite name required: one of {} or all", SUITES.join(", "))))?;
    let tol = cfg.tolerances()?;
    let reports = run_suite(&name, &tol)?;
    let dir = out_dir(cfg);
    write_suite_files(&dir, &name, &reports)?;
    let summary = suite_summary(&name, &reports);
    emit(&summary.to_string());
    Ok(if summary["failed"].as_u64() == Some(0) { 0 } else { 1 })
}

fn suite_summary(name: &str, reports: &[SuiteReport]) -> Value {
    let checks: usize = reports.iter().map(|r| r.checks.len()).sum();
    let failures: Vec<String> = reports
        .iter()
        .flat_map(|r| r.failures().map(|c| format!("{}/{}", c.suite, c.name)))
        .collect();
    json!({
        "suite": name,
        "status": if failures.is_empty() { "pass" } else { "fail" },
        "checks": checks,
        "failed": failures.len(),
        "failures": failures,
    })
}

fn write_suite_files(dir: &Path, name: &str, reports: &[SuiteReport]) -> Result<()> {
    let header = ["suite", "criterion", "check", "value", "tolerance", "tol_key", "passed", "error"];
    let rows = std::iter::once(header.iter().map(|s| s.to_string()).collect()).chain(reports.iter().flat_map(|r| {
        r.checks.iter().map(|c| {
            vec![
                c.suite.clone(),
                c.criterion.to_string(),
                c.name.clone(),
                format!("{:.6e}", c.value),
                format!("{:.3e}", c.tolerance),
                c.tol_key.clone(),
                if c.passed { "pass" } else { "fail" }.to_string(),
                c.error.clone().unwrap_or_default(),
            ]
        })
    }));
    write_atomic(&dir.join(format!("suite-{name}.csv")), &csv_bytes(rows)?)?;

    let notes = std::iter::once(vec!["suite".to_string(), "name".into(), "value".into()])
        .chain(reports.iter().flat_map(|r| r.notes.iter().map(|n| vec![n.suite.clone(), n.name.clone(), n.value.clone()])));
    write_atomic(&dir.join(format!("suite-{name}-notes.csv")), &csv_bytes(notes)?)?;

    let timing = std::iter::once(vec!["suite".to_string(), "criterion".into(), "seconds".into()]).chain(
        reports.iter().flat_map(|r| {
            r.criterion_time
                .iter()
                .map(|(k, d)| vec![r.suite.clone(), k.to_string(), format!("{:.3}", d.as_secs_f64())])
                .chain(std::iter::once(vec![r.suite.clone(), "total".into(), format!("{:.3}", r.elapsed.as_secs_f64())]))
        }),
    );
    write_atomic(&dir.join(format!("suite-{name}-timing.csv")), &csv_bytes(timing)?)?;

    let mut summary = suite_summary(name, reports).to_string();
    summary.push('\n');
    write_atomic(&dir.join(format!("suite-{name}-summary.json")), summary.as_bytes())
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn check_range(name: &str, lo: f64, hi: f64, n: usize) -> Result<()> {
    if n == 0 || !(lo.is_finite() && hi.is_finite()) || hi < lo || (n > 1 && hi == lo) {
        return Err(Error::usage(format!("empty {name} range [{lo}, {hi}] with {n} points")));
    }
    Ok(())
}

fn unit(v: [f64; 3]) -> Result<[f64; 3]> {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::usage("direction must be a nonzero vector"));
    }
    Ok(v.map(|x| x / n))
}

fn cmd_tabulate(cfg: &RunConfig) -> Result<i32> {
    let mut tc = cfg.tabulate.clone();
    let kind = tc
        .kind
        .clone()
        .ok_or_else(|| Error::usage("tabulate needs a kind: free, constant-A, constant-B, z-kernel or heat"))?;
    let params = cfg.params.physical()?;
    match (kind.as_str(), cfg.grid.as_deref()) {
        (_, None) => {}
        ("z-kernel", Some([n])) => tc.points = *n,
        ("z-kernel", Some([nct, nr])) => {
            tc.ct_points = *nct;
            tc.points = *nr;
        }
        (_, Some([n])) => tc.points = *n,
        (_, Some(g)) => return Err(Error::usage(format!("--grid {g:?} does not fit a {kind} table"))),
    }
    check_range("r", tc.r_min, tc.r_max, tc.points)?;
    if tc.r_min <= 0.0 && kind != "z-kernel" {
        return Err(Error::usage("kernel tables need r_min > 0"));
    }
    let mu = params.mu();
    let rs = linspace(tc.r_min, tc.r_max, tc.points);
    let mut comments: Vec<(String, String)> = vec![
        ("kind".into(), kind.clone()),
        ("m".into(), format!("{}", params.m)),
        ("c".into(), format!("{}", params.c)),
        ("hbar".into(), format!("{}", params.hbar)),
        ("e".into(), format!("{}", params.e)),
        ("mu".into(), format!("{mu}")),
        ("levy_normalization".into(), format!("{LEVY_NORMALIZATION:.17e}")),
        ("zeta_inv_r2".into(), format!("{ZETA_INV_R2}")),
    ];
    let needs_mass = || {
        if mu > 0.0 {
            Ok(())
        } else {
            Err(Error::usage(format!("{kind} table needs m > 0")))
        }
    };
    let text = match kind.as_str() {
        "free" => {
            needs_mass()?;
            comments.push(("value".into(), "nu(r)/(hbar c mu^2 levy_normalization) = K2(mu r)/r^2".into()));
            free_profile(mu, &rs)?.to_csv(&comments)
        }
        "constant-A" => {
            needs_mass()?;
            let n = unit(tc.direction)?;
            let a = params.gauge_wavevector(tc.a);
            let an = a[0] * n[0] + a[1] * n[1] + a[2] * n[2];
            comments.push(("A".into(), format!("{:?}", tc.a)));
            comments.push(("direction".into(), format!("{n:?}")));
            comments.push(("value".into(), "K2(mu r)/r^2 * exp(i a.n r), a = eA/(hbar c), separation r n".into()));
            let base = free_profile(mu, &rs)?;
            let values = if an == 0.0 {
                base.values.clone()
            } else {
                base.values.iter().zip(&rs).map(|(v, r)| v * Complex64::from_polar(1.0, an * r)).collect()
            };
            KernelProfile::new(mu, rs, values)?.to_csv(&comments)
        }
        "constant-B" => {
            needs_mass()?;
            let n = unit(tc.direction)?;
            comments.push(("B".into(), format!("{:?}", tc.b)));
            comments.push(("direction".into(), format!("{n:?}")));
            comments.push((
                "value".into(),
                "K2(mu r)/r^2 - |a(y)|^2 K1(mu r)/(mu r), x = 0, y = r n, a(y) = (e/2 hbar c) y x B".into(),
            ));
            let base = free_profile(mu, &rs)?;
            let values = base
                .values
                .iter()
                .zip(&rs)
                .map(|(v, &r)| {
                    let y = n.map(|x| x * r);
                    let ay = crate::kernel::symmetric_gauge(y, tc.b, &params);
                    let a2 = ay[0] * ay[0] + ay[1] * ay[1] + ay[2] * ay[2];
                    if a2 == 0.0 {
                        return Ok(*v);
                    }
                    let k1 = bessel_k_all(mu * r)?[1];
                    Ok(v - a2 * k1 / (mu * r))
                })
                .collect::<Result<Vec<_>>>()?;
            KernelProfile::new(mu, rs, values)?.to_csv(&comments)
        }
        "heat" => {
            if !(tc.t > 0.0) {
                return Err(Error::usage("heat kernel needs t > 0"));
            }
            comments.push(("t".into(), format!("{}", tc.t)));
            comments.push(("value".into(), "kernel of exp(-ct sqrt(-Laplacian + mu^2))".into()));
            let values = rs
                .iter()
                .map(|&r| subordinated_heat_kernel(r, tc.t, &params).map(|v| Complex64::new(v, 0.0)))
                .collect::<Result<Vec<_>>>()?;
            KernelProfile::new(mu, rs, values)?.to_csv(&comments)
        }
        "z-kernel" => {
            check_range("ct", tc.ct_min, tc.ct_max, tc.ct_points)?;
            if tc.r_min < 0.0 {
                return Err(Error::usage("z-kernel tables need r_min >= 0"));
            }
            let cts = linspace(tc.ct_min, tc.ct_max, tc.ct_points);
            let rows = z_tabulate(&cts, &rs, mu)?;
            if rows.is_empty() {
                return Err(Error::usage("every (ct, r) point lies on the light cone"));
            }
            comments.push(("value".into(), "scalar-block kernel p mu^2 Z(ct, r); light-cone points skipped".into()));
            comments.push(("skipped_on_cone".into(), format!("{}", cts.len() * rs.len() - rows.len())));
            let mut s = String::new();
            for (k, v) in &comments {
                writeln!(s, "# {k} = {v}").unwrap();
            }
            s.push_str("ct,r,value_re,value_im,region\n");
            for (ct, r, z, region) in rows {
                writeln!(s, "{ct:.10e},{r:.10e},{:.16e},{:.16e},{}", z.re, z.im, region.label()).unwrap();
            }
            s
        }
        other => {
            return Err(Error::usage(format!(
                "unknown kernel kind '{other}'; expected free, constant-A, constant-B, z-kernel or heat"
            )))
        }
    };
    let path = cfg
        .fields
        .output
        .clone()
        .unwrap_or_else(|| out_dir(cfg).join(format!("tabulate-{kind}.csv")));
    write_atomic(&path, text.as_bytes())?;
    emit(&format!("{}", json!({"tabulate": kind, "path": path.display().to_string(), "rows": text.lines().filter(|l| !l.starts_with('#')).count() - 1})));
    Ok(0)
}

fn grid_json(g: &Grid) -> Value {
    match *g {
        Grid::Radial { n, spacing } => json!({"kind": "radial", "dims": [n], "spacing": spacing}),
        Grid::Periodic3d { dims, spacing } => json!({"kind": "periodic3d", "dims": dims, "spacing": spacing}),
        Grid::Open3d { dims, spacing } => json!({"kind": "open3d", "dims": dims, "spacing": spacing}),
    }
}

fn check_grid(cfg: &RunConfig, g: &Grid) -> Result<()> {
    let Some(want) = &cfg.grid else { return Ok(()) };
    let have: Vec<usize> = match *g {
        Grid::Radial { n, .. } => vec![n],
        Grid::Periodic3d { dims, .. } | Grid::Open3d { dims, .. } => dims.to_vec(),
    };
    let matches = match want.as_slice() {
        [n] => have.iter().all(|h| h == n),
        w => w == have.as_slice(),
    };
    if !matches {
        return Err(Error::usage(format!("field grid {have:?} does not match --grid {want:?}")));
    }
    Ok(())
}

fn cmd_apply(cfg: &RunConfig) -> Result<i32> {
    let ac = &cfg.apply;
    let op = ac.operator.clone().ok_or_else(|| {
        Error::usage("apply needs an operator: sqrt-free, sqrt-A, sqrt-B, evolve-spectral or propagate-U")
    })?;
    let input = cfg
        .fields
        .input
        .clone()
        .ok_or_else(|| Error::usage("apply needs an input field file"))?;
    let params = cfg.params.physical()?;
    let psi = Field::from_text(&read_text(&input)?)?;
    check_grid(cfg, &psi.grid)?;
    let rel = |a: &Field, b: &Field| a.rel_l2_error(b);
    let mut extra = serde_json::Map::new();
    let (out, oracle, oracle_difference, error_estimate): (Field, Option<&str>, Option<f64>, Option<f64>) = match op.as_str() {
        "sqrt-free" => {
            let out = apply_free(&psi, &params)?;
            let oracle = match psi.grid {
                Grid::Periodic3d { .. } => Some(("spectral-multiplier", apply_spectral(&psi, &params, None)?)),
                Grid::Radial { .. } => radial_apply_spectral(&psi, &params).ok().map(|r| ("radial-sine-transform", r.field)),
                Grid::Open3d { .. } => None,
            };
            let d = oracle.as_ref().map(|(_, f)| rel(&out, f)).transpose()?;
            (out, oracle.map(|o| o.0), d, d)
        }
        "sqrt-A" => {
            let out = apply_constant_a(&psi, ac.a, &params)?;
            let d = match psi.grid {
                Grid::Periodic3d { .. } => Some(rel(&out, &apply_spectral(&psi, &params, Some(ac.a))?)?),
                _ => None,
            };
            (out, d.map(|_| "gauge-shifted-spectral-multiplier"), d, d)
        }
        "sqrt-B" => {
            let model = match ac.mass_model.as_str() {
                "scalar" => MassModel::Scalar,
                "verbatim" => MassModel::Matrix(MassConstruction::VerbatimBlock),
                "hermitian" => MassModel::Matrix(MassConstruction::HermitianSigmaB),
                m => return Err(Error::usage(format!("unknown mass model '{m}' (scalar, verbatim, hermitian)"))),
            };
            let (out, br) = apply_constant_b(&psi, ac.b, &params, model)?;
            extra.insert("mass_model".into(), json!(ac.mass_model));
            extra.insert(
                "term_magnitudes".into(),
                json!({"free": br.magnitudes[0], "a_squared": br.magnitudes[1], "odd": br.magnitudes[2]}),
            );
            (out, None, None, None)
        }
        "evolve-spectral" => {
            let out = evolve_spectral(&psi, ac.t, &params)?;
            let defect = (out.norm_l2() / psi.norm_l2() - 1.0).abs();
            extra.insert("norm_defect".into(), json!(defect));
            (out, None, None, Some(defect))
        }
        "propagate-U" => {
            let p = apply_u(&psi, ac.t, ac.a, &params, &PropagatorOptions::default())?;
            extra.insert("extrapolation_residual".into(), json!(p.extrapolation_residual));
            extra.insert("quadrature_error".into(), json!(p.quadrature_error));
            let d = if ac.a == [0.0; 3] {
                Some(rel(&p.field, &evolve_spectral(&psi, ac.t, &params)?)?)
            } else {
                None
            };
            let est = p.extrapolation_residual.max(p.quadrature_error);
            (p.field, d.map(|_| "evolve-spectral"), d, Some(est))
        }
        other => {
            return Err(Error::usage(format!(
                "unknown operator '{other}'; expected sqrt-free, sqrt-A, sqrt-B, evolve-spectral or propagate-U"
            )))
        }
    };
    let path = cfg
        .fields
        .output
        .clone()
        .unwrap_or_else(|| out_dir(cfg).join(format!("{op}.field")));
    let meta_path = PathBuf::from(format!("{}.meta.jsonl", path.display()));
    let mut result = json!({
        "record": "result",
        "operator": op,
        "t": ac.t,
        "a": ac.a,
        "b": ac.b,
        "error_estimate": error_estimate,
        "oracle": oracle,
        "oracle_difference": oracle_difference,
    });
    result.as_object_mut().unwrap().extend(extra);
    let lines = [
        json!({"record": "input", "path": input.display().to_string(), "grid": grid_json(&psi.grid), "components": psi.components}),
        json!({"record": "params", "params": params_json(&params)}),
        result.clone(),
    ];
    let meta: String = lines.iter().map(|l| format!("{l}\n")).collect();
    write_atomic(&path, out.to_text().as_bytes())?;
    write_atomic(&meta_path, meta.as_bytes())?;
    emit(&result.to_string());
    Ok(0)
}

fn cmd_info(cfg: &RunConfig) -> Result<i32> {
    let params = cfg.params.physical()?;
    let tol = Tolerances::from_map(&cfg.tolerances)?;
    let tolerances: serde_json::Map<String, Value> =
        DEFAULT_TOLERANCES.iter().map(|(k, _)| (k.to_string(), json!(tol.get(k)))).collect();
    let info = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "suites": SUITES,
        "params": params_json(&params),
        "rest_energy": params.rest_energy(),
        "tolerances": tolerances,
        "constants": {"levy_normalization": LEVY_NORMALIZATION, "zeta_inv_r2": ZETA_INV_R2},
        "field_format": "SQRTFIELD 1",
        "exit_codes": {"ok": 0, "check_failure": 1, "usage": 2, "io": 3, "malformed": 4},
    });
    emit(&serde_json::to_string_pretty(&info).map_err(|e| Error::Io(e.to_string()))?);
    Ok(0)
}
