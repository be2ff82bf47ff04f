mod args;
mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use num_complex::Complex64 as C64;
use serde_json::{json, Value};
use xxz_ness::dense::{default_max_iter, MAX_DENSE_SITES};
use xxz_ness::helix::{resonance_pinned_grid, RowStatus};
use xxz_ness::linalg::sigma_plus;
use xxz_ness::verify::{oracle_agreement, run_suite, Check, DEFAULT_WINDOW, ORACLE_THRESHOLD};
use xxz_ness::{
    assemble_density, contract_expectation, indicators, scan_anisotropy, CircuitParams, Drive, NessError, Parity,
    Regime,
};

use args::{Cli, Command, Format, OutputArgs};

/// Environment variable capping scan threads; 0 or unset means automatic.
pub const THREADS_ENV: &str = "NESS_MPA_THREADS";

/// Largest chain for which `--matrix` prints the full density matrix.
const MATRIX_SITES: usize = 7;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("{0}")]
    Failed(String),
    #[error("verification failed")]
    Verification,
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl From<NessError> for CliError {
    fn from(e: NessError) -> Self {
        match e {
            NessError::NonUnitaryRegime { .. }
            | NessError::AmbiguousRegime
            | NessError::RegimeMismatch { .. }
            | NessError::DegenerateDenominator { .. }
            | NessError::ZeroStereoCoord
            | NessError::InvalidParams(_)
            | NessError::IndexOutOfRange { .. }
            | NessError::MemoryGuard { .. }
            | NessError::WrongDrive { .. } => CliError::Invalid(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            _ => 1,
        }
    }
}

fn complex(x: C64) -> Value {
    json!({ "re": x.re, "im": x.im })
}

fn params_json(p: &CircuitParams) -> Value {
    let drive = match p.drive() {
        Drive::TwoReset { z, w } => json!({ "kind": "reset", "z": complex(z), "w": complex(w) }),
        Drive::Hybrid { z, alpha, beta, gamma } => {
            json!({ "kind": "hybrid", "z": complex(z), "alpha": alpha, "beta": beta, "gamma": gamma })
        }
    };
    let regime = match p.regime() {
        Regime::EasyPlane => "epr",
        Regime::EasyAxis => "ear",
    };
    json!({
        "n": p.n_sites(),
        "regime": regime,
        "q": complex(p.q()),
        "lambda": complex(p.lambda()),
        "drive": drive,
    })
}

/// Site-one expectation and helix indicators; indicators only in the easy plane.
fn site_one(p: &CircuitParams) -> Result<(C64, Option<(f64, f64)>), CliError> {
    let s = contract_expectation(p, &sigma_plus(), 1, Parity::Cycle)?;
    let f = match p.regime() {
        Regime::EasyPlane => indicators(s, p.z(), p.eta()).ok(),
        Regime::EasyAxis => None,
    };
    Ok((s, f))
}

fn results_json(p: &CircuitParams, with_matrix: bool) -> Result<Value, CliError> {
    let (s, f) = site_one(p)?;
    let mut results = json!({
        "trace": Value::Null,
        "purity": Value::Null,
        "min_eig": Value::Null,
        "sigma_plus_site1": complex(s),
        "f1": f.map(|x| x.0),
        "f2": f.map(|x| x.1),
    });
    if p.n_sites() <= MAX_DENSE_SITES {
        let rho = assemble_density(p, Parity::Cycle)?;
        results["trace"] = json!(rho.trace().re);
        results["purity"] = json!(rho.purity());
        results["min_eig"] = json!(rho.min_eigenvalue());
        if with_matrix {
            let m = rho.entries();
            let rows: Vec<Value> = m
                .row_iter()
                .map(|r| Value::Array(r.iter().map(|&x| complex(x)).collect()))
                .collect();
            results["matrix"] = Value::Array(rows);
        }
    }
    Ok(results)
}

fn check_json(c: &Check) -> Value {
    json!({
        "name": c.report.name,
        "residual": c.report.residual,
        "threshold": c.threshold,
        "passed": c.passed(),
    })
}

fn verdict_line(c: &Check) -> String {
    let tag = if c.passed() { "PASS" } else { "FAIL" };
    format!(
        "{tag} {} residual={:.3e} threshold={:.0e}",
        c.report.name, c.report.residual, c.threshold
    )
}

/// `quantity,value` lines for the summary when CSV is requested.
fn summary_csv(v: &Value) -> String {
    fn flatten(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(map) => {
                for (k, x) in map {
                    let key = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    flatten(&key, x, out);
                }
            }
            Value::Array(items) => {
                for (i, x) in items.iter().enumerate() {
                    flatten(&format!("{prefix}.{i}"), x, out);
                }
            }
            Value::Number(n) => match n.as_f64() {
                Some(x) if !n.is_i64() && !n.is_u64() => out.push_str(&format!("{prefix},{x:.16e}\n")),
                _ => out.push_str(&format!("{prefix},{n}\n")),
            },
            Value::Null => out.push_str(&format!("{prefix},\n")),
            Value::String(s) => out.push_str(&format!("{prefix},{s}\n")),
            Value::Bool(b) => out.push_str(&format!("{prefix},{b}\n")),
        }
    }
    let mut out = String::from("quantity,value\n");
    flatten("", v, &mut out);
    out
}

fn emit(out: &OutputArgs, default: Format, summary: &Value, csv: impl FnOnce() -> String) -> Result<(), CliError> {
    let text = match out.format.unwrap_or(default) {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(summary).expect("summary serializes");
            s.push('\n');
            s
        }
        Format::Csv => csv(),
    };
    write_text(out.output.as_deref(), &text)
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            })
        }
    }
}

fn scan_threads() -> Result<usize, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Invalid(format!("{THREADS_ENV} must be a non-negative integer, got {v:?}"))),
        Err(_) => Ok(0),
    }
}

fn sidecar_path(csv: &Path) -> PathBuf {
    let mut name = csv.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Ness { circuit, matrix, out } => {
            let p = config::circuit_params(&circuit)?;
            if matrix && p.n_sites() > MATRIX_SITES {
                return Err(CliError::Invalid(format!("--matrix needs N <= {MATRIX_SITES}")));
            }
            let summary = json!({
                "params": params_json(&p),
                "results": results_json(&p, matrix)?,
                "residuals": [],
            });
            emit(&out, Format::Json, &summary, || summary_csv(&summary))
        }
        Command::Verify { circuit, out } => {
            let p = config::circuit_params(&circuit)?;
            let checks = run_suite(&p, DEFAULT_WINDOW)?;
            let summary = json!({
                "params": params_json(&p),
                "results": results_json(&p, false)?,
                "residuals": checks.iter().map(check_json).collect::<Vec<_>>(),
            });
            emit(&out, Format::Json, &summary, || summary_csv(&summary))?;
            for c in &checks {
                eprintln!("{}", verdict_line(c));
            }
            if checks.iter().all(Check::passed) {
                Ok(())
            } else {
                Err(CliError::Verification)
            }
        }
        Command::Oracle {
            circuit,
            tol,
            max_iter,
            out,
        } => {
            let p = config::circuit_params(&circuit)?;
            if p.n_sites() > MAX_DENSE_SITES {
                return Err(CliError::Invalid(format!("oracle needs N <= {MAX_DENSE_SITES}")));
            }
            if tol.is_nan() || tol <= 0.0 {
                return Err(CliError::Invalid("--tol must be positive".into()));
            }
            let max_iter = max_iter.unwrap_or_else(|| default_max_iter(p.n_sites()));
            let report = oracle_agreement(&p, tol, max_iter)?;
            let check = Check {
                report,
                threshold: ORACLE_THRESHOLD,
            };
            let summary = json!({
                "params": params_json(&p),
                "results": results_json(&p, false)?,
                "residuals": [check_json(&check)],
            });
            emit(&out, Format::Json, &summary, || summary_csv(&summary))?;
            eprintln!("{}", verdict_line(&check));
            if check.passed() {
                Ok(())
            } else {
                Err(CliError::Verification)
            }
        }
        Command::Scan { circuit, grid, out } => {
            if circuit.eta.is_some() || circuit.q.is_some() {
                return Err(CliError::Invalid("scan sweeps the anisotropy; drop --q/--eta".into()));
            }
            if grid < 3 {
                return Err(CliError::Invalid("--grid needs at least 3 points".into()));
            }
            let base = config::circuit_params(&circuit)?;
            if base.regime() != Regime::EasyPlane {
                return Err(CliError::Invalid("scan requires --regime epr".into()));
            }
            let threads = scan_threads()?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| CliError::Failed(e.to_string()))?;
            let points = resonance_pinned_grid(grid, base.n_sites());
            let table = pool.install(|| scan_anisotropy(&base, &points))?;
            let excluded = table.rows.iter().filter(|r| !r.is_ok()).count();
            let mut swept = params_json(&base);
            swept["q"] = json!("exp(i pi eta_over_pi)");
            let meta = json!({
                "params": swept,
                "grid": { "points": grid, "lower": 0.0, "upper": 1.0, "pinned_to_resonances": true },
                "excluded_rows": excluded,
                "columns": xxz_ness::helix::CSV_HEADER.split(',').collect::<Vec<_>>(),
                "version": env!("CARGO_PKG_VERSION"),
            });
            let rows_json = || {
                let rows: Vec<Value> = table
                    .rows
                    .iter()
                    .map(|r| {
                        json!({
                            "eta_over_pi": r.eta_over_pi(),
                            "f1": r.f1,
                            "f2": r.f2,
                            "sigma_plus": complex(r.sigma_plus),
                            "status": match &r.status {
                                RowStatus::Ok => "ok".to_string(),
                                RowStatus::Excluded(why) => format!("excluded:{why}"),
                            },
                        })
                    })
                    .collect();
                json!({ "meta": meta, "rows": rows })
            };
            match out.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    write_text(out.output.as_deref(), &table.to_csv())?;
                    if let Some(path) = &out.output {
                        let mut text = serde_json::to_string_pretty(&meta).expect("metadata serializes");
                        text.push('\n');
                        write_text(Some(&sidecar_path(path)), &text)?;
                    }
                    Ok(())
                }
                Format::Json => {
                    let mut text = serde_json::to_string_pretty(&rows_json()).expect("rows serialize");
                    text.push('\n');
                    write_text(out.output.as_deref(), &text)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::Verification) {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
