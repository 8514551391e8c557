//! Command-line front end: matrices, determinants, characteristic
//! polynomials, multiplicity scans, eigenvalues, and the verification
//! suites, all as plain text or CSV on stdout.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 usage or I/O,
//! 3 a resource guard refused the request, 4 numeric failure.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Deserialize;

use rstar_core::arith::{k_values, OmegaHistogram, OmegaTable};
use rstar_core::charpoly::{
    charpoly_shifted, expand_to_monomial, multiplicity_record, reduced_poly, render_monomial,
};
use rstar_core::matrix::{charpoly_oracle, DenseIntMatrix, SparseUnitaryMatrix};
use rstar_core::spectral::{
    asymptotic_lambda, compute_constants, dominant_power_iteration, lambda_error_scaled,
    nontrivial_eigenvalues,
};
use rstar_core::verify::{run_all, Tamper};
use rstar_core::{Error, RunConfig};

#[derive(Parser)]
#[command(name = "rstar", version, about = "Unitary-divisor Redheffer matrices: exact determinants, characteristic polynomials, and dominant eigenvalues")]
struct Cli {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Render polynomial variables as ASCII letters instead of Greek.
    #[arg(long, global = true)]
    ascii: bool,

    /// Worker threads for the data-parallel paths (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Segment length for the segmented sieve.
    #[arg(long, global = true, value_name = "LEN")]
    segment_size: Option<u64>,

    /// Write command output to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render the full matrix or one of its two sparse factors.
    Matrix {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, value_enum, default_value = "dense")]
        format: Format,
    },
    /// Determinant of the full matrix: a unitary Mertens value.
    Det {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, value_enum, default_value = "sieve")]
        method: DetMethod,
    },
    /// Characteristic polynomial, sparse in the shifted basis.
    Charpoly {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, value_enum, default_value = "shifted")]
        basis: Basis,
        /// Recompute by determinant interpolation and compare; exits 1 on
        /// mismatch.
        #[arg(long)]
        check_oracle: bool,
    },
    /// Eigenvalue-1 multiplicity with its proved bounds, one CSV row per n.
    ScanMult {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        from: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        to: u64,
    },
    /// The non-trivial eigenvalues, by polynomial roots or power iteration.
    Eigs {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        n: u64,
        #[arg(long, value_enum, default_value = "roots")]
        method: EigMethod,
        /// Add asymptotic main terms and scaled errors (roots method only).
        #[arg(long)]
        compare: bool,
    },
    /// Run every cross-check suite up to a size cap.
    Verify {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_n: u64,
        #[arg(long, hide = true)]
        tamper_sstar: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Rstar,
    S,
    T,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dense,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum DetMethod {
    Sieve,
    Bareiss,
}

#[derive(Clone, Copy, ValueEnum)]
enum Basis {
    Shifted,
    Monomial,
}

#[derive(Clone, Copy, ValueEnum)]
enum EigMethod {
    Roots,
    Power,
}

/// Optional configuration file; every key may be omitted. Unknown keys are
/// rejected so typos fail loudly.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    threads: Option<usize>,
    segment_size: Option<u64>,
    output: Option<PathBuf>,
    tolerances: Option<FileTolerances>,
    guards: Option<FileGuards>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileTolerances {
    root_tol: Option<f64>,
    power_tol: Option<f64>,
    power_max_iter: Option<u32>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileGuards {
    dense_max: Option<u64>,
    oracle_max: Option<u64>,
}

enum AppError {
    Core(Error),
    Io(io::Error),
    Usage(String),
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Core(e) => write!(f, "{e}"),
            AppError::Io(e) => write!(f, "{e}"),
            AppError::Usage(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for AppError {
    fn from(e: Error) -> Self {
        AppError::Core(e)
    }
}

impl From<io::Error> for AppError {
    fn from(e: io::Error) -> Self {
        AppError::Io(e)
    }
}

impl AppError {
    fn exit_code(&self) -> u8 {
        match self {
            AppError::Core(Error::Contract(_)) => 2,
            AppError::Core(Error::Guard { .. }) | AppError::Core(Error::Capacity { .. }) => 3,
            AppError::Core(Error::Numeric { .. }) => 4,
            AppError::Io(_) | AppError::Usage(_) => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, AppError> {
    let cfg = assemble_config(&cli)?;
    if cfg.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build_global()
            .map_err(|e| AppError::Usage(format!("thread pool: {e}")))?;
    }
    let (mu, lambda) = if cli.ascii { ("u", "l") } else { ("\u{3bc}", "\u{3bb}") };

    match cli.command {
        Command::Matrix { n, kind, format } => {
            let m = build_kind(n, kind)?;
            let text = match format {
                Format::Dense => m.to_dense_string(&cfg.guards)?,
                Format::Csv => m.to_csv(),
            };
            emit(&cfg, &text)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Det { n, method } => {
            let value = match method {
                DetMethod::Sieve => {
                    BigInt::from(OmegaHistogram::build(n, cfg.segment_size)?.mertens_star())
                }
                DetMethod::Bareiss => {
                    DenseIntMatrix::from_sparse(&SparseUnitaryMatrix::build_rstar(n)?, &cfg.guards)?
                        .bareiss_det()
                }
            };
            emit(&cfg, &format!("{value}\n"))?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Charpoly {
            n,
            basis,
            check_oracle,
        } => {
            let p = charpoly_shifted(&OmegaHistogram::build(n, cfg.segment_size)?)?;
            let text = match basis {
                Basis::Shifted => format!("{}\n", p.render(mu)),
                Basis::Monomial => format!(
                    "{}\n",
                    render_monomial(&expand_to_monomial(&p, &cfg.guards)?, lambda)
                ),
            };
            emit(&cfg, &text)?;
            if check_oracle {
                let ours = expand_to_monomial(&p, &cfg.guards)?;
                let oracle = charpoly_oracle(n, &cfg.guards)?;
                if ours != oracle {
                    eprintln!("oracle check: MISMATCH at n = {n}");
                    return Ok(ExitCode::from(1));
                }
                eprintln!("oracle check: ok ({} coefficients)", oracle.len());
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::ScanMult { from, to } => {
            if from > to {
                return Err(AppError::Usage(format!(
                    "--from {from} exceeds --to {to}"
                )));
            }
            let table = OmegaTable::build(to)?;
            let ks = k_values(&table);
            let rows: Vec<(String, bool)> = (from..=to)
                .into_par_iter()
                .map(|n| {
                    let r = multiplicity_record(n, ks[n as usize]);
                    let lower = r.lower.map(|v| v.to_string()).unwrap_or_default();
                    let upper = r.upper.map(|v| v.to_string()).unwrap_or_default();
                    let gap = r.ostar_gap.map(|g| format!("{g:.6e}")).unwrap_or_default();
                    let bad = r.lower.is_some_and(|b| b > r.m_n as i64)
                        || r.upper.is_some_and(|b| (r.m_n as i64) > b)
                        || r.ostar_gap.is_some_and(|g| !(g >= 0.0));
                    (
                        format!("{n},{},{},{lower},{upper},{gap}\n", r.k_n, r.m_n),
                        bad,
                    )
                })
                .collect();
            let mut text = String::from("n,k_n,m_n,lower,upper,ostar_gap\n");
            let mut violated = false;
            for (row, bad) in rows {
                text += &row;
                violated |= bad;
            }
            emit(&cfg, &text)?;
            if violated {
                eprintln!("multiplicity bound violated inside the scan range");
                return Ok(ExitCode::from(1));
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Eigs { n, method, compare } => match method {
            EigMethod::Power => {
                if compare {
                    return Err(AppError::Usage(
                        "--compare needs the roots method; power iteration yields only the dominant eigenvalue".into(),
                    ));
                }
                let m = SparseUnitaryMatrix::build_rstar(n)?;
                let lp =
                    dominant_power_iteration(&m, cfg.tolerances.power_tol, cfg.tolerances.power_max_iter)?;
                emit(&cfg, &format!("n,lambda_plus\n{n},{lp:.12e}\n"))?;
                Ok(ExitCode::SUCCESS)
            }
            EigMethod::Roots => {
                let (q, _, _) = reduced_poly(&OmegaHistogram::build(n, cfg.segment_size)?)?;
                let report = nontrivial_eigenvalues(&q, cfg.tolerances.root_tol)?;
                if compare {
                    if n < 3 {
                        return Err(AppError::Usage(
                            "asymptotic comparison needs n >= 3".into(),
                        ));
                    }
                    let c = compute_constants(12)?;
                    let (ap, am) = asymptotic_lambda(n, &c);
                    let (ep, em) =
                        lambda_error_scaled(n, report.lambda_plus, report.lambda_minus, &c);
                    emit(
                        &cfg,
                        &format!(
                            "n,lambda_plus,lambda_minus,asym_plus,asym_minus,err_plus_scaled,err_minus_scaled\n\
                             {n},{:.12e},{:.12e},{ap:.12e},{am:.12e},{ep:.6e},{em:.6e}\n",
                            report.lambda_plus, report.lambda_minus
                        ),
                    )?;
                } else {
                    let mut text = String::from("n,re,im,residual\n");
                    for (z, r) in report.eigenvalues.iter().zip(&report.residuals) {
                        text += &format!("{n},{:.12e},{:.12e},{r:.3e}\n", z.re, z.im);
                    }
                    emit(&cfg, &text)?;
                }
                Ok(ExitCode::SUCCESS)
            }
        },

        Command::Verify {
            max_n,
            tamper_sstar,
        } => {
            let tamper = if tamper_sstar {
                Tamper::SstarPlusOne
            } else {
                Tamper::None
            };
            let results = run_all(max_n, &cfg.tolerances, &cfg.guards, tamper)?;
            let mut text = String::from("suite,cases,failures,status\n");
            let mut failed = false;
            for r in &results {
                let status = if r.passed() { "ok" } else { "FAIL" };
                text += &format!("{},{},{},{status}\n", r.name, r.cases, r.failures);
                if !r.passed() {
                    failed = true;
                    if let Some(d) = &r.first_failure {
                        eprintln!("{}: {d}", r.name);
                    }
                }
            }
            emit(&cfg, &text)?;
            Ok(if failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            })
        }
    }
}

fn build_kind(n: u64, kind: Kind) -> Result<SparseUnitaryMatrix, Error> {
    match kind {
        Kind::Rstar => SparseUnitaryMatrix::build_rstar(n),
        Kind::S => SparseUnitaryMatrix::build_s(n),
        Kind::T => SparseUnitaryMatrix::build_t(n),
    }
}

/// Defaults, overlaid by the config file, the RSTAR_THREADS variable, and
/// finally the flags. Explicit values must satisfy the documented
/// invariants: threads and segment size positive, guards at least 2,
/// tolerances positive.
fn assemble_config(cli: &Cli) -> Result<RunConfig, AppError> {
    let file: FileConfig = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            toml::from_str(&text)
                .map_err(|e| AppError::Usage(format!("{}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };
    let mut cfg = RunConfig::default();

    let env_threads = match std::env::var("RSTAR_THREADS") {
        Ok(s) => Some(s.parse::<usize>().map_err(|_| {
            AppError::Usage(format!("RSTAR_THREADS must be a positive integer, got {s:?}"))
        })?),
        Err(_) => None,
    };
    if let Some(t) = cli.threads.or(env_threads).or(file.threads) {
        if t == 0 {
            return Err(AppError::Usage("threads must be positive".into()));
        }
        cfg.threads = t;
    }

    if let Some(s) = cli.segment_size.or(file.segment_size) {
        if s == 0 {
            return Err(AppError::Usage("segment size must be positive".into()));
        }
        cfg.segment_size = s;
    }

    if let Some(t) = file.tolerances {
        if let Some(v) = t.root_tol {
            cfg.tolerances.root_tol = v;
        }
        if let Some(v) = t.power_tol {
            cfg.tolerances.power_tol = v;
        }
        if let Some(v) = t.power_max_iter {
            cfg.tolerances.power_max_iter = v;
        }
        if !(cfg.tolerances.root_tol > 0.0 && cfg.tolerances.power_tol > 0.0)
            || cfg.tolerances.power_max_iter == 0
        {
            return Err(AppError::Usage("tolerances must be positive".into()));
        }
    }

    if let Some(g) = file.guards {
        if let Some(v) = g.dense_max {
            cfg.guards.dense_max = v;
        }
        if let Some(v) = g.oracle_max {
            cfg.guards.oracle_max = v;
        }
        if cfg.guards.dense_max < 2 || cfg.guards.oracle_max < 2 {
            return Err(AppError::Usage("guards must be at least 2".into()));
        }
    }

    cfg.output = cli.out.clone().or(file.output);
    Ok(cfg)
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), AppError> {
    match &cfg.output {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}
