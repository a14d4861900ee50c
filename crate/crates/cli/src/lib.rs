//! Command-line front end: reads matrices in the plain-text format, runs one
//! analysis, and writes JSON reports or CSV figure data.
//!
//! Exit codes: 0 on success, 1 when a check fails or a search finds a value
//! below `1/√n`, 2 on usage, input or parse errors.

pub mod figure;

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;

use submatrix_core::certify::{
    check_extremal_candidate, check_extremal_matrix, run_all, CertifyConfig,
};
use submatrix_core::csdecomp::{cs_decompose, minors_from_cs, CSFactors};
use submatrix_core::json::to_json;
use submatrix_core::pluecker::{
    eval_system, invariant_residuals, pluecker4x2, to_transformed, PlueckerCoords, SystemReport,
    TransformedVars, DEFAULT_FORM_BOUND,
};
use submatrix_core::stiefel::{best_submatrix, principal_angle, SubmatrixReport};
use submatrix_core::worstcase::{multistart_search, SearchParams};
use submatrix_core::{DenseMatrix, StiefelMatrix};

/// Slack below `1/√n` tolerated before a value counts as a counterexample.
pub const HYPOTHESIS_SLACK: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(
    name = "submatrix",
    version,
    about = "Best-conditioned square submatrices of semi-orthogonal matrices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Subcommand, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Check the built-in 4x2 extremal matrix, or the one given by --input.
    VerifyExtremal,
    /// Run every step of the 4x2 certificate.
    Certify,
    /// Plücker coordinates and transformed variables of a 4x2 matrix.
    Pluecker,
    /// Thin CS decomposition of a 4x2 matrix.
    Cs,
    /// Exhaustive search for the best k x k row submatrix.
    BestSubmatrix,
    /// Multistart worst-case subspace search.
    Search,
    /// Boundary data for the angle-sum surfaces, as CSV.
    FigureEq3,
}

#[derive(Debug, clap::Args, Clone, Default)]
pub struct Options {
    /// Matrix file: "n k" header, then n rows of k numbers.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub k: Option<usize>,
    #[arg(long, global = true)]
    pub restarts: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Grid size used by every certificate check.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    #[arg(long, global = true)]
    pub resolution: Option<usize>,
    /// Bound on the quadratic forms a² ± ab + b².
    #[arg(long, global = true)]
    pub bound: Option<f64>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Input(String),
}

impl Failure {
    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Input(m) => m,
        }
    }
}

impl From<submatrix_core::Error> for Failure {
    fn from(e: submatrix_core::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

/// What a command produced, and whether it counts as success.
struct Outcome {
    body: String,
    ok: bool,
}

fn read_matrix(opts: &Options, command: &str) -> Result<DenseMatrix, Failure> {
    let path = opts
        .input
        .as_ref()
        .ok_or_else(|| Failure::Usage(format!("{command} requires --input")))?;
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    Ok(text.parse::<DenseMatrix>()?)
}

fn read_stiefel(opts: &Options, command: &str) -> Result<StiefelMatrix, Failure> {
    Ok(StiefelMatrix::new(read_matrix(opts, command)?)?)
}

fn require<T: Copy>(value: Option<T>, flag: &str, command: &str) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::Usage(format!("{command} requires {flag}")))
}

fn below_hypothesis(value: f64, n: usize) -> bool {
    value < 1.0 / (n as f64).sqrt() - HYPOTHESIS_SLACK
}

#[derive(Serialize)]
struct PlueckerReport {
    #[serde(flatten)]
    coords: PlueckerCoords,
    relation_residual: f64,
    normalization_residual: f64,
    transformed: TransformedVars,
    system: SystemReport,
}

#[derive(Serialize)]
struct CsReport {
    #[serde(flatten)]
    factors: CSFactors,
    abs_p12: f64,
    abs_p34: f64,
}

#[derive(Serialize)]
struct BestReport {
    #[serde(flatten)]
    report: SubmatrixReport,
    principal_angle: f64,
    hypothesis_bound: f64,
}

fn execute(command: Command, opts: &Options) -> Result<Outcome, Failure> {
    let bound = opts.bound.unwrap_or(DEFAULT_FORM_BOUND);
    if !(bound.is_finite() && bound > 0.0) {
        return Err(Failure::Usage("--bound must be a positive number".into()));
    }
    Ok(match command {
        Command::VerifyExtremal => {
            let result = match &opts.input {
                Some(_) => check_extremal_candidate(&read_matrix(opts, "verify-extremal")?),
                None => check_extremal_matrix(),
            };
            Outcome {
                ok: result.passed,
                body: to_json(&result),
            }
        }
        Command::Certify => {
            let mut config = match opts.grid {
                Some(g) => CertifyConfig::uniform(g),
                None => CertifyConfig::default(),
            };
            config.bound = bound;
            if let Some(seed) = opts.seed {
                config.seed = seed;
            }
            let report = run_all(&config);
            Outcome {
                ok: report.all_passed,
                body: to_json(&report),
            }
        }
        Command::Pluecker => {
            let a = read_stiefel(opts, "pluecker")?;
            let coords = pluecker4x2(&a)?;
            let (relation_residual, normalization_residual) = invariant_residuals(&coords);
            let transformed = to_transformed(&coords);
            let system = eval_system(&transformed, bound, 1e-12);
            Outcome {
                ok: true,
                body: to_json(&PlueckerReport {
                    coords,
                    relation_residual,
                    normalization_residual,
                    transformed,
                    system,
                }),
            }
        }
        Command::Cs => {
            let a = read_stiefel(opts, "cs")?;
            let factors = cs_decompose(&a)?;
            let (abs_p12, abs_p34) = minors_from_cs(&factors);
            Outcome {
                ok: true,
                body: to_json(&CsReport {
                    factors,
                    abs_p12,
                    abs_p34,
                }),
            }
        }
        Command::BestSubmatrix => {
            let a = read_stiefel(opts, "best-submatrix")?;
            let report = best_submatrix(&a)?;
            let angle = principal_angle(&a, &report.row_set)?;
            let n = a.n();
            Outcome {
                ok: !below_hypothesis(report.sigma_min, n),
                body: to_json(&BestReport {
                    report,
                    principal_angle: angle,
                    hypothesis_bound: 1.0 / (n as f64).sqrt(),
                }),
            }
        }
        Command::Search => {
            let n = require(opts.n, "--n", "search")?;
            let k = require(opts.k, "--k", "search")?;
            let defaults = SearchParams::default();
            let params = SearchParams {
                restarts: opts.restarts.unwrap_or(defaults.restarts),
                seed: opts.seed.unwrap_or(defaults.seed),
                ..defaults
            };
            let result = multistart_search(n, k, &params)?;
            Outcome {
                ok: !below_hypothesis(result.best_value, n),
                body: to_json(&result),
            }
        }
        Command::FigureEq3 => {
            let resolution = opts.resolution.unwrap_or(101);
            if resolution < 2 {
                return Err(Failure::Usage("--resolution must be at least 2".into()));
            }
            Outcome {
                ok: true,
                body: figure::to_csv(&figure::figure_eq3_data(resolution)),
            }
        }
    })
}

/// Parses `argv` (including the program name), runs the command, and
/// returns the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let target: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(target, "{}", e.render());
            return e.exit_code();
        }
    };
    let outcome = match execute(cli.command, &cli.opts) {
        Ok(o) => o,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message());
            return 2;
        }
    };
    let written = match &cli.opts.output {
        Some(path) => fs::write(path, &outcome.body)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => stdout
            .write_all(outcome.body.as_bytes())
            .map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        let _ = writeln!(stderr, "error: {msg}");
        return 2;
    }
    if outcome.ok {
        0
    } else {
        1
    }
}

/// [`run`] against the process's standard streams.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(argv, &mut stdout.lock(), &mut stderr.lock())
}
