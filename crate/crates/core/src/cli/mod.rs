//! The `todd-lab` command line.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 domain or IO error,
//! 3 a verification command found a violation.

mod commands;
mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::numerics::{parse_rational, Mode};

pub use commands::SWEEP_COLUMNS;
pub use output::{write_output, Format, Report, Value, SCHEMA_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "todd-lab",
    version,
    about = "Orbits, invariants and boundedness experiments for z' = (alpha + beta z_n + lambda z_{n-1}) / z_{n-2}",
    after_help = "Exit codes: 0 ok, 1 usage or validation error, 2 domain or IO error, 3 check found a violation."
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Arithmetic mode: exact rationals or binary64 [default: exact, or f64 for classify, sweep and search-unbounded]
    #[arg(long, global = true, value_parser = parse_mode)]
    pub precision: Option<Mode>,
    /// Relative tolerance for float comparisons and period detection
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Base seed for random samples
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    pub format: Format,
    /// Write output to this file instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Largest numerator or denominator, in bits, an exact value may reach
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub bit_limit: u64,
}

/// Map selection: `--alpha --beta --lambda`, or `--c` (Todd) with optional `--a` (two-parameter form).
#[derive(Args, Debug, Clone)]
pub struct MapArgs {
    #[arg(long, value_parser = number, requires_all = ["beta", "lambda"], conflicts_with_all = ["c", "a"])]
    pub alpha: Option<String>,
    #[arg(long, value_parser = number, requires_all = ["alpha", "lambda"])]
    pub beta: Option<String>,
    #[arg(long, value_parser = number, requires_all = ["alpha", "beta"])]
    pub lambda: Option<String>,
    /// Todd parameter c
    #[arg(long, value_parser = number)]
    pub c: Option<String>,
    /// Two-parameter form x' = (c + a x_n + x_{n-1}/a) / x_{n-2}
    #[arg(long, value_parser = number, requires = "c")]
    pub a: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct ClassifyArgs {
    /// Step budget
    #[arg(long, default_value_t = 10_000)]
    pub max_steps: usize,
    /// Escape threshold
    #[arg(long, default_value_t = 1e9)]
    pub escape: f64,
    /// Floor threshold
    #[arg(long, default_value_t = 1e-9)]
    pub floor: f64,
    /// Skip recurrence detection
    #[arg(long)]
    pub no_period_search: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CandidateName {
    Todd,
    Sum,
    Max,
    MaxComposition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantName {
    OneStep,
    KStep,
    MaxOfTwo,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Apply the map n times to a state
    Step {
        #[command(flatten)]
        map: MapArgs,
        /// Initial state x0,x1,x2 (oldest first)
        #[arg(long, value_parser = state_syntax)]
        state: String,
        /// Number of steps
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Iterate an orbit and print every state window
    Orbit {
        #[command(flatten)]
        map: MapArgs,
        /// Initial state x0,x1,x2 (oldest first)
        #[arg(long, value_parser = state_syntax)]
        state: String,
        /// Number of steps
        #[arg(long)]
        steps: usize,
        /// Add Todd's invariant for each window (Todd-form maps only)
        #[arg(long)]
        trace_invariant: bool,
    },
    /// Todd's invariant I(c; x0, x1, x2)
    Invariant {
        /// Parameter c >= 0
        #[arg(long, value_parser = number)]
        c: String,
        /// Initial state x0,x1,x2 (oldest first)
        #[arg(long, value_parser = state_syntax)]
        state: String,
    },
    /// Lyapunov function V = I(s) - I(p,p,p) at a state
    Lyapunov {
        /// Parameter c >= 0
        #[arg(long, value_parser = number)]
        c: String,
        /// Initial state x0,x1,x2 (oldest first)
        #[arg(long, value_parser = state_syntax)]
        state: String,
    },
    /// Positive fixed point u of the two-parameter map
    FixedPoint {
        /// Two-parameter form coefficient a > 0
        #[arg(long, value_parser = number)]
        a: String,
        /// Parameter c >= 0
        #[arg(long, value_parser = number)]
        c: String,
    },
    /// Classify one orbit (equilibrium, periodic, bounded, growing, inconclusive)
    Classify {
        #[command(flatten)]
        map: MapArgs,
        /// Initial state x0,x1,x2 (oldest first)
        #[arg(long, value_parser = state_syntax)]
        state: String,
        #[command(flatten)]
        classify: ClassifyArgs,
    },
    /// Run a parameter sweep described by a TOML file
    Sweep {
        /// Sweep description (TOML)
        #[arg(long)]
        spec: PathBuf,
    },
    /// Random search for escaping orbits when beta != lambda
    SearchUnbounded {
        /// Constant term alpha
        #[arg(long, value_parser = number)]
        alpha: String,
        /// Coefficient beta of z_n
        #[arg(long, value_parser = number)]
        beta: String,
        /// Coefficient lambda of z_{n-1}
        #[arg(long, value_parser = number)]
        lambda: String,
        /// Number of seeded random initial states
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[command(flatten)]
        classify: ClassifyArgs,
        /// Lower end of the log-uniform sampling box
        #[arg(long, default_value_t = 0.01)]
        low: f64,
        /// Upper end of the sampling box
        #[arg(long, default_value_t = 100.0)]
        high: f64,
    },
    /// Test a sub-energy inequality for Todd's map on (1,1,1) plus seeded random samples
    CheckSubEnergy {
        /// Candidate function
        #[arg(long, value_enum)]
        candidate: CandidateName,
        /// Parameter c >= 0
        #[arg(long, value_parser = number)]
        c: String,
        /// Number of samples
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Inequality to test
        #[arg(long, value_enum)]
        variant: VariantName,
        /// Step count for the k-step variant
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Base function for max-composition
        #[arg(long, value_enum, default_value_t = CandidateName::Max)]
        base: CandidateName,
        /// Stride for max-composition
        #[arg(long, default_value_t = 1)]
        stride: usize,
        /// Depth for max-composition
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Lower end of the sampling box
        #[arg(long, default_value_t = 0.01)]
        low: f64,
        /// Upper end of the sampling box
        #[arg(long, default_value_t = 100.0)]
        high: f64,
    },
    /// Refute g(T s) >= rho g(s) at the fixed point of the two-parameter map
    RefuteSuperEnergy {
        /// Two-parameter form coefficient a > 0
        #[arg(long, value_parser = number)]
        a: String,
        /// Parameter c >= 0
        #[arg(long, value_parser = number)]
        c: String,
        /// Growth factor, greater than 1
        #[arg(long, value_parser = number)]
        rho: String,
        /// Candidate function
        #[arg(long, value_enum)]
        candidate: CandidateName,
    },
    /// Check the three Lyapunov conditions on seeded samples from (low, high]^3
    CheckLyapunov {
        /// Parameter c >= 0
        #[arg(long, value_parser = number)]
        c: String,
        /// Number of samples
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Lower end of the sampling box
        #[arg(long, default_value_t = 0.0)]
        low: f64,
        /// Upper end of the sampling box
        #[arg(long, default_value_t = 10.0)]
        high: f64,
    },
    /// Grid scan of the T^2 residual for the two-parameter map (binary64)
    ScanT2 {
        /// Two-parameter form coefficient a > 0
        #[arg(long, value_parser = number)]
        a: String,
        /// Parameter c >= 0
        #[arg(long, value_parser = number)]
        c: String,
        /// Cube [LO, HI]^3, geometrically spaced
        #[arg(long = "box", value_name = "LO,HI", default_value = "0.1,10", value_parser = box_syntax)]
        bounds: (f64, f64),
        /// Grid points per axis
        #[arg(long, default_value_t = 50)]
        resolution: usize,
        /// Largest residual kept as a minimum [default: one relative grid step]
        #[arg(long)]
        scan_tol: Option<f64>,
    },
}

fn parse_mode(s: &str) -> std::result::Result<Mode, String> {
    s.parse::<Mode>().map_err(|e| e.to_string())
}

fn number(s: &str) -> std::result::Result<String, String> {
    parse_rational(s)
        .map(|_| s.to_string())
        .map_err(|e| e.to_string())
}

fn state_syntax(s: &str) -> std::result::Result<String, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err("expected three comma-separated values x0,x1,x2".into());
    }
    for p in parts {
        number(p)?;
    }
    Ok(s.to_string())
}

fn box_syntax(s: &str) -> std::result::Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected LO,HI")?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("LO: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("HI: {e}"))?;
    Ok((lo, hi))
}

/// A failed run: exit code plus a one-line message for standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn domain(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_DOMAIN,
            message: message.into(),
        }
    }

    /// Validation errors map to exit code 1, everything else to 2.
    pub fn from_error(context: &str, e: &Error) -> Self {
        let message = if context.is_empty() {
            e.to_string()
        } else {
            format!("{context}: {e}")
        };
        match e {
            Error::Parse { .. }
            | Error::InvalidSpec(_)
            | Error::InvalidParams(_)
            | Error::NonPositive(_)
            | Error::ModeMismatch => Self::usage(message),
            _ => Self::domain(message),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::from_error("", &e)
    }
}

/// Parses `args` (program name first), runs the command and writes the
/// result to `stdout` or the `--out` file. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = writeln!(stderr, "{}", one_line(&text));
                    EXIT_USAGE
                }
            };
        }
    };
    let outcome = match commands::execute(&cli) {
        Ok(o) => o,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            return f.code;
        }
    };
    for w in &outcome.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }

    let mut buf = Vec::new();
    if let Err(e) = write_output(&outcome.report, cli.global.format, &mut buf) {
        let _ = writeln!(stderr, "error: cannot render output: {e}");
        return EXIT_DOMAIN;
    }
    let written = match &cli.global.out {
        Some(path) => {
            std::fs::write(path, &buf).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => stdout
            .write_all(&buf)
            .map_err(|e| format!("cannot write to standard output: {e}")),
    };
    if let Err(msg) = written {
        let _ = writeln!(stderr, "error: {msg}");
        return EXIT_DOMAIN;
    }
    if let Some(f) = outcome.trailing {
        let _ = writeln!(stderr, "error: {}", f.message);
        return f.code;
    }
    if outcome.check_failed {
        EXIT_CHECK_FAILED
    } else {
        EXIT_OK
    }
}

/// Folds clap's multi-line diagnostics into a single line.
fn one_line(text: &str) -> String {
    let body = text.split("\n\nUsage:").next().unwrap_or(text);
    let body = body
        .split("\n\nFor more information")
        .next()
        .unwrap_or(body);
    body.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}
