//! `matorbit`: analyze, solve, verify and sample scalar-coefficient
//! polynomial equations `F(X) = A` over real 2x2 matrices.
//!
//! Reports are JSON on standard output; errors are JSON on standard error.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use matorbit_core::Error;

use crate::config::{CliConfig, OutputFormat, Overrides, CONFIG_ENV};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_INCONSISTENT: i32 = 4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{kind}: {message}")]
pub struct CliError {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn parse(e: Error) -> Self {
        Self { code: EXIT_PARSE, kind: "parse", message: e.to_string() }
    }

    /// Malformed arguments other than the equation: matrices, descriptors.
    pub fn input(e: impl ToString) -> Self {
        Self { code: EXIT_PARSE, kind: "input", message: e.to_string() }
    }

    pub fn config(message: String) -> Self {
        Self { code: EXIT_PARSE, kind: "config", message }
    }

    pub fn solver(e: Error) -> Self {
        match e {
            Error::InconsistentClassification(_) => {
                Self { code: EXIT_INCONSISTENT, kind: "inconsistent", message: e.to_string() }
            }
            _ => Self { code: EXIT_SOLVER, kind: "solver", message: e.to_string() },
        }
    }

    fn to_json(&self) -> Value {
        json!({ "error": { "kind": self.kind, "code": self.code, "message": self.message } })
    }
}

#[derive(Debug, Parser)]
#[command(name = "matorbit", version, about = "Solution sets of polynomial equations over real 2x2 matrices")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Residual bound for accepting F(X) = A
    #[arg(long, global = true)]
    eps_residual: Option<f64>,

    /// Relative zero band for discriminants and eigenvalues
    #[arg(long, global = true)]
    eps_disc: Option<f64>,

    /// Relative radius within which roots and orbit parameters coincide
    #[arg(long, global = true)]
    cluster_radius: Option<f64>,

    /// Relative singular-value cutoff for numerical rank
    #[arg(long, global = true)]
    eps_rank: Option<f64>,

    /// Relative determinant cutoff for invertibility
    #[arg(long, global = true)]
    eps_singular: Option<f64>,

    /// Seed for sampling and the oracle
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Default number of oracle starts
    #[arg(long, global = true)]
    oracle_starts: Option<usize>,

    #[arg(long, global = true, value_enum)]
    output: Option<OutputFormat>,
}

impl GlobalArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            eps_residual: self.eps_residual,
            eps_disc: self.eps_disc,
            cluster_radius: self.cluster_radius,
            eps_rank: self.eps_rank,
            eps_singular: self.eps_singular,
            seed: self.seed,
            oracle_starts: self.oracle_starts,
            output: self.output,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Orbit decomposition of a homogeneous equation "<poly> = O"
    Analyze {
        #[arg(allow_hyphen_values = true)]
        equation: String,
    },
    /// Solve F(X) = A in closed form where the shape allows it
    Solve {
        #[arg(allow_hyphen_values = true)]
        equation: String,
    },
    /// Residual of a candidate matrix and, for scalar right-hand sides, its orbit
    Verify {
        #[arg(allow_hyphen_values = true)]
        equation: String,
        /// Candidate as [[a,b],[c,d]]
        #[arg(long)]
        matrix: String,
    },
    /// Seeded solutions drawn from one orbit of a homogeneous equation
    Sample {
        #[arg(allow_hyphen_values = true)]
        equation: String,
        /// Orbit such as "Split(-1,1)", "Jordan(0)" or "Rotation(0,1)"
        #[arg(long, allow_hyphen_values = true)]
        orbit: String,
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Half-width of the (b, c) box the chart is sampled on
        #[arg(long = "box", default_value_t = 10.0)]
        bound: f64,
    },
    /// Compare the solution sets of two homogeneous equations
    Compare {
        #[arg(allow_hyphen_values = true)]
        first: String,
        #[arg(allow_hyphen_values = true)]
        second: String,
    },
    /// Multistart Newton search, cross-checked against the closed form
    Oracle {
        #[arg(allow_hyphen_values = true)]
        equation: String,
        /// Number of starts (defaults to --oracle-starts)
        #[arg(long)]
        starts: Option<usize>,
    },
}

fn dispatch(command: &Command, cfg: &CliConfig) -> Result<(Value, i32), CliError> {
    let ok = |v: Value| Ok((v, EXIT_OK));
    match command {
        Command::Analyze { equation } => ok(commands::analyze_cmd(equation, cfg)?),
        Command::Solve { equation } => ok(commands::solve_cmd(equation, cfg)?),
        Command::Verify { equation, matrix } => ok(commands::verify_cmd(equation, matrix, cfg)?),
        Command::Sample { equation, orbit, count, bound } => {
            ok(commands::sample_cmd(equation, orbit, *count, *bound, cfg)?)
        }
        Command::Compare { first, second } => ok(commands::compare_cmd(first, second, cfg)?),
        Command::Oracle { equation, starts } => {
            let (v, inconsistent) = commands::oracle_cmd(equation, starts.unwrap_or(cfg.oracle_starts), cfg)?;
            Ok((v, if inconsistent { EXIT_INCONSISTENT } else { EXIT_OK }))
        }
    }
}

/// Plain `key: value` lines, keys in the same order as the JSON.
fn render_text(v: &Value) -> String {
    let mut s = String::new();
    if let Value::Object(m) = v {
        for (k, x) in m {
            match x {
                Value::String(t) => s.push_str(&format!("{k}: {t}\n")),
                Value::Array(items) if items.iter().all(|i| i.is_array() || i.is_object()) && !items.is_empty() => {
                    s.push_str(&format!("{k}:\n"));
                    for i in items {
                        s.push_str(&format!("  {i}\n"));
                    }
                }
                _ => s.push_str(&format!("{k}: {x}\n")),
            }
        }
    }
    s
}

/// Runs the tool with `argv` (program name first), writing the report to
/// `out` and errors to `err`. Returns the exit code.
pub fn run_with<I, T>(argv: I, env_config: Option<PathBuf>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let fail = |err: &mut dyn Write, e: CliError| {
        let _ = writeln!(err, "{}", e.to_json());
        e.code
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            let rendered = e.render().to_string();
            return fail(err, CliError { code: EXIT_USAGE, kind: "usage", message: rendered.trim_end().to_string() });
        }
    };
    let cfg = match config::load(cli.global.overrides(), env_config.as_deref()) {
        Ok(cfg) => cfg,
        Err(e) => return fail(err, e),
    };
    match dispatch(&cli.command, &cfg) {
        Ok((report, code)) => {
            let text = match cfg.output {
                OutputFormat::Json => serde_json::to_string_pretty(&report).expect("reports serialize") + "\n",
                OutputFormat::Text => render_text(&report),
            };
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => fail(err, e),
    }
}

/// [`run_with`] on the process's standard streams, reading the config file
/// named by `MATORBIT_CONFIG`.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let env_config = std::env::var_os(CONFIG_ENV).filter(|p| !p.is_empty()).map(PathBuf::from);
    run_with(argv, env_config, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
