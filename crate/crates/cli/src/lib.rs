//! Command-line interface for `foldcf`.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{error::ErrorKind, ArgGroup, Args, Parser, Subcommand};
use serde::Serialize;

use foldcf::builtins;
use foldcf::dioph::mu_estimate_with;
use foldcf::expand::{expand_series_with, verify_expansion_with};
use foldcf::series::{gen_sequences_with, GenOptions, DEFAULT_DIGIT_BUDGET};
use foldcf::{fold, ContinuedFraction, Error, Int, SeriesSpec, Sign};

#[derive(Parser, Debug)]
#[command(name = "foldcf", version, about = "Continued fractions of strong Engel series by folding")]
struct Cli {
    /// Refuse to build integers with more decimal digits than this.
    #[arg(long, global = true, env = "FOLDCF_DIGIT_BUDGET", default_value_t = DEFAULT_DIGIT_BUDGET)]
    digit_budget: u64,

    /// Pretty-print JSON output.
    #[arg(long, global = true)]
    pretty: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("source").required(true).args(["spec", "example"])))]
struct Source {
    /// Series spec file (JSON).
    #[arg(long)]
    spec: Option<PathBuf>,

    /// Builtin example name, see `examples --list`.
    #[arg(long)]
    example: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the sequences u, v, x, z, rho, alpha, one JSON line per term.
    Gen {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        n: usize,
    },
    /// Print the continued fraction of the n-th partial sum.
    Expand {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        n: usize,
        /// Print the full folding trace as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Check every stage against the Euclidean algorithm; exit 1 on failure.
    Verify {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        n: usize,
    },
    /// Apply one folding map to a continued fraction.
    Fold {
        #[arg(long)]
        cf: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// +1 or -1
        #[arg(long, allow_hyphen_values = true)]
        sign: String,
    },
    /// Predicted and estimated irrationality exponent.
    Mu {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        n: usize,
        /// First index of the ratio window (default: length of stage 3).
        #[arg(long)]
        window: Option<usize>,
    },
    /// List or print the builtin example specs.
    #[command(group(ArgGroup::new("what").required(true).args(["list", "dump"])))]
    Examples {
        #[arg(long)]
        list: bool,
        #[arg(long, value_name = "NAME")]
        dump: Option<String>,
    },
}

enum Failure {
    Usage(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(format!("i/o: {e}"))
    }
}

fn load(source: &Source) -> Result<SeriesSpec, Failure> {
    match (&source.spec, &source.example) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            SeriesSpec::from_json(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
        }
        (None, Some(name)) => Ok(builtins::lookup(name)?),
        (None, None) => Err(Failure::Usage("one of --spec or --example is required".into())),
    }
}

fn emit<T: Serialize>(out: &mut dyn Write, value: &T, pretty: bool) -> Result<(), Failure> {
    let text = if pretty { serde_json::to_string_pretty(value) } else { serde_json::to_string(value) }
        .map_err(|e| Failure::Usage(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

#[derive(Serialize)]
struct ExpandOutput<'a> {
    cf: &'a ContinuedFraction,
    length: usize,
    #[serde(flatten)]
    trace: &'a foldcf::expand::ExpansionTrace,
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), Failure> {
    let opts = GenOptions { digit_budget: cli.digit_budget, ..GenOptions::default() };
    let pretty = cli.pretty;
    match cli.command {
        Command::Gen { source, n } => {
            let spec = load(&source)?;
            for state in gen_sequences_with(&spec, n, &opts)? {
                emit(out, &state, pretty)?;
            }
        }
        Command::Expand { source, n, json } => {
            let spec = load(&source)?;
            let (cf, trace) = expand_series_with(&spec, n, &opts).map_err(|e| match e {
                Error::OracleMismatch { .. } => Failure::Verification,
                e => e.into(),
            })?;
            if json {
                emit(out, &ExpandOutput { cf: &cf, length: cf.len(), trace: &trace }, pretty)?;
            } else {
                writeln!(out, "{cf}")?;
            }
        }
        Command::Verify { source, n } => {
            let spec = load(&source)?;
            let report = verify_expansion_with(&spec, n, &opts);
            emit(out, &report, pretty)?;
            if !report.passed {
                return Err(Failure::Verification);
            }
        }
        Command::Fold { cf, z, sign } => {
            let cf: ContinuedFraction = cf.parse()?;
            let z: Int = foldcf::exact::parse_int(&z)?;
            let sign: Sign = sign.parse()?;
            let (folded, step) = fold(&cf, &z, sign)?;
            writeln!(out, "{folded}")?;
            emit(out, &step, pretty)?;
        }
        Command::Mu { source, n, window } => {
            let spec = load(&source)?;
            emit(out, &mu_estimate_with(&spec, n, window, &opts)?, pretty)?;
        }
        Command::Examples { list, dump } => {
            if list {
                for name in builtins::NAMES {
                    writeln!(out, "{name}")?;
                }
            }
            if let Some(name) = dump {
                emit(out, &builtins::lookup(&name)?.to_json(), pretty)?;
            }
        }
    }
    Ok(())
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    2
                }
            };
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(Failure::Verification) => 1,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}
