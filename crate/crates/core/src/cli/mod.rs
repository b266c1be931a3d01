//! Command-line front end: argument parsing, validation, dispatch and exit
//! statuses.
//!
//! Every command reads its input from `--input` (a path, `-` for stdin, or
//! inline JSON) and writes one document to stdout. Documents are JSON by
//! default with keys in sorted order, so a fixed configuration always emits
//! the same bytes. `--verify` reads such a document back and re-checks it.
//!
//! Exit statuses: 0 success, 2 invalid input (or a failed `--verify`),
//! 3 precision cap exhausted, 4 internal invariant violation.

mod commands;
mod input;
mod render;

use clap::{Parser, Subcommand, ValueEnum};

use crate::building::SampleModel;
use crate::error::{Error, Result};
use crate::padic::{is_prime, MAX_PRECISION};

pub use input::{read_document, Rational, RationalMatrix};

pub const MIN_CLI_PRECISION: u32 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Sup-norm preserving diagonalisation `U^T B U = D` of a Gram matrix.
    Diagonalize,
    /// Cartan factorisation `g = k1 diag(p^a) k2`.
    Cartan,
    /// KAH witness for `g` against `O(q0)`; input `g` or `{g, q0}`.
    Kah,
    /// Invariants of one form, or equivalence and an isometry for `{q1, q2}`.
    Classify,
    /// Lattice-class geometry for `{x, y?}` given by bases.
    Distance,
    /// Seeded quasi-density experiment.
    Experiment,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Diagonalize => "diagonalize",
            Command::Cartan => "cartan",
            Command::Kah => "kah",
            Command::Classify => "classify",
            Command::Distance => "distance",
            Command::Experiment => "experiment",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        [
            Command::Diagonalize,
            Command::Cartan,
            Command::Kah,
            Command::Classify,
            Command::Distance,
            Command::Experiment,
        ]
        .into_iter()
        .find(|c| c.name() == name)
        .ok_or_else(|| Error::InvalidInput(format!("unknown command {name:?}")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Pretty,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Cartan,
    Entrywise,
    UnitDiagonal,
    IntegralUnit,
    Diagonal,
}

impl From<ModelArg> for SampleModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Cartan => SampleModel::Cartan,
            ModelArg::Entrywise => SampleModel::Entrywise,
            ModelArg::UnitDiagonal => SampleModel::UnitDiagonal,
            ModelArg::IntegralUnit => SampleModel::IntegralUnit,
            ModelArg::Diagonal => SampleModel::Diagonal,
        }
    }
}

#[derive(Clone, Debug, Parser)]
#[command(name = "padic-polar", version, about = "Cartan and KAH decompositions over Q_p, p odd")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,
    /// Odd prime p.
    #[arg(long, global = true)]
    pub p: Option<u64>,
    /// Rank; taken from the input when omitted (required for `experiment`).
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Requested p-adic precision in digits, 8..=1024.
    #[arg(long, global = true, default_value_t = 64)]
    pub precision: u32,
    /// RNG seed (required for `experiment`).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Valuations (Cartan exponents for the default model) are drawn from [-V, V].
    #[arg(long = "val-bound", global = true, default_value_t = 3)]
    pub val_bound: i64,
    #[arg(long, global = true, default_value_t = 500)]
    pub samples: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads for `experiment`; output does not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Re-check a previously emitted document instead of computing one.
    #[arg(long, global = true)]
    pub verify: bool,
    /// Path, `-` for stdin, or inline JSON.
    #[arg(long, global = true)]
    pub input: Option<String>,
    /// Sampling model for `experiment`.
    #[arg(long, global = true, value_enum)]
    pub model: Option<ModelArg>,
    /// Force the exact nearest-apartment search on or off.
    #[arg(long, global = true)]
    pub exact: Option<bool>,
    /// `cartan`: order exponents descending.
    #[arg(long, global = true)]
    pub descending: bool,
}

/// A validated command line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub p: Option<u64>,
    pub n: Option<usize>,
    pub precision: u32,
    pub seed: Option<u64>,
    pub val_bound: i64,
    pub samples: usize,
    pub format: Format,
    pub jobs: usize,
    pub verify: bool,
    pub input: Option<String>,
    pub model: SampleModel,
    pub exact: Option<bool>,
    pub descending: bool,
}

impl TryFrom<Cli> for RunConfig {
    type Error = Error;

    fn try_from(cli: Cli) -> Result<Self> {
        let bad = |msg: &str| Err(Error::InvalidInput(msg.into()));
        if let Some(p) = cli.p {
            if p == 2 || !is_prime(p) {
                return Err(Error::InvalidPrime(p));
            }
        }
        if !(MIN_CLI_PRECISION..=MAX_PRECISION).contains(&cli.precision) {
            return Err(Error::InvalidPrecision(cli.precision));
        }
        if cli.jobs == 0 {
            return bad("--jobs must be at least 1");
        }
        if cli.n == Some(0) {
            return bad("--n must be at least 1");
        }
        if !cli.verify {
            let Some(command) = cli.command else {
                return bad("a command is required unless --verify is given");
            };
            if cli.p.is_none() {
                return bad("--p is required");
            }
            if command == Command::Experiment {
                if cli.seed.is_none() {
                    return bad("experiment needs --seed");
                }
                if cli.n.is_none() {
                    return bad("experiment needs --n");
                }
                if cli.samples == 0 {
                    return bad("--samples must be at least 1");
                }
                if !(0..=64).contains(&cli.val_bound) {
                    return bad("--val-bound must lie in 0..=64");
                }
            } else if cli.format == Format::Csv {
                return bad("csv output is only available for experiment");
            }
        }
        Ok(RunConfig {
            command: cli.command,
            p: cli.p,
            n: cli.n,
            precision: cli.precision,
            seed: cli.seed,
            val_bound: cli.val_bound,
            samples: cli.samples,
            format: cli.format,
            jobs: cli.jobs,
            verify: cli.verify,
            input: cli.input,
            model: cli.model.map(SampleModel::from).unwrap_or_default(),
            exact: cli.exact,
            descending: cli.descending,
        })
    }
}

/// What the binary prints and how it exits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            status: 0,
            stdout,
            stderr: String::new(),
        }
    }

    fn failed(e: &Error) -> Self {
        Outcome {
            status: exit_status(e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        }
    }
}

pub fn exit_status(e: &Error) -> i32 {
    match e {
        Error::PrecisionCapExhausted(_) | Error::InsufficientPrecision | Error::SingularToPrecision => 3,
        Error::InternalInvariantViolation(_) => 4,
        _ => 2,
    }
}

pub fn run(config: &RunConfig) -> Outcome {
    let result = if config.verify {
        commands::verify(config)
    } else {
        commands::execute(config)
    };
    match result {
        Ok(emitted) => {
            let mut out = emitted.render(config.format);
            if !out.ends_with('\n') {
                out.push('\n');
            }
            Outcome {
                status: emitted.status,
                ..Outcome::ok(out)
            }
        }
        Err(e) => Outcome::failed(&e),
    }
}

/// Parses `args` (including the program name) and runs.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let status = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return Outcome {
                status,
                stdout: if status == 0 { text.clone() } else { String::new() },
                stderr: if status == 0 { String::new() } else { text },
            };
        }
    };
    match RunConfig::try_from(cli) {
        Ok(config) => run(&config),
        Err(e) => Outcome::failed(&e),
    }
}
