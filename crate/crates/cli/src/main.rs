//! `katalan`: expansions, verification sweeps, self-tests and cache management.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use katalan_core::Error;

#[derive(Parser, Debug)]
#[command(
    name = "katalan",
    version,
    about = "Katalan functions and K-k-Schur expansions"
)]
struct Cli {
    /// Directory for the on-disk basis cache. KATALAN_CACHE_DIR takes precedence.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a family member, or expand it in the K-k-Schur basis.
    Expand(ExpandArgs),
    /// One weight-lowering step of a weighted K-k-Schur function.
    Step(StepArgs),
    /// Check both expansion routes and the alternating signs over a range of partitions.
    Verify(VerifyArgs),
    /// Evaluate a Katalan function given as JSON.
    EvalRaw(EvalRawArgs),
    /// Run the seeded property suites.
    Selftest(SelftestArgs),
    /// List the partitions a sweep would visit.
    Enumerate(EnumerateArgs),
    /// Inspect or clear the basis cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum CacheAction {
    /// Print the cache directory and entry counts per k.
    Info,
    /// Delete every cache file.
    Clear,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Route {
    Recursive,
    Linear,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Basis {
    Kkschur,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FamilyArg {
    G,
    Kkschur,
    Closed,
    Weighted,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ClassArg {
    Strict,
    #[value(name = "hatP", alias = "hatp")]
    HatP,
    All,
}

#[derive(Args, Debug)]
struct ExpandArgs {
    #[arg(long)]
    k: i32,
    /// Comma-separated parts, e.g. 5,4,3,3,2,2.
    #[arg(long)]
    lambda: String,
    #[arg(long, value_enum, default_value = "closed")]
    family: FamilyArg,
    /// Weight for the weighted family, in [1, bott + 1].
    #[arg(long)]
    z: Option<usize>,
    /// Expand in this basis; without it the h-expansion is printed.
    #[arg(long, value_enum)]
    basis: Option<Basis>,
    #[arg(long, value_enum, default_value = "linear")]
    route: Route,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Also print the Katalan spec (root ideal, marks, γ).
    #[arg(long)]
    show_spec: bool,
    /// With --show-spec and no --basis, skip evaluating the function.
    #[arg(long)]
    spec_only: bool,
}

#[derive(Args, Debug)]
struct StepArgs {
    #[arg(long)]
    k: i32,
    #[arg(long)]
    lambda: String,
    /// Current weight; the step goes from z + 1 down to z.
    #[arg(long)]
    z: usize,
    /// Check the step as an identity of symmetric functions.
    #[arg(long)]
    validate: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args, Debug, Clone)]
struct Ranges {
    /// Shorthand for --k-min K --k-max K.
    #[arg(long)]
    k: Option<i32>,
    #[arg(long, default_value_t = 1)]
    k_min: i32,
    #[arg(long, default_value_t = 4)]
    k_max: i32,
    /// Shorthand for --l-min L --l-max L.
    #[arg(long)]
    l: Option<usize>,
    #[arg(long, default_value_t = 1)]
    l_min: usize,
    #[arg(long, default_value_t = 4)]
    l_max: usize,
    #[arg(long)]
    max_size: Option<u32>,
    #[arg(long, value_enum, default_value = "hatP")]
    class: ClassArg,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    ranges: Ranges,
    /// Allow partitions outside the proven class; they get the linear route only
    /// and sign violations are reported without failing the run.
    #[arg(long)]
    unsafe_explore: bool,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: u16,
    /// Write one JSON line per partition here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Omit per-partition timings so reports are byte-reproducible.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args, Debug)]
struct EvalRawArgs {
    /// JSON file with {"psi": …, "marks": […], "gamma": […]}; `-` reads stdin.
    #[arg(long)]
    spec: PathBuf,
    /// Evaluate without pruning, with this hard-cap slack.
    #[arg(long)]
    hard_cap: Option<u32>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    /// Random cases for the lk and relk suites.
    #[arg(long, default_value_t = 200)]
    cases: usize,
    /// Suites to run (lk, relk, mirror, prune, threeg); all by default.
    #[arg(long, value_delimiter = ',')]
    suite: Vec<String>,
    /// Run the enumerative suites (mirror, prune) up to --lmax instead of ℓ ≤ 3.
    #[arg(long)]
    exhaustive: bool,
    #[arg(long, default_value_t = 5)]
    lmax: usize,
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    #[command(flatten)]
    ranges: Ranges,
    #[arg(long, value_enum, default_value = "pretty")]
    format: Format,
}

/// An error with its process exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    fn invalid(message: impl Into<String>) -> Self {
        Failure::new(codes::INVALID, message)
    }
}

mod codes {
    pub const FAILED: u8 = 1;
    pub const INVALID: u8 = 2;
    pub const HYPOTHESIS: u8 = 3;
    pub const MISMATCH: u8 = 4;
    pub const COUNTEREXAMPLE: u8 = 5;
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidInput(_) | Error::ZeroInput => codes::INVALID,
            Error::Hypothesis(_) => codes::HYPOTHESIS,
            Error::Mismatch(_)
            | Error::NoSolution(_)
            | Error::NonIntegral(_)
            | Error::NotUnique(_) => codes::MISMATCH,
            Error::Io(_) => codes::FAILED,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(codes::FAILED, e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::invalid(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::new(codes::FAILED, e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn cache_dir(flag: Option<PathBuf>) -> Option<PathBuf> {
    match std::env::var_os("KATALAN_CACHE_DIR") {
        Some(v) if !v.is_empty() => Some(PathBuf::from(v)),
        _ => flag,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let dir = cache_dir(cli.cache_dir);
    let result = match cli.command {
        Command::Expand(a) => commands::expand(a, dir),
        Command::Step(a) => commands::step(a),
        Command::Verify(a) => commands::verify(a, dir),
        Command::EvalRaw(a) => commands::eval_raw(a),
        Command::Selftest(a) => commands::selftest(a),
        Command::Enumerate(a) => commands::enumerate(a),
        Command::Cache { action } => commands::cache(action, dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}
