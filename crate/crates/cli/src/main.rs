mod config;
mod drift;
mod report;
mod simulate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::Config;
use endonet::{parse_network, Error, NetworkDocument};

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_INTERNAL: u8 = 70;

#[derive(Parser, Debug)]
#[command(name = "endonet", version, about = "Strong endotacticity, tiers and drift diagnostics for reaction networks")]
struct Cli {
    /// Cap on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Structural report and strong endotacticity verdict.
    Analyze(AnalyzeArgs),
    /// Stochastic or deterministic simulation.
    Simulate(SimulateArgs),
    /// Generator drifts of the Lyapunov function.
    Drift(DriftArgs),
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    file: PathBuf,
    #[arg(long)]
    json: bool,
    /// Include wall-clock timings (makes output run dependent).
    #[arg(long)]
    timings: bool,
    /// Cone enumeration budget.
    #[arg(long)]
    budget: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Ssa,
    Ode,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    pub file: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Ssa)]
    pub method: Method,
    /// Initial state, comma separated.
    #[arg(long)]
    pub x0: String,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub max_events: Option<u64>,
    /// Stop once the total count reaches this value.
    #[arg(long)]
    pub max_norm: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub runs: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory for per-run CSV files and the summary JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Times at which to summarize the state, comma separated; defaults to
    /// a quarter, half and all of `--t-max`.
    #[arg(long)]
    pub checkpoints: Option<String>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub abs_tol: Option<f64>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("mode").required(true).multiple(false))]
pub struct DriftArgs {
    pub file: PathBuf,
    /// Exhaustive scan of the shell N1 <= |x|_1 <= N2.
    #[arg(long, num_args = 2, value_names = ["N1", "N2"], group = "mode")]
    pub scan: Option<Vec<u64>>,
    /// Drift at one integer state.
    #[arg(long, value_name = "X", group = "mode")]
    pub point: Option<String>,
    /// Sign of the scaled drift; V may be `auto`.
    #[arg(long, num_args = 2, value_names = ["V", "X"], group = "mode")]
    pub scaled: Option<Vec<String>>,
    /// The H-sum at x with constants c1, c2.
    #[arg(long, num_args = 4, value_names = ["X", "V", "C1", "C2"], allow_negative_numbers = true, group = "mode")]
    pub hsum: Option<Vec<String>>,
    /// Restrict a scan to the compatibility class of this state.
    #[arg(long)]
    pub anchor: Option<String>,
    /// State budget for scans.
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub json: bool,
}

/// A failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Syntax { .. }
            | Error::NegativeRate(_)
            | Error::RateMismatch(_)
            | Error::SelfLoop(_)
            | Error::EmptyNetwork
            | Error::NegativeCoefficient(_)
            | Error::UnusedSpecies(_)
            | Error::DuplicateSpecies(_)
            | Error::DuplicateReaction(_) => EXIT_INPUT,
            Error::BudgetExceeded(_) | Error::TooManySpecies(_) => EXIT_BUDGET,
            Error::DimensionMismatch { .. }
            | Error::DomainError(_)
            | Error::InvalidArgument(_)
            | Error::CycleInfeasible(_)
            | Error::NegativeState
            | Error::OrthogonalToS
            | Error::ZeroDirection => EXIT_USAGE,
            _ => EXIT_INTERNAL,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

pub fn load(path: &PathBuf) -> Result<NetworkDocument, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_INPUT,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_network(&text).map_err(|e| Failure {
        code: EXIT_INPUT,
        message: format!("{}: {e}", path.display()),
    })
}

pub fn emit<T: serde::Serialize>(json: bool, value: &T, text: impl FnOnce() -> String) {
    if json {
        println!("{}", serde_json::to_string_pretty(value).expect("reports serialize"));
    } else {
        print!("{}", text());
    }
}

fn run(cli: Cli, cfg: Config) -> Result<(), Failure> {
    if let Some(n) = cli.threads.or(cfg.threads) {
        if n == 0 {
            return Err(Failure::usage("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure {
                code: EXIT_INTERNAL,
                message: e.to_string(),
            })?;
    }
    match cli.command {
        Command::Analyze(a) => {
            let doc = load(&a.file)?;
            let rep = report::analyze(
                &a.file.display().to_string(),
                &doc.network,
                a.budget.unwrap_or(cfg.budget),
                a.timings,
            )
            .map_err(|e| match e {
                report::AnalyzeError::Library(e) => Failure::from(e),
                report::AnalyzeError::Inconsistent(m) => Failure {
                    code: EXIT_INTERNAL,
                    message: format!("internal inconsistency: {m}"),
                },
            })?;
            emit(a.json, &rep, || rep.to_text());
            Ok(())
        }
        Command::Simulate(s) => simulate::run(&s, &cfg),
        Command::Drift(d) => drift::run(&d, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let cfg = match Config::load() {
        Ok(c) => c,
        Err(m) => {
            eprintln!("endonet: {m}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match run(cli, cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("endonet: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// Comma-separated list, with an optional `name=` prefix.
pub fn parse_list<T: std::str::FromStr>(text: &str, name: &str) -> Result<Vec<T>, Failure> {
    let body = text.strip_prefix(&format!("{name}=")).unwrap_or(text);
    body.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Failure::usage(format!("invalid {name} value: {text}")))
        })
        .collect()
}

pub fn check_dim<T>(v: &[T], d: usize, name: &str) -> Result<(), Failure> {
    if v.len() != d {
        return Err(Failure::usage(format!("{name} has {} entries, the network has {d} species", v.len())));
    }
    Ok(())
}
