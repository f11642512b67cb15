mod commands;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ripara::C64;

use input::{parse_complex, OmegaModeArg, SeqSpec};
use output::{Format, Sink};

/// R_I recurrences, para-orthogonal pipelines and the hypergeometric illustration.
///
/// Exit status: 0 when every check passes, 1 on a verification failure, 2 on a usage or
/// configuration error. `RI_TOL` overrides the default tolerance of the selected check.
#[derive(Parser, Debug)]
#[command(name = "ripara", version)]
struct Cli {
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate B_n, omega_n and X_n.
    Gen(SeqArgs),
    /// Run a verifier; exit 1 if it fails.
    Check {
        #[command(subcommand)]
        which: CheckCmd,
    },
    /// Recurrence against closed form for the hypergeometric family.
    Illustrate(IllustrateArgs),
    /// Trench-Zohar inversion and bordered solves.
    Toeplitz {
        #[command(subcommand)]
        which: ToeplitzCmd,
    },
    /// Continued-fraction moments and the tail fraction for omega_1.
    Cfrac {
        #[command(subcommand)]
        which: CfracCmd,
    },
}

#[derive(Subcommand, Debug)]
enum CheckCmd {
    /// Whether X_n is again an R_I sequence.
    RiAgain(SeqArgs),
    /// Para-orthogonality profiles of X_hat and X_tilde.
    Para(SeqArgs),
    /// Biorthogonality of U_hat and U_tilde and the Toeplitz lambdas.
    Biorth(SeqArgs),
    /// Self-inversive criterion on the recurrence data.
    SelfInversive(SeqArgs),
    /// Relation between L, N and M, and orthogonality under M.
    Functional(FunctionalArgs),
}

#[derive(Subcommand, Debug)]
enum ToeplitzCmd {
    Invert(SystemArgs),
    Solve(SystemArgs),
}

#[derive(Subcommand, Debug)]
enum CfracCmd {
    /// Correspondence series alpha, alpha* and the moments o_k.
    Moments {
        #[command(flatten)]
        seq: SeqArgs,
        /// Number of moments on each side (default: n - 2).
        #[arg(long)]
        depth: Option<usize>,
    },
    /// omega_1 from the truncated tail fraction.
    TailOmega1 {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long, default_value_t = 20)]
        levels: usize,
    },
}

/// Recurrence data from a JSON config, optionally overridden on the command line.
#[derive(Args, Debug, Clone)]
pub struct SeqArgs {
    /// Sequence config JSON.
    #[arg(long)]
    config: Option<PathBuf>,
    /// const:re,im | list:re,im;re,im;.. | hyper:lambda,eta
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<SeqSpec>,
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<SeqSpec>,
    #[arg(long, value_enum)]
    omega: Option<OmegaModeArg>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    zeta: Option<C64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    omega0: Option<C64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    omega1: Option<C64>,
    /// Largest degree.
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
}

#[derive(Args, Debug)]
pub struct FunctionalArgs {
    /// Moment table JSON.
    #[arg(long)]
    functional: PathBuf,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    lambda: C64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    zeta: C64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    alpha: C64,
    /// Relation checked for k in -depth..=depth.
    #[arg(long, default_value_t = 10)]
    depth: usize,
    /// Degree bound for the orthogonality check under M (0 skips it).
    #[arg(long, default_value_t = 6)]
    m_order: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum IllustrateTable {
    /// n, R_n coefficients, closed-form residual, root deviation, lambda ratio residual.
    Rn,
    /// n, c_n, d_n, rho_hat_n, rho_tilde_n, root deviation.
    Selfinv,
}

#[derive(Args, Debug)]
pub struct IllustrateArgs {
    #[arg(long, allow_negative_numbers = true)]
    lambda: f64,
    #[arg(long, allow_negative_numbers = true)]
    eta: f64,
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u64).range(1..=30))]
    n: u64,
    #[arg(long, value_enum, default_value = "rn")]
    table: IllustrateTable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RhsArg {
    Hat,
    Tilde,
}

#[derive(Args, Debug)]
pub struct SystemArgs {
    /// Toeplitz system JSON.
    #[arg(long)]
    system: PathBuf,
    /// Right-hand side (overrides the file).
    #[arg(long, value_enum)]
    rhs: Option<RhsArg>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lib(ripara::Error),
}

impl From<ripara::Error> for CliError {
    fn from(e: ripara::Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn code(&self) -> u8 {
        use ripara::Error::*;
        match self {
            CliError::Usage(_) => 2,
            CliError::Lib(
                InvalidInput(_) | InvalidParameters(_) | InvalidParameter(_) | InvalidTau | InvalidSeed(_)
                | InvalidBeta(_) | GuardViolation(_) | OutOfDomain(_) | MomentDepthExceeded { .. },
            ) => 2,
            CliError::Lib(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

/// `RI_TOL` if set, else `default`.
pub fn tolerance(default: f64) -> Result<f64, CliError> {
    match std::env::var("RI_TOL") {
        Err(_) => Ok(default),
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
            _ => Err(CliError::Usage(format!("RI_TOL='{s}' is not a positive number"))),
        },
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let sink = Sink { path: cli.out, format: cli.format };
    match cli.command {
        Command::Gen(a) => commands::gen(&a, &sink),
        Command::Check { which } => match which {
            CheckCmd::RiAgain(a) => commands::check_ri_again(&a, &sink),
            CheckCmd::Para(a) => commands::check_para(&a, &sink),
            CheckCmd::Biorth(a) => commands::check_biorth(&a, &sink),
            CheckCmd::SelfInversive(a) => commands::check_self_inversive(&a, &sink),
            CheckCmd::Functional(a) => commands::check_functional(&a, &sink),
        },
        Command::Illustrate(a) => commands::illustrate(&a, &sink),
        Command::Toeplitz { which } => match which {
            ToeplitzCmd::Invert(a) => commands::toeplitz_invert(&a, &sink),
            ToeplitzCmd::Solve(a) => commands::toeplitz_solve(&a, &sink),
        },
        Command::Cfrac { which } => match which {
            CfracCmd::Moments { seq, depth } => commands::cfrac_moments(&seq, depth, &sink),
            CfracCmd::TailOmega1 { seq, levels } => commands::cfrac_tail(&seq, levels, &sink),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
