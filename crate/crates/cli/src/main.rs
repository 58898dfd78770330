mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use report::Fail;

/// Boundary measurements, Poisson brackets, path reversal and realization
/// for perfect networks in an annulus.
#[derive(Parser, Debug)]
#[command(name = "annet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(clap::Args, Clone, Debug)]
pub struct Opts {
    /// Source label, or two of them for two-entry commands
    #[arg(long, global = true, value_delimiter = ',')]
    pub source: Vec<usize>,
    /// Sink label, or two of them for two-entry commands
    #[arg(long, global = true, value_delimiter = ',')]
    pub sink: Vec<usize>,
    /// Evaluation point `t` or pair `t,s` (rationals); replaces sampling
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub at: Option<String>,
    /// Bracket constants a12,a13,a23,b12,b13,b23 (default 0,0,1,0,0,-1)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub params: Option<String>,
    /// Label set K, comma separated
    #[arg(long = "set", global = true, value_delimiter = ',')]
    pub set: Vec<usize>,
    /// Edge ids along a path or trail, comma separated
    #[arg(long, global = true, value_delimiter = ',')]
    pub path: Vec<String>,
    /// Longest path length summed by `oracle`
    #[arg(long, global = true)]
    pub maxlen: Option<usize>,
    /// Seed for sampled points and sampled ratio pairs
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file: the network for commands that produce one, else the report
    #[arg(short = 'o', global = true)]
    pub output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Which {
    Inner,
    Outer,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List violated invariants (exit 1 if any)
    Validate { file: PathBuf },
    /// One boundary measurement M(i, j), needs --source and --sink
    Measure { file: PathBuf },
    /// The boundary measurement matrix
    Matrix { file: PathBuf },
    /// Faces and their weights
    Faces { file: PathBuf },
    /// Weight of a trail (--path) or of a found connecting trail
    Trail { file: PathBuf },
    /// Move a base point of the cut and check the measurement law
    MoveCut {
        file: PathBuf,
        #[arg(value_enum, default_value = "outer")]
        circle: Which,
    },
    /// Reverse the cut and check that λ inverts
    ReverseCut { file: PathBuf },
    /// Chain-rule bracket {M(i,j)(t), M(i',j')(s)}
    Bracket { file: PathBuf },
    /// Check brackets against the α = -β = 1 closed forms (5 sampled points)
    PsreCheck { file: PathBuf },
    /// Check brackets against the α = β = 1 closed forms (5 sampled points)
    Psre2Check { file: PathBuf },
    /// Check the R-matrix bracket of A = M W₀ (3 sampled points)
    SklyaninCheck { file: PathBuf },
    /// Plücker coordinate x_K (all K without --set)
    Plucker { file: PathBuf },
    /// Reverse a source-to-sink path given by --path
    ReversePath { file: PathBuf },
    /// Check the path-reversal minor identity (5 sampled points)
    PathrevCheck { file: PathBuf },
    /// Compare Plücker ratio brackets across a path reversal (2 points, 3 ratio pairs per path)
    ChartCheck { file: PathBuf },
    /// Compile a rational matrix spec into a network
    Realize { file: PathBuf },
    /// Partial sums of the path series against the exact measurement
    Oracle { file: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, file, which) = match &cli.command {
        Command::Validate { file } => ("validate", file, None),
        Command::Measure { file } => ("measure", file, None),
        Command::Matrix { file } => ("matrix", file, None),
        Command::Faces { file } => ("faces", file, None),
        Command::Trail { file } => ("trail", file, None),
        Command::MoveCut { file, circle } => ("move-cut", file, Some(*circle)),
        Command::ReverseCut { file } => ("reverse-cut", file, None),
        Command::Bracket { file } => ("bracket", file, None),
        Command::PsreCheck { file } => ("psre-check", file, None),
        Command::Psre2Check { file } => ("psre2-check", file, None),
        Command::SklyaninCheck { file } => ("sklyanin-check", file, None),
        Command::Plucker { file } => ("plucker", file, None),
        Command::ReversePath { file } => ("reverse-path", file, None),
        Command::PathrevCheck { file } => ("pathrev-check", file, None),
        Command::ChartCheck { file } => ("chart-check", file, None),
        Command::Realize { file } => ("realize", file, None),
        Command::Oracle { file } => ("oracle", file, None),
    };
    match commands::run(name, file, which, &cli.opts) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Fail(msg)) => {
            eprintln!("{}", report::error_line(name, &msg));
            ExitCode::from(2)
        }
    }
}
