use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "satrans", version, about = "Saturated transfer systems on cyclic groups of order p^m q^n")]
pub struct Cli {
    /// Write results to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    /// Override the command's default size limit (a node budget for brute force).
    #[arg(long, global = true, value_name = "N")]
    pub budget: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count saturated transfer systems on [m] x [n].
    Count(CountArgs),
    /// Stream every saturated cover of [m] x [n] in code order.
    Enumerate(EnumerateArgs),
    /// Check transfer-system or cover JSON documents.
    Verify(VerifyArgs),
    /// Realize saturated systems on C_{p q^n} by index sets.
    Realize(RealizeArgs),
    /// Run the acceptance suite.
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Recurrence,
    Closed,
    Egf,
    Bruteforce,
    Codes,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Recurrence,
        Method::Closed,
        Method::Egf,
        Method::Codes,
        Method::Bruteforce,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Recurrence => "recurrence",
            Method::Closed => "closed",
            Method::Egf => "egf",
            Method::Bruteforce => "bruteforce",
            Method::Codes => "codes",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Text,
    Csv,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    pub m: usize,
    pub n: usize,

    #[arg(long, value_enum, conflicts_with = "all_methods")]
    pub method: Option<Method>,

    /// Run every method within its limits and fail unless they agree.
    #[arg(long)]
    pub all_methods: bool,

    /// Print s(i, j) for all i <= m, j <= n.
    #[arg(long, conflicts_with = "all_methods")]
    pub table: bool,

    #[arg(long, value_enum, default_value_t = TableFormat::Text, requires = "table")]
    pub format: TableFormat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CoverFormat {
    Json,
    Dot,
    Codes,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    pub m: usize,
    pub n: usize,

    #[arg(long, value_enum, default_value_t = CoverFormat::Json)]
    pub format: CoverFormat,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// JSON or JSON Lines file; `-` reads stdin.
    pub file: PathBuf,

    /// Treat a valid but non-saturated transfer system as a failure (exit 4).
    #[arg(long)]
    pub require_saturated: bool,
}

#[derive(Debug, Args)]
pub struct RealizeArgs {
    /// Transfer-system or cover JSON (one document or JSON Lines); `-` reads stdin.
    pub file: PathBuf,

    #[arg(long)]
    pub p: u64,

    #[arg(long)]
    pub q: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Level {
    Quick,
    Full,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(value_enum, default_value_t = Level::Quick)]
    pub level: Level,

    /// Run a single criterion.
    #[arg(long, value_name = "N")]
    pub only: Option<u8>,
}
