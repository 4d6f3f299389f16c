mod commands;
mod error;
mod load;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

/// Secure function computation by expand-and-randomize.
#[derive(Debug, Parser)]
#[command(name = "confuse", version)]
struct Cli {
    /// Cap on worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CatalogKind {
    Field,
    Ring,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Kind {
    Any,
    Field,
    Ring,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List confusable structures over fields or rings.
    Catalog(CatalogArgs),
    /// Find an expansion for a table, build the scheme and verify it.
    Solve(SolveArgs),
    /// Verify a tabulated scheme against a table.
    Verify(VerifyArgs),
    /// Block compression of a field scheme with Monte Carlo decoding.
    Blockcode(BlockcodeArgs),
    /// Equality of m-ary inputs by residue comparison.
    CrtEqual(CrtArgs),
    /// Generic table-masking scheme for any table.
    Baseline(BaselineArgs),
}

#[derive(Debug, Args)]
pub struct CatalogArgs {
    pub kind: CatalogKind,
    /// Largest carrier size.
    #[arg(long, default_value_t = 20)]
    pub max: u32,
    /// Diff against a reference table; bundled if no path is given.
    #[arg(long, num_args = 0..=1, value_name = "PATH")]
    pub reference: Option<Option<String>>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Table file, or `@name` for a bundled table.
    #[arg(long)]
    pub table: String,
    #[arg(long, env = "CONFUSE_MAX_CARRIER", default_value_t = 16)]
    pub max_carrier: u32,
    #[arg(long, value_enum, default_value_t = Kind::Any)]
    pub kind: Kind,
    /// Number of expansions to report.
    #[arg(long, default_value_t = 1)]
    pub limit: usize,
    /// Require this relabeling of W1 (comma-separated carrier elements).
    #[arg(long, value_delimiter = ',', requires = "map2")]
    pub map1: Option<Vec<u32>>,
    /// Require this relabeling of W2.
    #[arg(long, value_delimiter = ',', requires = "map1")]
    pub map2: Option<Vec<u32>>,
    /// Shrink the support of the additive mask.
    #[arg(long)]
    pub optimize_z: bool,
    /// Also try non-coset supports when shrinking.
    #[arg(long, requires = "optimize_z")]
    pub subsets: bool,
    #[arg(long)]
    pub input_dist: Option<String>,
    /// Write the tabulated scheme here.
    #[arg(long)]
    pub emit_scheme: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Scheme file, or `@name` for a bundled scheme.
    #[arg(long)]
    pub scheme: String,
    #[arg(long)]
    pub table: String,
    #[arg(long)]
    pub input_dist: Option<String>,
}

#[derive(Debug, Args)]
pub struct BlockcodeArgs {
    #[arg(long)]
    pub table: String,
    #[arg(long = "L", value_name = "L")]
    pub l: usize,
    /// Rate slack above H(U), in q-ary units per symbol.
    #[arg(long, default_value_t = 0.15)]
    pub epsilon: f64,
    /// Fixed number of compressed symbols instead of the entropy rule.
    #[arg(long, conflicts_with = "epsilon")]
    pub rows: Option<usize>,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub input_dist: Option<String>,
    #[arg(long, env = "CONFUSE_MAX_CARRIER", default_value_t = 16)]
    pub max_carrier: u32,
    /// Also check exact security of a block of this length.
    #[arg(long, value_name = "L")]
    pub security_l: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CrtArgs {
    #[arg(long)]
    pub m: u32,
    /// Sample this many permutations instead of enumerating all.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    #[arg(long)]
    pub table: String,
    #[arg(long)]
    pub input_dist: Option<String>,
    #[arg(long)]
    pub emit_scheme: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<bool, CliError> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .map_err(|e| CliError::Input(e.to_string()))?;
    }
    let json = cli.json;
    match cli.command {
        Command::Catalog(a) => commands::catalog(a, json),
        Command::Solve(a) => commands::solve(a, json),
        Command::Verify(a) => commands::verify(a, json),
        Command::Blockcode(a) => commands::blockcode(a, json),
        Command::CrtEqual(a) => commands::crt_equal(a, json),
        Command::Baseline(a) => commands::baseline(a, json),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
