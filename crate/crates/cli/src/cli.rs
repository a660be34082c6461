//! Command-line parsing and dispatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use moodcycle_core::stats::Extremum;

use crate::commands;
use crate::config::RunConfig;
use crate::error::{usage, AppResult};

#[derive(Debug, Parser)]
#[command(name = "moodcycle", version, about = "Hourly mood scores from geo-located short messages, and tests for daily rhythms in them")]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Master seed; overrides the configuration.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Worker threads (default: one per core).
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    /// Output directory; overrides the configuration.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bin record files into per-season term matrices.
    Ingest {
        /// Record files.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Record format: jsonl or csv (default from the configuration).
        #[arg(long)]
        format: Option<String>,
    },
    /// Turn matrices into mood series and 24-hour profiles.
    Score,
    /// Run a statistical test on scored series.
    Analyze {
        #[command(subcommand)]
        test: TestCommand,
    },
    /// Write a synthetic record file.
    Synth {
        /// Synthesis TOML file.
        #[arg(long, value_name = "PATH")]
        spec: PathBuf,
        /// Record file to write (default: <out>/corpus.jsonl).
        #[arg(long, value_name = "PATH")]
        records: Option<PathBuf>,
    },
    /// Draw profile tables as SVG.
    Render {
        /// Profile tables (default: every profile_*.csv in the output directory).
        #[arg(long, value_name = "PATH")]
        profile: Vec<PathBuf>,
        /// SVG path, when rendering a single profile table.
        #[arg(long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Stem words read from standard input, one line out per line in.
    Stem,
}

#[derive(Debug, Clone, Args)]
pub struct Target {
    /// Mood to test; repeatable (default: every scored mood).
    #[arg(long = "mood", value_name = "NAME")]
    pub moods: Vec<String>,
    /// Season label or `aggregate` (default: aggregate when there are several seasons).
    #[arg(long)]
    pub scope: Option<String>,
    /// Also write the per-iteration statistics.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Mode {
    Max,
    Min,
}

impl From<Mode> for Extremum {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Max => Extremum::Max,
            Mode::Min => Extremum::Min,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum TestCommand {
    /// Permutation test for a shared daily pattern.
    Tcp {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        permutations: Option<u64>,
    },
    /// Bootstrap test that scores in hours HA exceed those in HB.
    Tmd {
        #[command(flatten)]
        target: Target,
        /// Hour ranges, e.g. `20-24` or `20-23,2-6`.
        #[arg(long)]
        ha: String,
        #[arg(long)]
        hb: String,
        #[arg(long)]
        bootstraps: Option<u64>,
    },
    /// Bootstrap test that the daily maximum or minimum falls in HC.
    Tpt {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        hc: String,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        bootstraps: Option<u64>,
    },
    /// Autocorrelation of the hourly series.
    Acf {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        max_lag: Option<usize>,
    },
}

/// Shared state for one invocation.
pub struct Context {
    pub config: RunConfig,
    pub seed: u64,
    pub out: PathBuf,
}

fn context(cli: &Cli) -> AppResult<Context> {
    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let seed = cli.seed.unwrap_or(config.seed);
    let out = cli.out.clone().unwrap_or_else(|| config.output.clone());
    Ok(Context { config, seed, out })
}

fn set_threads(n: Option<usize>) -> AppResult<()> {
    let Some(n) = n else { return Ok(()) };
    if n == 0 {
        return Err(usage("--threads must be at least 1"));
    }
    // a pool built earlier in the same process keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn execute(cli: Cli) -> AppResult<()> {
    set_threads(cli.threads)?;
    if let Command::Stem = cli.command {
        return commands::stem(std::io::stdin().lock(), std::io::stdout().lock());
    }
    let ctx = context(&cli)?;
    match cli.command {
        Command::Ingest { inputs, format } => commands::ingest(&ctx, &inputs, format.as_deref()),
        Command::Score => commands::score(&ctx),
        Command::Analyze { test } => commands::analyze(&ctx, test),
        Command::Synth { spec, records } => commands::synth(&ctx, &spec, records, cli.seed),
        Command::Render { profile, output } => commands::render(&ctx, profile, output),
        Command::Stem => unreachable!("handled above"),
    }
}

/// Parse `args`, run, and return the process exit code: 0 on success, 1 for
/// usage errors, 2 for data errors.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            let _ = std::io::stdout().flush();
            eprintln!("moodcycle: error: {e}");
            e.exit_code()
        }
    }
}
