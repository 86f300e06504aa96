//! Command-line front end.
//!
//! Exit codes: 0 success (or a solved run), 1 usage or I/O error, 2 an
//! evolutionary run that exhausted its budget without a solution.

mod commands;
mod plot;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use plot::{recording_svg, stats_svg, RECORDING_PANELS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "hyperentm", version, about = "Evolve and evaluate ENTM copy-task controllers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an evolutionary experiment.
    Evolve(EvolveArgs),
    /// Score a genome on a test battery.
    Test(TestArgs),
    /// Test CPPN genomes on a larger bit size without retraining.
    Scale(ScaleArgs),
    /// Evolve at a new bit size, seeded from a champion CPPN. Rates come
    /// from the (HyperNEAT) config; encoding and bits are overridden.
    Transfer(TransferArgs),
    /// Record one episode timestep by timestep.
    Record(RecordArgs),
    /// Render run statistics or a recording as SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Cap on evaluation threads.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Continue from a checkpoint file.
    #[arg(long)]
    pub resume: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BatteryKind {
    Generalization,
    Long,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[arg(long)]
    pub genome: PathBuf,
    #[arg(long)]
    pub bits: usize,
    #[arg(long, value_enum)]
    pub battery: BatteryKind,
    #[arg(long)]
    pub seed: u64,
    /// JSON report path [default: <genome>.<battery>.report.json].
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ScaleArgs {
    /// CPPN genome; repeat for several champions.
    #[arg(long, required = true)]
    pub genome: Vec<PathBuf>,
    #[arg(long)]
    pub from: usize,
    #[arg(long)]
    pub to: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TransferArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub champion: PathBuf,
    #[arg(long)]
    pub bits: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RecordArgs {
    #[arg(long)]
    pub genome: PathBuf,
    #[arg(long)]
    pub bits: usize,
    #[arg(long)]
    pub length: usize,
    #[arg(long)]
    pub seed: u64,
    /// Output stem; `.csv` and `.json` files are written next to it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "source")]
pub struct PlotSource {
    #[arg(long)]
    pub stats: Option<PathBuf>,
    #[arg(long)]
    pub recording: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[command(flatten)]
    pub source: PlotSource,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code. Messages go to stdout and stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match commands::dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}
