//! `randwalls`: sample presentations, build tiles and balanced walls on
//! patches, verify them against the brute-force oracles, and export.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::Settings;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or input files. Exit 2.
    Usage(String),
    /// A check failed. Exit 1.
    Violation(String),
    /// Inadmissible patch without `--force`. Exit 3.
    Inadmissible(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Violation(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Inadmissible(_) => 3,
        }
    }
}

impl From<randwalls::Error> for CliError {
    fn from(e: randwalls::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "randwalls", version, about = "Tiles and balanced walls on finite patches of random groups")]
struct Cli {
    /// TOML file with keys n, d, ell0, subdivision, seed, budget, max_cells, eps, out.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample a presentation in the density model.
    Sample(SampleArgs),
    /// Enumerate small patches fulfilled by a presentation.
    Patches(PatchesArgs),
    /// Build tiles and walls on a fixture or patch and write all artifacts.
    Build(BuildArgs),
    /// Run the oracle suites over fixtures, sampled patches or build directories.
    Verify(VerifyArgs),
    /// Export walls from a build directory.
    Export(ExportArgs),
    /// The hand-built fixture catalog.
    #[command(subcommand)]
    Fixtures(FixturesCmd),
}

#[derive(Args)]
pub struct SampleArgs {
    /// Number of generators.
    #[arg(short)]
    pub n: Option<u16>,
    /// Density as p/q.
    #[arg(short, value_parser = parse_rational)]
    pub d: Option<randwalls::Q>,
    #[arg(long)]
    pub ell0: Option<usize>,
    /// Defaults to the least of 1, 2, 4 making ℓ divisible by 4.
    #[arg(long)]
    pub subdivision: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct PatchesArgs {
    #[arg(long)]
    pub presentation: PathBuf,
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub max_cells: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("input").required(true).args(["fixture", "patch"]))]
pub struct BuildArgs {
    #[arg(long)]
    pub fixture: Option<String>,
    /// Relator length for a fixture; its default otherwise.
    #[arg(long, requires = "fixture")]
    pub ell: Option<usize>,
    /// Patch JSON file.
    #[arg(long)]
    pub patch: Option<PathBuf>,
    /// Presentation labeling the patch; supplies d and enables the fulfilment check.
    #[arg(long, requires = "patch")]
    pub presentation: Option<PathBuf>,
    /// Density for a patch without presentation.
    #[arg(short, value_parser = parse_rational)]
    pub d: Option<randwalls::Q>,
    #[arg(long, value_parser = parse_rational)]
    pub eps: Option<randwalls::Q>,
    /// Keep the antipodal walls unbent.
    #[arg(long)]
    pub no_bend: bool,
    /// Build even when the patch fails admissibility.
    #[arg(long)]
    pub force: bool,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Build directories to re-check; their logs must match a fresh build.
    #[arg(long)]
    pub dir: Vec<PathBuf>,
    #[arg(long)]
    pub fixture: Vec<String>,
    /// Admissible sampled patches per relator length.
    #[arg(long, default_value_t = 0)]
    pub sampled: usize,
    #[arg(long, value_delimiter = ',', default_value = "8,20,40")]
    pub ells: Vec<usize>,
    /// Comma-separated suites; all when absent.
    #[arg(long, value_delimiter = ',')]
    pub lemmas: Option<Vec<String>>,
    /// Random trees for the sublemma47 suite.
    #[arg(long, default_value_t = 1000)]
    pub trees: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the oracle results as JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Format {
    Dot,
    Json,
}

#[derive(Args)]
pub struct ExportArgs {
    #[arg(long)]
    pub dir: PathBuf,
    #[arg(long, value_enum)]
    pub format: Format,
    /// Output file; stdout when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum FixturesCmd {
    /// Names, default ℓ and descriptions.
    List,
    /// Write a fixture patch as JSON.
    Build {
        name: String,
        #[arg(long)]
        ell: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn parse_rational(s: &str) -> Result<randwalls::Q, String> {
    randwalls::rational::parse_q(s).map_err(|e| e.to_string())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let settings = Settings::load(cli.config.as_deref())?;
    match cli.cmd {
        Cmd::Sample(a) => commands::sample(&settings, a),
        Cmd::Patches(a) => commands::patches(&settings, a),
        Cmd::Build(a) => commands::build(&settings, a),
        Cmd::Verify(a) => commands::verify(&settings, a),
        Cmd::Export(a) => commands::export(a),
        Cmd::Fixtures(FixturesCmd::List) => commands::fixtures_list(),
        Cmd::Fixtures(FixturesCmd::Build { name, ell, output }) => commands::fixtures_build(&name, ell, output),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Usage(m) => eprintln!("error: {m}"),
                CliError::Violation(m) => eprintln!("verification failed: {m}"),
                CliError::Inadmissible(m) => eprintln!("inadmissible patch (use --force to build anyway):\n{m}"),
            }
            ExitCode::from(e.code())
        }
    }
}
