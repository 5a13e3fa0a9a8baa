use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dctlab_cli::{
    cmd_bench, cmd_complexity, cmd_compress, cmd_matrices, cmd_spectral, CliError, PartialConfig,
    RunConfig,
};

#[derive(Parser)]
#[command(
    name = "dctlab",
    version,
    about = "Low-complexity 8-point DCT approximations: matrices, spectra, compression benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write transform matrices, the rounded kernel, and an orthogonality summary
    Matrices(Common),
    /// Write per-row error energies and frequency deviation curves as CSV
    Spectral(Common),
    /// Reconstruct corpus images at each retention level, one PGM each
    Compress(Common),
    /// Average quality metrics over a corpus and write bench.csv
    Bench(Common),
    /// Audit operation counts against declared costs
    Complexity(Common),
}

#[derive(Args)]
struct Common {
    /// Transforms to run, comma separated (default: whole registry)
    #[arg(long, value_delimiter = ',', value_name = "NAME[,NAME...]")]
    transforms: Option<Vec<String>>,
    /// Smallest retained coefficient count
    #[arg(long, value_name = "N")]
    r_min: Option<usize>,
    /// Largest retained coefficient count
    #[arg(long, value_name = "N")]
    r_max: Option<usize>,
    /// Directory of input .pgm images
    #[arg(long, value_name = "DIR")]
    corpus: Option<PathBuf>,
    /// Output directory (default: out)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Extra transform matrix file; repeatable
    #[arg(long = "comparator", value_name = "FILE")]
    comparators: Vec<PathBuf>,
    /// TOML file supplying any flag not given on the command line
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

impl Common {
    fn into_config(self) -> Result<RunConfig, CliError> {
        let flags = PartialConfig {
            transforms: self.transforms,
            r_min: self.r_min,
            r_max: self.r_max,
            corpus: self.corpus,
            out: self.out,
            comparators: (!self.comparators.is_empty()).then_some(self.comparators),
        };
        let merged = match &self.config {
            Some(path) => flags.or(PartialConfig::from_toml_file(path)?),
            None => flags,
        };
        RunConfig::from_partial(merged)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Matrices(c) => cmd_matrices(&c.into_config()?),
        Cmd::Spectral(c) => cmd_spectral(&c.into_config()?),
        Cmd::Compress(c) => cmd_compress(&c.into_config()?),
        Cmd::Bench(c) => cmd_bench(&c.into_config()?),
        Cmd::Complexity(c) => cmd_complexity(&c.into_config()?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("dctlab: {err}");
            let mut source = std::error::Error::source(&err);
            while let Some(cause) = source {
                eprintln!("  caused by: {cause}");
                source = cause.source();
            }
            ExitCode::FAILURE
        }
    }
}
