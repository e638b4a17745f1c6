use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kondo_walk_cli::{CliError, Command, RunConfig};

#[derive(Parser)]
#[command(name = "kondo-walk", version, about = "Quantum walks scattering off a magnetic impurity")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Dump coin and impurity scattering matrices with oracle deviations.
    Matrices(Common),
    /// One-walker spectrum and bound eigenvectors.
    Spectrum(Common),
    /// Analytic XX bound-state table.
    Bound(Common),
    /// Two-walker probabilities and time series.
    Evolve(Common),
    /// Two-walker entanglement negativity series.
    Negativity(Common),
}

#[derive(Args)]
struct Common {
    /// Configuration file of `key = value` lines.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override one key; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Directory for the CSV files and manifest.
    #[arg(long, value_name = "DIR")]
    outdir: PathBuf,
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
}

struct StderrLog;

impl log::Log for StderrLog {
    fn enabled(&self, m: &log::Metadata) -> bool {
        m.level() <= log::max_level()
    }

    fn log(&self, r: &log::Record) {
        if self.enabled(r.metadata()) {
            eprintln!("[{}] {}", r.level(), r.args());
        }
    }

    fn flush(&self) {}
}

fn load(common: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            RunConfig::parse(&text, &path.display().to_string())?
        }
        None => RunConfig::default(),
    };
    for (k, s) in common.set.iter().enumerate() {
        cfg.apply_override(s, &format!("--set #{}", k + 1))?;
    }
    cfg.outdir = Some(common.outdir.clone());
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common) = match &cli.command {
        Sub::Matrices(c) => (Command::Matrices, c),
        Sub::Spectrum(c) => (Command::Spectrum, c),
        Sub::Bound(c) => (Command::Bound, c),
        Sub::Evolve(c) => (Command::Evolve, c),
        Sub::Negativity(c) => (Command::Negativity, c),
    };
    log::set_logger(&StderrLog).expect("logger set once");
    log::set_max_level(match common.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    });
    match load(common).and_then(|cfg| kondo_walk_cli::execute(command, &cfg)) {
        Ok(manifest) => {
            log::info!("manifest {}", manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
