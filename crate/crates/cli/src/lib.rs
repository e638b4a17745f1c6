//! Configuration, output and subcommands behind the `kondo-walk` binary.

pub mod commands;
pub mod config;
pub mod output;

use std::path::{Path, PathBuf};

pub use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{origin}: {msg}")]
    Config { origin: String, msg: String },

    #[error(transparent)]
    Model(#[from] kondo_walk::Error),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn config(origin: String, msg: String) -> Self {
        CliError::Config { origin, msg }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    /// 2 for bad input, 3 for a numerically unsupported parameter point, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Model(e) if e.is_numerical_regime() => 3,
            CliError::Model(_) => 2,
            CliError::Io { .. } => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Matrices,
    Spectrum,
    Bound,
    Evolve,
    Negativity,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Matrices => "matrices",
            Command::Spectrum => "spectrum",
            Command::Bound => "bound",
            Command::Evolve => "evolve",
            Command::Negativity => "negativity",
        }
    }
}

/// Run `command` and write its files plus `manifest.txt` into `cfg.outdir`.
pub fn execute(command: Command, cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let root = cfg
        .outdir
        .clone()
        .ok_or_else(|| CliError::config("config".into(), "outdir is required".into()))?;
    let mut out = output::OutDir::create(&root)?;
    match command {
        Command::Matrices => commands::matrices(cfg, &mut out)?,
        Command::Spectrum => commands::spectrum(cfg, &mut out)?,
        Command::Bound => commands::bound(cfg, &mut out)?,
        Command::Evolve => commands::evolve(cfg, &mut out)?,
        Command::Negativity => commands::negativity(cfg, &mut out)?,
    }
    out.finish(command.name(), &cfg.echo())
}
