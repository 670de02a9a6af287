//! Command-line front end: configuration loading, subcommand dispatch and
//! artifact emission.

use std::path::{Path, PathBuf};

mod aa_test;
mod config;
mod lasota_cmd;
mod mean;
mod solve;
mod support;
mod verify;

pub use aa_test::{cmd_aa_test, AaTestOutput};
pub use config::{
    parse_grid, AaTestConfig, CandidateGrid, GridConfig, OutputConfig, Problem, RunConfig, Tolerances, Truncation,
};
pub use lasota_cmd::{cmd_lasota, LasotaReport, HISTORY_LEVELS};
pub use mean::{cmd_mean, MeanOutput};
pub use solve::{cmd_solve, LinearReport};
pub use support::derive_dichotomy;
pub use verify::{cmd_verify, CheckResult, ALL_CHECKS};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 1;
    pub const NOT_CONVERGED: i32 = 2;
    pub const PRECONDITION: i32 = 3;
    pub const MAX_ITER: i32 = 4;
    pub const CHECK_FAILED: i32 = 5;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] automorph::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Mean,
    Solve,
    Verify,
    Lasota,
    AaTest,
}

/// Runs one subcommand, writing its artifacts under `out`, and returns the
/// exit code.
pub fn run(command: Command, config: &RunConfig, out: &Path) -> Result<i32, CliError> {
    match command {
        Command::Mean => cmd_mean(config, out),
        Command::Solve => cmd_solve(config, out),
        Command::Verify => cmd_verify(config, out),
        Command::Lasota => cmd_lasota(config, out),
        Command::AaTest => cmd_aa_test(config, out),
    }
}
