mod args;
mod commands;
mod output;

pub use args::Cli;
pub use commands::run;

use consensus_kinetics::{Error, Result};

pub const THREADS_ENV: &str = "CONSENSUS_KINETICS_THREADS";

/// Sizes the global worker pool from the environment, if requested.
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Error::InvalidParameter(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidParameter(e.to_string()))
}
