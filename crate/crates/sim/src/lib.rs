//! Experiment harness for `wdmarket`: synthetic trials, the valuation and
//! procurement experiments, and their CSV/JSON output.
//!
//! ```no_run
//! use wdmarket_sim::config::{ExperimentConfig, ExperimentId};
//!
//! let cfg = ExperimentConfig { trials: 5, ..ExperimentConfig::default() };
//! let tables = wdmarket_sim::run(&cfg, &[ExperimentId::ProcExo]).unwrap();
//! wdmarket_sim::output::emit("out".as_ref(), &cfg, &[ExperimentId::ProcExo], &tables, 0.0).unwrap();
//! ```
//!
//! Every trial draws from its own counter-addressed random streams, so the
//! tables are identical for any worker count and for any subset of trials
//! run.

pub mod config;
pub mod coupling;
pub mod experiments;
pub mod output;
pub mod trials;

use std::path::PathBuf;

use thiserror::Error;

use config::{ConfigError, ExperimentConfig, ExperimentId};
use experiments::Context;
use output::Table;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Model(#[from] wdmarket::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl HarnessError {
    /// 2 for configuration problems, 3 for IO, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Io { .. } => 3,
            _ => 1,
        }
    }
}

/// Runs `experiments` in order on a pool of `cfg.workers` threads.
pub fn run(cfg: &ExperimentConfig, experiments: &[ExperimentId]) -> Result<Vec<Table>, HarnessError> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build()?;
    pool.install(|| {
        let mut ctx = Context::new(cfg);
        let mut tables = Vec::new();
        for &id in experiments {
            tables.extend(experiments::run_one(&mut ctx, id)?);
        }
        Ok(tables)
    })
}
