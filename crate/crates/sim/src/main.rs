use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use wdmarket_sim::config::{ExperimentConfig, ExperimentId};
use wdmarket_sim::{output, HarnessError};

/// Wasserstein data-market simulator.
#[derive(Debug, Parser)]
#[command(name = "wdmarket", version)]
struct Cli {
    #[command(subcommand)]
    experiment: Command,

    /// Flat `key = value` config file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "results")]
    out: PathBuf,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// gaussian, uniform or exponential.
    #[arg(long, global = true)]
    family: Option<String>,
    /// Reserve-price correlation scenario: -1, 0 or 1.
    #[arg(long, global = true, allow_hyphen_values = true)]
    rho: Option<String>,
    /// Hoeffding confidence level.
    #[arg(long, global = true)]
    delta: Option<f64>,
    /// finite or infinite.
    #[arg(long, global = true)]
    population: Option<String>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    ValLipschitz,
    ValCorr,
    ValShapley,
    ValHoeffding,
    ProcExo,
    ProcExoDist,
    ProcDp,
    ProcEndo,
    ProcJoint,
    ProcRisk,
    ProcApprox,
    /// Every experiment, sharing generated trials.
    All,
}

impl Command {
    fn experiments(self) -> Vec<ExperimentId> {
        use ExperimentId as E;
        match self {
            Command::ValLipschitz => vec![E::ValLipschitz],
            Command::ValCorr => vec![E::ValCorr],
            Command::ValShapley => vec![E::ValShapley],
            Command::ValHoeffding => vec![E::ValHoeffding],
            Command::ProcExo => vec![E::ProcExo],
            Command::ProcExoDist => vec![E::ProcExoDist],
            Command::ProcDp => vec![E::ProcDp],
            Command::ProcEndo => vec![E::ProcEndo],
            Command::ProcJoint => vec![E::ProcJoint],
            Command::ProcRisk => vec![E::ProcRisk],
            Command::ProcApprox => vec![E::ProcApprox],
            Command::All => E::ALL.to_vec(),
        }
    }
}

fn load(cli: &Cli) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
                path: path.clone(),
                source,
            })?;
            ExperimentConfig::parse(&text)?
        }
        None => ExperimentConfig::default(),
    };
    let overrides = [
        ("seed", cli.seed.map(|v| v.to_string())),
        ("trials", cli.trials.map(|v| v.to_string())),
        ("workers", cli.workers.map(|v| v.to_string())),
        ("family", cli.family.clone()),
        ("rho", cli.rho.clone()),
        ("delta", cli.delta.map(|v| v.to_string())),
        ("population", cli.population.clone()),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            cfg.set(key, &v)?;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = load(&cli).and_then(|cfg| {
        let ids = cli.experiment.experiments();
        let start = Instant::now();
        let tables = wdmarket_sim::run(&cfg, &ids)?;
        output::emit(&cli.out, &cfg, &ids, &tables, start.elapsed().as_secs_f64())
    });
    match result {
        Ok(files) => {
            eprintln!("wrote {} files to {}", files.len(), cli.out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
