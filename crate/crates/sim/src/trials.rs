//! Synthetic trials: owner populations, the aggregate target and the full
//! coalition table.

use rand::Rng as _;
use rayon::prelude::*;
use wdmarket::benchmarks::{CoalitionEntry, CoalitionTable};
use wdmarket::distances::{DistanceKind, DistanceSet};
use wdmarket::distributions::{aggregate_euclidean, DistributionSpec, Draws, EmpiricalSample, Family};
use wdmarket::rng::{stream, Rng, StreamId};
use wdmarket::tasks::{TargetLoss, TaskKind, TaskSpec};

use crate::config::ExperimentConfig;

// stream purposes
const PARAMS: u16 = 0;
const DRAWS: u16 = 1;
const RESERVE: u16 = 2;
const EPSILON: u16 = 3;
const DP_NOISE: u16 = 4;

/// Tasks measured for every coalition, in table order.
pub fn table_tasks() -> Vec<TaskSpec> {
    [
        TaskKind::MeanRmse,
        TaskKind::MedianMae,
        TaskKind::QuantileMpl { tau: 0.1 },
        TaskKind::QuantileMpl { tau: 0.3 },
        TaskKind::QuantileMpl { tau: 0.7 },
        TaskKind::QuantileMpl { tau: 0.8 },
        TaskKind::QuantileMpl { tau: 0.9 },
        TaskKind::DEFAULT_NEWSVENDOR,
    ]
    .into_iter()
    .map(|k| TaskSpec::new(k).expect("built-in task"))
    .collect()
}

#[derive(Debug, Clone)]
pub struct Trial {
    pub index: usize,
    pub seed: u64,
    pub specs: Vec<DistributionSpec>,
    pub draws: Vec<Draws>,
    pub target: EmpiricalSample,
    /// `L(X_T)` per table task.
    pub target_losses: Vec<TargetLoss>,
    pub table: CoalitionTable,
    /// Reserve-price uniforms in `[0, 1)`, scaled by θ̄ before use.
    pub reserve_u: Vec<f64>,
    /// Privacy-budget uniforms in `(0, 1]`, scaled by ε̄ before use.
    pub epsilon_u: Vec<f64>,
}

impl Trial {
    pub fn generate(cfg: &ExperimentConfig, family: Family, index: usize) -> wdmarket::Result<Self> {
        let n = cfg.n_owners;
        let t = index as u64;
        let specs = (0..n)
            .map(|i| {
                let mut rng = stream(cfg.seed, StreamId::new(t, PARAMS, i as u16));
                let alpha = uniform(&mut rng, cfg.alpha_range);
                let beta = uniform(&mut rng, cfg.beta_range);
                DistributionSpec::new(family, alpha, beta)
            })
            .collect::<wdmarket::Result<Vec<_>>>()?;
        let draws = specs
            .iter()
            .enumerate()
            .map(|(i, s)| {
                s.draw(
                    cfg.sample_size,
                    &mut stream(cfg.seed, StreamId::new(t, DRAWS, i as u16)),
                )
            })
            .collect::<wdmarket::Result<Vec<_>>>()?;
        let refs: Vec<&Draws> = draws.iter().collect();
        let target = aggregate_euclidean(&refs)?;
        let tasks = table_tasks();
        let with_loss: Vec<(TaskSpec, TargetLoss)> = tasks.iter().map(|k| (*k, TargetLoss::new(&target, k))).collect();
        let entries = (1..1u32 << n)
            .into_par_iter()
            .map(|mask| CoalitionEntry::compute(&draws, mask, &target, &with_loss, cfg.bins))
            .collect::<wdmarket::Result<Vec<_>>>()?;
        let table = CoalitionTable::from_entries(n, tasks, entries)?;
        let mut rng = stream(cfg.seed, StreamId::new(t, RESERVE, 0));
        let reserve_u = (0..n).map(|_| rng.random::<f64>()).collect();
        let mut rng = stream(cfg.seed, StreamId::new(t, EPSILON, 0));
        let epsilon_u = (0..n).map(|_| 1.0 - rng.random::<f64>()).collect();
        Ok(Trial {
            index,
            seed: cfg.seed,
            specs,
            draws,
            target,
            target_losses: with_loss.into_iter().map(|(_, l)| l).collect(),
            table,
            reserve_u,
            epsilon_u,
        })
    }

    pub fn n_owners(&self) -> usize {
        self.draws.len()
    }

    /// Owner `i`'s distances to the target.
    pub fn individual(&self, i: usize) -> &DistanceSet {
        &self.table.entry(1 << i).distances
    }

    /// Individual WDs `W(X_i, X_T)`.
    pub fn w(&self) -> Vec<f64> {
        (0..self.n_owners()).map(|i| self.individual(i).wd).collect()
    }

    /// Individual distances of one kind; `None` where undefined.
    pub fn individual_distances(&self, kind: DistanceKind) -> Vec<Option<f64>> {
        (0..self.n_owners()).map(|i| self.individual(i).get(kind)).collect()
    }

    pub fn task_index(&self, kind: TaskKind) -> usize {
        self.table
            .tasks()
            .iter()
            .position(|t| t.kind == kind)
            .expect("task is measured in every table")
    }

    /// `L(X_P) − L(X_T)`.
    pub fn gap(&self, mask: u32, task: usize) -> f64 {
        self.table.entry(mask).loss_gaps[task]
    }

    /// `L(X_P)`.
    pub fn loss(&self, mask: u32, task: usize) -> f64 {
        self.gap(mask, task) + self.target_losses[task].loss
    }

    /// Owner with the largest individual WD; lowest index on ties.
    pub fn worst_owner(&self) -> usize {
        let w = self.w();
        (0..w.len()).fold(0, |best, i| if w[i] > w[best] { i } else { best })
    }

    /// `B_ref = max(L(X_R) − L(X_T), 0)` with `X_R` the worst owner.
    pub fn reference_budget(&self, task: usize) -> f64 {
        self.gap(1 << self.worst_owner(), task).max(0.0)
    }

    /// Fresh stream for owner `i`'s DP noise. The same stream is reused for
    /// every ε so sweeps share their underlying noise.
    pub fn dp_noise_stream(&self, i: usize) -> Rng {
        stream(self.seed, StreamId::new(self.index as u64, DP_NOISE, i as u16))
    }
}

fn uniform(rng: &mut Rng, (lo, hi): (f64, f64)) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// All trials of one family, in trial order.
#[derive(Debug, Clone)]
pub struct TrialSet {
    pub family: Family,
    pub trials: Vec<Trial>,
}

impl TrialSet {
    /// Trials are generated in parallel and collected in index order.
    pub fn generate(cfg: &ExperimentConfig, family: Family) -> wdmarket::Result<Self> {
        let trials = (0..cfg.trials)
            .into_par_iter()
            .map(|t| Trial::generate(cfg, family, t))
            .collect::<wdmarket::Result<Vec<_>>>()?;
        Ok(TrialSet { family, trials })
    }
}
