//! One module per group of experiments. Each experiment maps a config to a
//! list of [`Table`]s; nothing here touches the filesystem.

mod approx;
mod endo;
mod exo;
mod val;

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use wdmarket::distributions::Family;
use wdmarket::mechanisms::{solve, MarketInstance, Mechanism, MechanismResult, PriorSpec};
use wdmarket::stats::{ci95, mean};
use wdmarket::valuation::{HoeffdingParams, Population};

use crate::config::{ExperimentConfig, ExperimentId};
use crate::output::{Cell, Table};
use crate::trials::TrialSet;
use crate::HarnessError;

/// Shares generated trials between experiments of one run.
pub struct Context<'a> {
    pub cfg: &'a ExperimentConfig,
    cache: HashMap<Family, Arc<TrialSet>>,
}

impl<'a> Context<'a> {
    pub fn new(cfg: &'a ExperimentConfig) -> Self {
        Context {
            cfg,
            cache: HashMap::new(),
        }
    }

    pub fn trials(&mut self, family: Family) -> Result<Arc<TrialSet>, HarnessError> {
        if let Some(t) = self.cache.get(&family) {
            return Ok(t.clone());
        }
        let set = Arc::new(TrialSet::generate(self.cfg, family)?);
        self.cache.insert(family, set.clone());
        Ok(set)
    }
}

pub fn run_one(ctx: &mut Context, id: ExperimentId) -> Result<Vec<Table>, HarnessError> {
    match id {
        ExperimentId::ValLipschitz => val::lipschitz(ctx),
        ExperimentId::ValCorr => val::correlations(ctx),
        ExperimentId::ValShapley => val::shapley_allocations(ctx),
        ExperimentId::ValHoeffding => val::hoeffding(ctx),
        ExperimentId::ProcExo => exo::proc_exo(ctx),
        ExperimentId::ProcExoDist => exo::proc_exo_dist(ctx),
        ExperimentId::ProcDp => exo::proc_dp(ctx),
        ExperimentId::ProcEndo => endo::proc_endo(ctx),
        ExperimentId::ProcJoint => endo::proc_joint(ctx),
        ExperimentId::ProcRisk => endo::proc_risk(ctx),
        ExperimentId::ProcApprox => approx::proc_approx(ctx),
    }
}

/// Maps every trial in parallel, keeping trial order.
fn per_trial<T, F>(set: &TrialSet, f: F) -> Result<Vec<T>, HarnessError>
where
    T: Send,
    F: Fn(&crate::trials::Trial) -> Result<T, HarnessError> + Sync + Send,
{
    set.trials.par_iter().map(f).collect()
}

/// `[mean, ci_lo, ci_hi]` of the finite entries.
fn summary(xs: &[f64]) -> [Cell; 3] {
    let finite: Vec<f64> = xs.iter().copied().filter(|x| x.is_finite()).collect();
    let (lo, hi) = ci95(&finite);
    [mean(&finite).into(), lo.into(), hi.into()]
}

fn finite_mean(xs: &[f64]) -> f64 {
    let finite: Vec<f64> = xs.iter().copied().filter(|x| x.is_finite()).collect();
    mean(&finite)
}

fn fraction(flags: impl IntoIterator<Item = bool>) -> f64 {
    let (mut yes, mut n) = (0usize, 0usize);
    for f in flags {
        yes += f as usize;
        n += 1;
    }
    if n == 0 {
        f64::NAN
    } else {
        yes as f64 / n as f64
    }
}

/// Runs one point-wise mechanism under i.i.d. `U(0, θ̄)` priors.
fn run_mechanism(
    w: &[f64],
    theta_bar: f64,
    theta: &[f64],
    mechanism: Mechanism,
    delta: f64,
    population: Population,
) -> Result<MechanismResult, HarnessError> {
    let n = w.len();
    let instance = MarketInstance::new(
        w.to_vec(),
        PriorSpec::uniform_iid(theta_bar, n)?,
        mechanism,
        HoeffdingParams::new(delta, population, n)?,
    )?;
    Ok(solve(&instance, theta)?)
}

/// `ψ(θ) = 2θ` under `U(0, θ̄)`.
fn uniform_virtual_costs(theta_bar: f64, theta: &[f64]) -> Result<Vec<f64>, HarnessError> {
    let prior = PriorSpec::uniform_iid(theta_bar, theta.len())?;
    Ok(theta
        .iter()
        .enumerate()
        .map(|(i, &t)| prior.virtual_cost(i, t))
        .collect::<wdmarket::Result<Vec<_>>>()?)
}

fn population_label(p: Population) -> &'static str {
    match p {
        Population::Finite => "fin",
        Population::Infinite => "inf",
    }
}
