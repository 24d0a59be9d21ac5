//! Experiment configuration.
//!
//! Config files are flat `key = value` lines. `#` starts a comment, blank
//! lines are ignored, keys are case-sensitive and a later line overrides an
//! earlier one. Lists are comma-separated. Command-line flags are applied
//! after the file through the same [`ExperimentConfig::set`] path.
//!
//! | key | value | default |
//! |-----|-------|---------|
//! | `seed` | u64 | 2024 |
//! | `trials` | count | 50 |
//! | `n_owners` | 1..=11 | 8 |
//! | `sample_size` | count ≥ 2 | 10000 |
//! | `family` | `gaussian`, `uniform`, `exponential` | per experiment |
//! | `alpha_lo`, `alpha_hi` | location range | 10, 16 |
//! | `beta_lo`, `beta_hi` | scale range | 1, 3 |
//! | `bins` | histogram bins | 64 |
//! | `delta` | Hoeffding confidence in [0, 1) | 0.95 |
//! | `delta_sweep` | list | 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99 |
//! | `population` | `finite`, `infinite` | per experiment |
//! | `rho` | `-1`, `0`, `1` | per experiment |
//! | `theta_bar` | reserve-price upper bound | per experiment |
//! | `theta_bar_sweep` | list | 0, 0.2, ..., 2.4 |
//! | `budget_multiples` | list of fractions of θ̄N | 0.1, 0.2, ..., 1 |
//! | `eps_bar` | privacy-budget upper bound | 5 |
//! | `eps_bar_sweep` | list | 10 log-spaced points in [0.1, 100] |
//! | `delta_dp` | Gaussian-mechanism failure probability | 1e-15 |
//! | `sensitivity` | DP sensitivity | 1 |
//! | `workers` | thread count, 0 = all cores | 0 |

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;
use wdmarket::distributions::Family;
use wdmarket::valuation::Population;

use crate::coupling::Rho;

/// Largest supported owner count; the Shapley benchmark adds the buyer as
/// one more player and exact enumeration stops at 12.
pub const MAX_OWNERS: usize = 11;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("bad value `{value}` for `{key}`: {reason}")]
    BadValue { key: String, value: String, reason: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentId {
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
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 11] = [
        ExperimentId::ValLipschitz,
        ExperimentId::ValCorr,
        ExperimentId::ValShapley,
        ExperimentId::ValHoeffding,
        ExperimentId::ProcExo,
        ExperimentId::ProcExoDist,
        ExperimentId::ProcDp,
        ExperimentId::ProcEndo,
        ExperimentId::ProcJoint,
        ExperimentId::ProcRisk,
        ExperimentId::ProcApprox,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::ValLipschitz => "val-lipschitz",
            ExperimentId::ValCorr => "val-corr",
            ExperimentId::ValShapley => "val-shapley",
            ExperimentId::ValHoeffding => "val-hoeffding",
            ExperimentId::ProcExo => "proc-exo",
            ExperimentId::ProcExoDist => "proc-exo-dist",
            ExperimentId::ProcDp => "proc-dp",
            ExperimentId::ProcEndo => "proc-endo",
            ExperimentId::ProcJoint => "proc-joint",
            ExperimentId::ProcRisk => "proc-risk",
            ExperimentId::ProcApprox => "proc-approx",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentId {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ExperimentId::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| ConfigError::Invalid(format!("unknown experiment `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub trials: usize,
    pub n_owners: usize,
    pub sample_size: usize,
    #[serde(serialize_with = "ser_family")]
    pub family: Option<Family>,
    pub alpha_range: (f64, f64),
    pub beta_range: (f64, f64),
    pub bins: usize,
    pub delta: f64,
    pub delta_sweep: Vec<f64>,
    #[serde(serialize_with = "ser_population")]
    pub population: Option<Population>,
    pub rho: Option<Rho>,
    pub theta_bar: Option<f64>,
    pub theta_bar_sweep: Vec<f64>,
    pub budget_multiples: Vec<f64>,
    pub eps_bar: f64,
    pub eps_bar_sweep: Vec<f64>,
    pub delta_dp: f64,
    pub sensitivity: f64,
    pub workers: usize,
}

fn ser_family<S: serde::Serializer>(f: &Option<Family>, s: S) -> Result<S::Ok, S::Error> {
    match f {
        Some(f) => s.serialize_str(f.name()),
        None => s.serialize_none(),
    }
}

fn ser_population<S: serde::Serializer>(p: &Option<Population>, s: S) -> Result<S::Ok, S::Error> {
    match p {
        Some(p) => s.serialize_str(p.name()),
        None => s.serialize_none(),
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 2024,
            trials: 50,
            n_owners: 8,
            sample_size: wdmarket::distributions::DEFAULT_SAMPLE_SIZE,
            family: None,
            alpha_range: (10.0, 16.0),
            beta_range: (1.0, 3.0),
            bins: wdmarket::distances::DEFAULT_BINS,
            delta: 0.95,
            delta_sweep: vec![0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99],
            population: None,
            rho: None,
            theta_bar: None,
            theta_bar_sweep: (0..=12).map(|i| i as f64 / 5.0).collect(),
            budget_multiples: (1..=10).map(|i| i as f64 / 10.0).collect(),
            eps_bar: 5.0,
            eps_bar_sweep: (0..10).map(|i| 10f64.powf(-1.0 + i as f64 / 3.0)).collect(),
            delta_dp: 1e-15,
            sensitivity: 1.0,
            workers: 0,
        }
    }
}

fn bad(key: &str, value: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::BadValue {
        key: key.to_owned(),
        value: value.to_owned(),
        reason: reason.into(),
    }
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e: T::Err| bad(key, value, e.to_string()))
}

fn list(key: &str, value: &str) -> Result<Vec<f64>, ConfigError> {
    let out = value
        .split(',')
        .map(|p| num::<f64>(key, p.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    if out.is_empty() {
        return Err(bad(key, value, "sweep must not be empty"));
    }
    Ok(out)
}

impl ExperimentConfig {
    /// Defaults overridden by the `key = value` lines of `text`, validated.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = ExperimentConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                reason: format!("expected `key = value`, got `{line}`"),
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets one key. Call [`ExperimentConfig::validate`] afterwards.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "seed" => self.seed = num(key, value)?,
            "trials" => self.trials = num(key, value)?,
            "n_owners" => self.n_owners = num(key, value)?,
            "sample_size" => self.sample_size = num(key, value)?,
            "family" => self.family = Some(Family::from_name(value).ok_or_else(|| bad(key, value, "unknown family"))?),
            "alpha_lo" => self.alpha_range.0 = num(key, value)?,
            "alpha_hi" => self.alpha_range.1 = num(key, value)?,
            "beta_lo" => self.beta_range.0 = num(key, value)?,
            "beta_hi" => self.beta_range.1 = num(key, value)?,
            "bins" => self.bins = num(key, value)?,
            "delta" => self.delta = num(key, value)?,
            "delta_sweep" => self.delta_sweep = list(key, value)?,
            "population" => {
                self.population =
                    Some(Population::from_name(value).ok_or_else(|| bad(key, value, "expected finite or infinite"))?)
            }
            "rho" => self.rho = Some(value.parse().map_err(|_| bad(key, value, "expected -1, 0 or 1"))?),
            "theta_bar" => self.theta_bar = Some(num(key, value)?),
            "theta_bar_sweep" => self.theta_bar_sweep = list(key, value)?,
            "budget_multiples" => self.budget_multiples = list(key, value)?,
            "eps_bar" => self.eps_bar = num(key, value)?,
            "eps_bar_sweep" => self.eps_bar_sweep = list(key, value)?,
            "delta_dp" => self.delta_dp = num(key, value)?,
            "sensitivity" => self.sensitivity = num(key, value)?,
            "workers" => self.workers = num(key, value)?,
            _ => return Err(ConfigError::UnknownKey(key.to_owned())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |m: String| Err(ConfigError::Invalid(m));
        if self.trials == 0 {
            return fail("trials must be at least 1".into());
        }
        if self.n_owners == 0 || self.n_owners > MAX_OWNERS {
            return fail(format!("n_owners must lie in 1..={MAX_OWNERS}"));
        }
        if self.sample_size < 2 {
            return fail("sample_size must be at least 2".into());
        }
        if self.bins == 0 {
            return fail("bins must be at least 1".into());
        }
        let (a0, a1) = self.alpha_range;
        let (b0, b1) = self.beta_range;
        if !(a0.is_finite() && a1.is_finite() && a0 <= a1) {
            return fail("alpha range must be finite with alpha_lo <= alpha_hi".into());
        }
        if !(b0 > 0.0 && b1.is_finite() && b0 <= b1) {
            return fail("beta range must satisfy 0 < beta_lo <= beta_hi".into());
        }
        let conf = |d: f64| (0.0..1.0).contains(&d);
        if !conf(self.delta) || !self.delta_sweep.iter().all(|&d| conf(d)) {
            return fail("confidence levels must lie in [0, 1)".into());
        }
        let price = |t: f64| t.is_finite() && t >= 0.0;
        if !self.theta_bar.is_none_or(price) || !self.theta_bar_sweep.iter().all(|&t| price(t)) {
            return fail("reserve-price upper bounds must be finite and non-negative".into());
        }
        if !self.budget_multiples.iter().all(|&m| price(m)) {
            return fail("budget multiples must be finite and non-negative".into());
        }
        let eps = |e: f64| e.is_finite() && e > 0.0;
        if !eps(self.eps_bar) || !self.eps_bar_sweep.iter().all(|&e| eps(e)) {
            return fail("privacy-budget upper bounds must be finite and positive".into());
        }
        if !(self.delta_dp > 0.0 && self.delta_dp < 1.0) {
            return fail("delta_dp must lie in (0, 1)".into());
        }
        if !eps(self.sensitivity) {
            return fail("sensitivity must be finite and positive".into());
        }
        for (name, sweep) in [
            ("delta_sweep", &self.delta_sweep),
            ("theta_bar_sweep", &self.theta_bar_sweep),
            ("budget_multiples", &self.budget_multiples),
            ("eps_bar_sweep", &self.eps_bar_sweep),
        ] {
            if sweep.is_empty() {
                return fail(format!("{name} must not be empty"));
            }
        }
        Ok(())
    }

    /// Configured family, else `default`.
    pub fn family_or(&self, default: Family) -> Family {
        self.family.unwrap_or(default)
    }

    pub fn families_or_all(&self) -> Vec<Family> {
        self.family.map_or(Family::ALL.to_vec(), |f| vec![f])
    }

    pub fn rhos_or(&self, default: &[Rho]) -> Vec<Rho> {
        self.rho.map_or(default.to_vec(), |r| vec![r])
    }

    pub fn populations_or(&self, default: &[Population]) -> Vec<Population> {
        self.population.map_or(default.to_vec(), |p| vec![p])
    }
}
