//! Parameter-estimation tasks and their losses.
//!
//! A task loss is the expectation of a per-record loss `l(x; θ)` whose
//! parameter θ is estimated on the target. `L(X) = E_X[l(x; θ_T)]`, so the
//! gap `L(X_P) − L(X_T)` is a difference of expectations of one fixed
//! function and obeys `|gap| ≤ K·W(X_P, X_T)` whenever `l` is `K`-Lipschitz
//! in `x`. RMSE takes a square root of an expectation and is not Lipschitz
//! in that sense, which is why its gap can exceed the bound.

use alloc::string::String;
use core::fmt;

use crate::distances::wasserstein1;
use crate::distributions::EmpiricalSample;
use crate::{Error, Result};

/// Absolute slack allowed before a Lipschitz violation is reported.
pub const VIOLATION_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TaskKind {
    /// Mean estimation scored by RMSE.
    MeanRmse,
    /// Median estimation scored by MAE.
    MedianMae,
    /// τ-quantile estimation scored by the mean pinball loss.
    QuantileMpl { tau: f64 },
    /// Newsvendor order quantity with under/over-stocking unit costs.
    Newsvendor { under: f64, over: f64 },
}

impl TaskKind {
    pub const DEFAULT_NEWSVENDOR: TaskKind = TaskKind::Newsvendor { under: 0.9, over: 0.1 };

    pub fn validated(self) -> Result<Self> {
        match self {
            TaskKind::QuantileMpl { tau } if !(tau > 0.0 && tau < 1.0) => {
                Err(Error::param("tau", "must lie in (0, 1)"))
            }
            TaskKind::Newsvendor { under, over } if !(under > 0.0 && over > 0.0) => {
                Err(Error::param("newsvendor costs", "must be strictly positive"))
            }
            other => Ok(other),
        }
    }

    /// Short stable identifier, e.g. `mae`, `mpl_0.9`, `nv`.
    pub fn label(&self) -> String {
        use core::fmt::Write;
        let mut s = String::new();
        let _ = match self {
            TaskKind::MeanRmse => write!(s, "rmse"),
            TaskKind::MedianMae => write!(s, "mae"),
            TaskKind::QuantileMpl { tau } => write!(s, "mpl_{tau}"),
            TaskKind::Newsvendor { under, over } => {
                if *self == TaskKind::DEFAULT_NEWSVENDOR {
                    write!(s, "nv")
                } else {
                    write!(s, "nv_{under}_{over}")
                }
            }
        };
        s
    }

    pub fn parse(label: &str) -> Option<Self> {
        match label {
            "rmse" => Some(TaskKind::MeanRmse),
            "mae" => Some(TaskKind::MedianMae),
            "nv" => Some(TaskKind::DEFAULT_NEWSVENDOR),
            _ => {
                if let Some(rest) = label.strip_prefix("mpl_") {
                    let tau = rest.parse().ok()?;
                    TaskKind::QuantileMpl { tau }.validated().ok()
                } else if let Some(rest) = label.strip_prefix("nv_") {
                    let (u, o) = rest.split_once('_')?;
                    TaskKind::Newsvendor {
                        under: u.parse().ok()?,
                        over: o.parse().ok()?,
                    }
                    .validated()
                    .ok()
                } else {
                    None
                }
            }
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Conventional Lipschitz constant of the per-record loss.
///
/// RMSE is not Lipschitz for unbounded data; 1 is used by convention.
pub fn lipschitz_constant(kind: TaskKind) -> f64 {
    match kind {
        TaskKind::MeanRmse | TaskKind::MedianMae => 1.0,
        TaskKind::QuantileMpl { tau } => tau.max(1.0 - tau),
        TaskKind::Newsvendor { under, over } => under.max(over),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaskSpec {
    pub kind: TaskKind,
    pub k_lipschitz: f64,
}

impl TaskSpec {
    pub fn new(kind: TaskKind) -> Result<Self> {
        let kind = kind.validated()?;
        Ok(TaskSpec {
            kind,
            k_lipschitz: lipschitz_constant(kind),
        })
    }

    pub fn with_lipschitz(kind: TaskKind, k: f64) -> Result<Self> {
        if !(k > 0.0) {
            return Err(Error::param("k_lipschitz", "must be strictly positive"));
        }
        Ok(TaskSpec {
            kind: kind.validated()?,
            k_lipschitz: k,
        })
    }
}

/// The estimator behind `task`, applied to `sample`.
pub fn estimate_parameter(sample: &EmpiricalSample, task: &TaskSpec) -> f64 {
    match task.kind {
        TaskKind::MeanRmse => sample.mean(),
        TaskKind::MedianMae => sample.quantile(0.5),
        TaskKind::QuantileMpl { tau } => sample.quantile(tau),
        TaskKind::Newsvendor { under, over } => sample.quantile(under / (under + over)),
    }
}

fn pinball(residual: f64, tau: f64) -> f64 {
    if residual >= 0.0 {
        tau * residual
    } else {
        (tau - 1.0) * residual
    }
}

/// Expected task loss of `param` over `data`.
pub fn expected_loss(data: &EmpiricalSample, task: &TaskSpec, param: f64) -> f64 {
    let xs = data.values();
    let n = xs.len() as f64;
    match task.kind {
        TaskKind::MeanRmse => libm::sqrt(xs.iter().map(|x| (x - param) * (x - param)).sum::<f64>() / n),
        TaskKind::MedianMae => xs.iter().map(|x| (x - param).abs()).sum::<f64>() / n,
        TaskKind::QuantileMpl { tau } => xs.iter().map(|x| pinball(x - param, tau)).sum::<f64>() / n,
        TaskKind::Newsvendor { under, over } => {
            xs.iter()
                .map(|x| under * (x - param).max(0.0) + over * (param - x).max(0.0))
                .sum::<f64>()
                / n
        }
    }
}

/// `L(X_T)` together with the target-estimated parameter it is scored at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetLoss {
    pub param: f64,
    pub loss: f64,
}

impl TargetLoss {
    pub fn new(target: &EmpiricalSample, task: &TaskSpec) -> Self {
        let param = estimate_parameter(target, task);
        TargetLoss {
            param,
            loss: expected_loss(target, task, param),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossReport {
    /// `L(X_P)`.
    pub loss_p: f64,
    /// `L(X_T)`.
    pub loss_t: f64,
    /// `loss_p − loss_t`.
    pub gap: f64,
    /// `K · W(X_P, X_T)`.
    pub lipschitz_rhs: f64,
    pub violated: bool,
}

/// Loss gap of `coalition` against `target` and the Lipschitz check.
pub fn loss_gap(coalition: &EmpiricalSample, target: &EmpiricalSample, task: &TaskSpec) -> LossReport {
    let tl = TargetLoss::new(target, task);
    loss_gap_with(coalition, target, task, &tl, wasserstein1(coalition, target))
}

/// [`loss_gap`] with the target loss and the WD already known.
pub fn loss_gap_with(
    coalition: &EmpiricalSample,
    _target: &EmpiricalSample,
    task: &TaskSpec,
    target_loss: &TargetLoss,
    wd: f64,
) -> LossReport {
    let loss_p = expected_loss(coalition, task, target_loss.param);
    let gap = loss_p - target_loss.loss;
    let lipschitz_rhs = task.k_lipschitz * wd;
    LossReport {
        loss_p,
        loss_t: target_loss.loss,
        gap,
        lipschitz_rhs,
        violated: gap > lipschitz_rhs + VIOLATION_SLACK,
    }
}
