use alloc::vec::Vec;

use super::coalition::{members, CoalitionTable};
use crate::distances::DistanceKind;
use crate::{Error, Result};

/// What a central planner minimises for each coalition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CentralMetric<'a> {
    /// Raw statistical distance to the target.
    Distance(DistanceKind),
    /// Actual loss gap of the table's task at this index.
    Loss(usize),
    /// `K·W(X_P, X_T)`.
    LipschitzWd { k: f64 },
    /// `K·(W(X_P, X_T) + mean_{i∈P} dp_i)` with per-owner DP shifts.
    LipschitzWdDp { k: f64, dp_terms: &'a [f64] },
}

impl CentralMetric<'_> {
    /// Metric value of a nonempty coalition; `None` where the distance is
    /// undefined.
    pub fn value(&self, table: &CoalitionTable, mask: u32) -> Option<f64> {
        let e = table.entry(mask);
        match *self {
            CentralMetric::Distance(kind) => e.distances.get(kind),
            CentralMetric::Loss(task) => e.loss_gaps.get(task).copied(),
            CentralMetric::LipschitzWd { k } => Some(k * e.distances.wd),
            CentralMetric::LipschitzWdDp { k, dp_terms } => {
                let m: Vec<usize> = members(mask, table.n_owners()).collect();
                let shift = m.iter().map(|&i| dp_terms[i]).sum::<f64>() / m.len() as f64;
                Some(k * (e.distances.wd + shift))
            }
        }
    }
}

/// Budget treatment, with the per-owner payment a selected owner receives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BudgetRule<'a> {
    /// `min metric` s.t. `Σ payment ≤ B`.
    Exogenous { budget: f64, payments: &'a [f64] },
    /// `min metric` s.t. `metric + Σ payment ≤ B_ref`, else buy nothing.
    Endogenous { reference_budget: f64, payments: &'a [f64] },
    /// `min(metric + Σ payment, B_ref)`.
    Joint { reference_budget: f64, payments: &'a [f64] },
}

impl<'a> BudgetRule<'a> {
    fn payments(&self) -> &'a [f64] {
        match *self {
            BudgetRule::Exogenous { payments, .. }
            | BudgetRule::Endogenous { payments, .. }
            | BudgetRule::Joint { payments, .. } => payments,
        }
    }

    /// Objective of a coalition with the given metric and total payment, or
    /// `None` when it breaks the budget.
    fn objective(&self, metric: f64, pay: f64) -> Option<f64> {
        match *self {
            BudgetRule::Exogenous { budget, .. } => (pay <= budget).then_some(metric),
            BudgetRule::Endogenous { reference_budget, .. } => (metric + pay <= reference_budget).then_some(metric),
            BudgetRule::Joint { .. } => Some(metric + pay),
        }
    }

    fn outside(&self) -> Option<f64> {
        match *self {
            BudgetRule::Exogenous { .. } => None,
            BudgetRule::Endogenous { reference_budget, .. } | BudgetRule::Joint { reference_budget, .. } => {
                Some(reference_budget)
            }
        }
    }
}

/// Selection of a central solver. `mask == 0` means nothing was bought.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralResult {
    pub mask: u32,
    /// Objective under the budget rule; `B_ref` for the outside option.
    pub objective: f64,
    /// Metric of the selected coalition, zero when none.
    pub metric: f64,
    pub payment: f64,
    /// False when an exogenous budget admits no coalition.
    pub feasible: bool,
}

impl CentralResult {
    pub fn bought_nothing(&self) -> bool {
        self.mask == 0
    }
}

fn check_payments(table: &CoalitionTable, rule: &BudgetRule) -> Result<()> {
    if rule.payments().len() != table.n_owners() {
        return Err(Error::SizeMismatch {
            expected: table.n_owners(),
            found: rule.payments().len(),
        });
    }
    Ok(())
}

fn total_payment(payments: &[f64], mask: u32) -> f64 {
    members(mask, payments.len()).map(|i| payments[i]).sum()
}

/// Full-information optimum over every nonempty coalition, with the same
/// tie-break as the mechanisms: lowest objective, fewest owners, then the
/// lexicographically smallest set. Coalitions whose metric is undefined are
/// skipped.
pub fn solve_central(table: &CoalitionTable, metric: CentralMetric, rule: BudgetRule) -> Result<CentralResult> {
    check_payments(table, &rule)?;
    if let CentralMetric::LipschitzWdDp { dp_terms, .. } = metric {
        if dp_terms.len() != table.n_owners() {
            return Err(Error::SizeMismatch {
                expected: table.n_owners(),
                found: dp_terms.len(),
            });
        }
    }
    let payments = rule.payments();
    let mut best: Option<CentralResult> = None;
    for mask in table.masks() {
        let Some(m) = metric.value(table, mask) else {
            continue;
        };
        let pay = total_payment(payments, mask);
        let Some(objective) = rule.objective(m, pay) else {
            continue;
        };
        let cand = CentralResult {
            mask,
            objective,
            metric: m,
            payment: pay,
            feasible: true,
        };
        if best.is_none_or(|b| beats(&cand, &b)) {
            best = Some(cand);
        }
    }
    let outside = rule.outside().map(|b| CentralResult {
        mask: 0,
        objective: b,
        metric: 0.0,
        payment: 0.0,
        feasible: true,
    });
    Ok(match (best, outside) {
        (Some(b), Some(o)) if beats(&o, &b) => o,
        (Some(b), _) => b,
        (None, Some(o)) => o,
        (None, None) => CentralResult {
            mask: 0,
            objective: f64::INFINITY,
            metric: 0.0,
            payment: 0.0,
            feasible: false,
        },
    })
}

fn beats(a: &CentralResult, b: &CentralResult) -> bool {
    let tol = 1e-12 * a.objective.abs().max(b.objective.abs()).max(1.0);
    if a.objective < b.objective - tol {
        return true;
    }
    if a.objective > b.objective + tol {
        return false;
    }
    let (sa, sb) = (a.mask.count_ones(), b.mask.count_ones());
    if sa != sb {
        return sa < sb;
    }
    let diff = a.mask ^ b.mask;
    diff != 0 && a.mask & (1 << diff.trailing_zeros()) != 0
}

/// Mean metric over the coalitions the budget admits, or `None` if none.
pub fn solve_random(table: &CoalitionTable, metric: CentralMetric, rule: BudgetRule) -> Result<Option<f64>> {
    check_payments(table, &rule)?;
    let payments = rule.payments();
    let (mut sum, mut count) = (0.0, 0usize);
    for mask in table.masks() {
        let Some(m) = metric.value(table, mask) else {
            continue;
        };
        if rule.objective(m, total_payment(payments, mask)).is_some() {
            sum += m;
            count += 1;
        }
    }
    Ok((count > 0).then(|| sum / count as f64))
}
