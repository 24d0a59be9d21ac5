//! Approximation ladder: the joint-optimisation cost under progressively
//! coarser information, from a Shapley cooperative game down to the
//! Hoeffding-bound mechanisms.

use wdmarket::benchmarks::{
    loss_value_fn, shap_cg_benchmark, solve_central, ApproximationLevel, BudgetRule, CentralMetric,
};
use wdmarket::distributions::{DpParams, Family};
use wdmarket::mechanisms::Mechanism;
use wdmarket::stats::quantile_linear;
use wdmarket::tasks::TaskKind;
use wdmarket::valuation::{dp_wd_term, OwnerProfile, Population, ValuationVariant};

use super::endo::{reserves, Outcome};
use super::{per_trial, run_mechanism, summary, uniform_virtual_costs, Context};
use crate::coupling::Rho;
use crate::output::Table;
use crate::HarnessError;

const APPROX_TASKS: [TaskKind; 3] = [
    TaskKind::MedianMae,
    TaskKind::MeanRmse,
    TaskKind::QuantileMpl { tau: 0.9 },
];

pub(super) fn proc_approx(ctx: &mut Context) -> Result<Vec<Table>, HarnessError> {
    let cfg = ctx.cfg;
    let set = ctx.trials(cfg.family_or(Family::Gaussian))?;
    let theta_bar = cfg.theta_bar.unwrap_or(0.8);
    let rho = cfg.rho.unwrap_or(Rho::Independent);
    let n = cfg.n_owners;
    let levels = ApproximationLevel::ALL;

    // [trial][task][level]
    let res: Vec<Vec<Vec<Outcome>>> = per_trial(&set, |t| {
        let theta = reserves(t, theta_bar, rho);
        let psi = uniform_virtual_costs(theta_bar, &theta)?;
        let dp = t
            .epsilon_u
            .iter()
            .map(|u| DpParams::gaussian(cfg.eps_bar * u, cfg.delta_dp, cfg.sensitivity))
            .collect::<wdmarket::Result<Vec<_>>>()?;
        let dp_terms = dp.iter().map(dp_wd_term).collect::<wdmarket::Result<Vec<_>>>()?;
        let w = t.w();
        let w_dp = (0..n)
            .map(|i| {
                OwnerProfile::new(
                    i,
                    t.specs[i],
                    w[i],
                    dp[i],
                    theta[i],
                    ValuationVariant::UpperBoundDp,
                    None,
                )
                .map(|o| o.w_effective)
            })
            .collect::<wdmarket::Result<Vec<_>>>()?;
        APPROX_TASKS
            .iter()
            .map(|&kind| {
                let task = t.task_index(kind);
                let k = t.table.tasks()[task].k_lipschitz;
                let b_ref = t.reference_budget(task);
                let joint = |payments| BudgetRule::Joint {
                    reference_budget: b_ref,
                    payments,
                };
                let central = |metric, payments| -> Result<Outcome, HarnessError> {
                    let r = solve_central(&t.table, metric, joint(payments))?;
                    Ok(Outcome::from_central(t, task, b_ref, &r))
                };
                let mechanism = |pop| -> Result<Outcome, HarnessError> {
                    let m = Mechanism::Joint {
                        reference_budget: b_ref,
                        k,
                    };
                    let r = run_mechanism(&w_dp, theta_bar, &theta, m, cfg.delta, pop)?;
                    Ok(Outcome::from_mechanism(t, task, b_ref, &r, 1.0))
                };
                levels
                    .iter()
                    .map(|level| match level {
                        ApproximationLevel::Shap => {
                            // the buyer takes everything, the full loss gap is 0
                            let cg = shap_cg_benchmark(n, loss_value_fn(&t.table, task), 0.0)?;
                            let full = t.table.full_mask();
                            Ok(Outcome {
                                mask: full,
                                outside: false,
                                b_ref,
                                modelled_loss: 0.0,
                                payment: cg.total_cost,
                                omega_hat: cg.total_cost,
                                omega: cg.total_cost,
                            })
                        }
                        ApproximationLevel::CenIr => central(CentralMetric::Loss(task), &theta),
                        ApproximationLevel::CenIc => central(CentralMetric::Loss(task), &psi),
                        ApproximationLevel::CenW => central(CentralMetric::LipschitzWd { k }, &psi),
                        ApproximationLevel::CenDp => {
                            central(CentralMetric::LipschitzWdDp { k, dp_terms: &dp_terms }, &psi)
                        }
                        ApproximationLevel::Fin => mechanism(Population::Finite),
                        ApproximationLevel::Inf => mechanism(Population::Infinite),
                    })
                    .collect()
            })
            .collect()
    })?;

    let mut table = Table::new(
        "proc_approx",
        &[
            "task",
            "level",
            "mean_omega",
            "ci_lo",
            "ci_hi",
            "q1_omega",
            "median_omega",
            "q3_omega",
            "mean_b_ref",
            "mean_improvement",
            "mean_n_selected",
        ],
    );
    let mut records = Table::new(
        "proc_approx_trials",
        &[
            "task",
            "trial",
            "level",
            "mask",
            "n_selected",
            "outside",
            "b_ref",
            "payment",
            "omega",
        ],
    );
    for (ti, kind) in APPROX_TASKS.iter().enumerate() {
        for (li, level) in levels.iter().enumerate() {
            let col: Vec<Outcome> = res.iter().map(|r| r[ti][li]).collect();
            let omega: Vec<f64> = col.iter().map(|o| o.omega).collect();
            let [m, lo, hi] = summary(&omega);
            table.push(vec![
                kind.label().into(),
                level.name().into(),
                m,
                lo,
                hi,
                quantile_linear(&omega, 0.25).into(),
                quantile_linear(&omega, 0.5).into(),
                quantile_linear(&omega, 0.75).into(),
                super::finite_mean(&col.iter().map(|o| o.b_ref).collect::<Vec<_>>()).into(),
                super::finite_mean(&col.iter().map(|o| o.improvement()).collect::<Vec<_>>()).into(),
                super::finite_mean(&col.iter().map(|o| o.mask.count_ones() as f64).collect::<Vec<_>>()).into(),
            ]);
            for (trial, o) in col.iter().enumerate() {
                records.push(vec![
                    kind.label().into(),
                    trial.into(),
                    level.name().into(),
                    (o.mask as usize).into(),
                    (o.mask.count_ones() as usize).into(),
                    o.outside.into(),
                    o.b_ref.into(),
                    o.payment.into(),
                    o.omega.into(),
                ]);
            }
        }
    }
    Ok(vec![table, records])
}
