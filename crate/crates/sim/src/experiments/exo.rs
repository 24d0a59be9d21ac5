//! Exogenous-budget procurement: benchmark comparison, alternative
//! distances and DP-aware valuations.

use wdmarket::benchmarks::{members, solve_central, solve_ptas, solve_random, solve_smq, BudgetRule, CentralMetric};
use wdmarket::distances::DistanceKind;
use wdmarket::distributions::{add_dp_noise_draws, aggregate_euclidean, DpParams, Draws, Family};
use wdmarket::mechanisms::Mechanism;
use wdmarket::tasks::{expected_loss, TaskKind};
use wdmarket::valuation::{GaussianTarget, OwnerProfile, Population, ValuationVariant};

use super::{per_trial, population_label, run_mechanism, summary, Context};
use crate::coupling::{couple_ranks, Rho};
use crate::output::Table;
use crate::trials::Trial;
use crate::HarnessError;

/// Budget of the DP experiment as a fraction of `θ̄N`.
const DP_BUDGET_MULTIPLE: f64 = 0.2;

/// A per-trial metric and the selection size behind it.
type Scored = (f64, f64);

/// One selection: chosen owners (`None` for the random benchmark, which is
/// an average) and its score.
#[derive(Debug, Clone, Copy)]
struct Pick {
    mask: Option<u32>,
    n_selected: f64,
    score: f64,
    payment: f64,
}

impl Pick {
    fn of_mask(mask: u32, score: f64, payment: f64) -> Self {
        Pick {
            mask: Some(mask),
            n_selected: mask.count_ones() as f64,
            score: if mask == 0 { f64::NAN } else { score },
            payment,
        }
    }
}

fn reserves(t: &Trial, values: &[f64], theta_bar: f64, rho: Rho) -> Vec<f64> {
    let draws: Vec<f64> = t.reserve_u.iter().map(|u| theta_bar * u).collect();
    couple_ranks(values, &draws, rho)
}

/// Mean metric and mean size over the coalitions with `Σθ ≤ budget`.
fn random_pick(t: &Trial, theta: &[f64], budget: f64) -> Result<Pick, HarnessError> {
    let rule = BudgetRule::Exogenous {
        budget,
        payments: theta,
    };
    let score = solve_random(&t.table, CentralMetric::Distance(DistanceKind::Wd), rule)?;
    let n = t.n_owners();
    let sizes: Vec<f64> = t
        .table
        .masks()
        .filter(|&m| members(m, n).map(|i| theta[i]).sum::<f64>() <= budget)
        .map(|m| m.count_ones() as f64)
        .collect();
    Ok(Pick {
        mask: None,
        n_selected: if sizes.is_empty() {
            0.0
        } else {
            wdmarket::stats::mean(&sizes)
        },
        score: score.unwrap_or(f64::NAN),
        payment: f64::NAN,
    })
}

pub(super) fn proc_exo(ctx: &mut Context) -> Result<Vec<Table>, HarnessError> {
    let cfg = ctx.cfg;
    let set = ctx.trials(cfg.family_or(Family::Gaussian))?;
    let theta_bar = cfg.theta_bar.unwrap_or(1.0);
    let n = cfg.n_owners;
    let pops = cfg.populations_or(&[Population::Finite, Population::Infinite]);
    let mut names = vec!["cen", "rand", "smq", "ptas"];
    names.extend(pops.iter().map(|&p| population_label(p)));

    let mut out = Vec::new();
    for rho in cfg.rhos_or(&Rho::ALL) {
        // [trial][budget][mechanism]
        let picks: Vec<Vec<Vec<Pick>>> = per_trial(&set, |t| {
            let w = t.w();
            let theta = reserves(t, &w, theta_bar, rho);
            let values: Vec<f64> = w.iter().map(|d| 1.0 / d).collect();
            let wd = |m: u32| {
                if m == 0 {
                    f64::NAN
                } else {
                    t.table.entry(m).distances.wd
                }
            };
            cfg.budget_multiples
                .iter()
                .map(|mult| {
                    let budget = mult * theta_bar * n as f64;
                    let cen = solve_central(
                        &t.table,
                        CentralMetric::Distance(DistanceKind::Wd),
                        BudgetRule::Exogenous {
                            budget,
                            payments: &theta,
                        },
                    )?;
                    let smq = solve_smq(&values, &vec![theta_bar; n], budget, &theta)?;
                    let ptas = solve_ptas(&theta, &w, budget)?;
                    let mut row = vec![
                        Pick::of_mask(cen.mask, wd(cen.mask), cen.payment),
                        random_pick(t, &theta, budget)?,
                        Pick::of_mask(smq.accepted_mask(), wd(smq.accepted_mask()), smq.total_payment()),
                        Pick::of_mask(ptas.mask(), wd(ptas.mask()), ptas.total_payment()),
                    ];
                    for &pop in &pops {
                        let r = run_mechanism(&w, theta_bar, &theta, Mechanism::Exogenous { budget }, cfg.delta, pop)?;
                        row.push(Pick::of_mask(r.mask(), wd(r.mask()), r.total_payment()));
                    }
                    Ok(row)
                })
                .collect()
        })?;

        let mut table = Table::new(
            format!("proc_exo_rho_{}", rho.tag()),
            &["budget", "mechanism", "mean_wd", "ci_lo", "ci_hi", "mean_n_selected"],
        );
        let mut records = Table::new(
            format!("proc_exo_trials_rho_{}", rho.tag()),
            &["trial", "budget", "mechanism", "mask", "n_selected", "wd", "payment"],
        );
        for (bi, mult) in cfg.budget_multiples.iter().enumerate() {
            let budget = mult * theta_bar * n as f64;
            for (mi, name) in names.iter().enumerate() {
                let col: Vec<Pick> = picks.iter().map(|p| p[bi][mi]).collect();
                let [m, lo, hi] = summary(&col.iter().map(|p| p.score).collect::<Vec<_>>());
                let sizes: Vec<f64> = col.iter().map(|p| p.n_selected).collect();
                table.push(vec![
                    budget.into(),
                    (*name).into(),
                    m,
                    lo,
                    hi,
                    wdmarket::stats::mean(&sizes).into(),
                ]);
                for (ti, p) in col.iter().enumerate() {
                    records.push(vec![
                        ti.into(),
                        budget.into(),
                        (*name).into(),
                        p.mask.map_or(-1, |m| m as i64).into(),
                        p.n_selected.into(),
                        p.score.into(),
                        p.payment.into(),
                    ]);
                }
            }
        }
        out.push(table);
        out.push(records);
    }
    Ok(out)
}

/// Individual distances with undefined entries replaced by the largest
/// defined one; `None` if no owner has a defined distance.
fn filled_distances(t: &Trial, kind: DistanceKind) -> Option<Vec<f64>> {
    let raw = t.individual_distances(kind);
    let worst = raw.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
    if !worst.is_finite() {
        return None;
    }
    Some(raw.into_iter().map(|d| d.unwrap_or(worst)).collect())
}

pub(super) fn proc_exo_dist(ctx: &mut Context) -> Result<Vec<Table>, HarnessError> {
    let cfg = ctx.cfg;
    let set = ctx.trials(cfg.family_or(Family::Gaussian))?;
    let theta_bar = cfg.theta_bar.unwrap_or(1.0);
    let n = cfg.n_owners;
    let pop = cfg.population.unwrap_or(Population::Finite);
    let mech_names = ["cen", population_label(pop)];

    let mut out = Vec::new();
    for rho in cfg.rhos_or(&Rho::ALL) {
        // [trial][budget][distance][mechanism] -> (improvement, size)
        let res: Vec<Vec<Vec<[Scored; 2]>>> = per_trial(&set, |t| {
            let rmse = t.task_index(TaskKind::MeanRmse);
            let worst = t
                .table
                .masks()
                .map(|m| t.loss(m, rmse))
                .fold(f64::NEG_INFINITY, f64::max);
            let improvement = |m: u32| {
                if m == 0 {
                    f64::NAN
                } else {
                    (worst - t.loss(m, rmse)) / worst
                }
            };
            // prices follow the WD ranking in every distance panel
            let theta = reserves(t, &t.w(), theta_bar, rho);
            cfg.budget_multiples
                .iter()
                .map(|mult| {
                    let budget = mult * theta_bar * n as f64;
                    DistanceKind::ALL
                        .iter()
                        .map(|&kind| {
                            let cen = solve_central(
                                &t.table,
                                CentralMetric::Distance(kind),
                                BudgetRule::Exogenous {
                                    budget,
                                    payments: &theta,
                                },
                            )?;
                            let mech = match filled_distances(t, kind) {
                                Some(d) => {
                                    let r = run_mechanism(
                                        &d,
                                        theta_bar,
                                        &theta,
                                        Mechanism::Exogenous { budget },
                                        cfg.delta,
                                        pop,
                                    )?;
                                    (improvement(r.mask()), r.n_selected() as f64)
                                }
                                None => (f64::NAN, 0.0),
                            };
                            Ok([(improvement(cen.mask), cen.mask.count_ones() as f64), mech])
                        })
                        .collect()
                })
                .collect()
        })?;

        let mut table = Table::new(
            format!("proc_exo_dist_rho_{}", rho.tag()),
            &[
                "budget",
                "distance",
                "mechanism",
                "mean_improvement",
                "ci_lo",
                "ci_hi",
                "mean_n_selected",
            ],
        );
        for (bi, mult) in cfg.budget_multiples.iter().enumerate() {
            for (ki, kind) in DistanceKind::ALL.iter().enumerate() {
                for (mi, name) in mech_names.iter().enumerate() {
                    let imp: Vec<f64> = res.iter().map(|r| r[bi][ki][mi].0).collect();
                    let sizes: Vec<f64> = res.iter().map(|r| r[bi][ki][mi].1).collect();
                    let [m, lo, hi] = summary(&imp);
                    table.push(vec![
                        (mult * theta_bar * n as f64).into(),
                        kind.name().into(),
                        (*name).into(),
                        m,
                        lo,
                        hi,
                        wdmarket::stats::mean(&sizes).into(),
                    ]);
                }
            }
        }
        out.push(table);
    }
    Ok(out)
}

pub(super) fn proc_dp(ctx: &mut Context) -> Result<Vec<Table>, HarnessError> {
    let cfg = ctx.cfg;
    let family = cfg.family_or(Family::Gaussian);
    let set = ctx.trials(family)?;
    let theta_bar = cfg.theta_bar.unwrap_or(1.0);
    let n = cfg.n_owners;
    let budget = DP_BUDGET_MULTIPLE * theta_bar * n as f64;
    let pop = cfg.population.unwrap_or(Population::Finite);
    let rhos = cfg.rhos_or(&Rho::ALL);
    let variants: Vec<ValuationVariant> = ValuationVariant::ALL
        .into_iter()
        .filter(|v| family == Family::Gaussian || *v != ValuationVariant::ExactDpGaussian)
        .collect();

    // [trial][eps][rho][variant] -> (rmse, size)
    let res: Vec<Vec<Vec<Vec<Scored>>>> = per_trial(&set, |t| {
        let rmse = t.task_index(TaskKind::MeanRmse);
        let spec = t.table.tasks()[rmse];
        let param = t.target_losses[rmse].param;
        let target = GaussianTarget::of_aggregate(&t.specs).ok();
        let w = t.w();
        cfg.eps_bar_sweep
            .iter()
            .map(|&eps_bar| {
                let eps: Vec<f64> = t.epsilon_u.iter().map(|u| eps_bar * u).collect();
                let dp = eps
                    .iter()
                    .map(|&e| DpParams::gaussian(e, cfg.delta_dp, cfg.sensitivity))
                    .collect::<wdmarket::Result<Vec<_>>>()?;
                let mut noisy: Vec<Option<Draws>> = vec![None; n];
                let mut score = |mask: u32| -> Result<f64, HarnessError> {
                    if mask == 0 {
                        return Ok(f64::NAN);
                    }
                    for i in members(mask, n) {
                        if noisy[i].is_none() {
                            noisy[i] = Some(add_dp_noise_draws(&t.draws[i], &dp[i], &mut t.dp_noise_stream(i))?);
                        }
                    }
                    let parts: Vec<&Draws> = members(mask, n).map(|i| noisy[i].as_ref().expect("filled")).collect();
                    Ok(expected_loss(&aggregate_euclidean(&parts)?, &spec, param))
                };
                rhos.iter()
                    .map(|&rho| {
                        let theta = reserves(t, &eps, theta_bar, rho);
                        variants
                            .iter()
                            .map(|&variant| {
                                let v = (0..n)
                                    .map(|i| {
                                        OwnerProfile::new(i, t.specs[i], w[i], dp[i], theta[i], variant, target)
                                            .map(|o| o.w_effective)
                                    })
                                    .collect::<wdmarket::Result<Vec<_>>>()?;
                                let r = run_mechanism(
                                    &v,
                                    theta_bar,
                                    &theta,
                                    Mechanism::Exogenous { budget },
                                    cfg.delta,
                                    pop,
                                )?;
                                Ok((score(r.mask())?, r.n_selected() as f64))
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    })?;

    let mut out = Vec::new();
    for (ri, rho) in rhos.iter().enumerate() {
        let mut table = Table::new(
            format!("proc_dp_rho_{}", rho.tag()),
            &["eps_bar", "variant", "mean_rmse", "ci_lo", "ci_hi", "mean_n_selected"],
        );
        for (ei, eps_bar) in cfg.eps_bar_sweep.iter().enumerate() {
            for (vi, variant) in variants.iter().enumerate() {
                let scores: Vec<f64> = res.iter().map(|r| r[ei][ri][vi].0).collect();
                let sizes: Vec<f64> = res.iter().map(|r| r[ei][ri][vi].1).collect();
                let [m, lo, hi] = summary(&scores);
                table.push(vec![
                    (*eps_bar).into(),
                    variant.name().into(),
                    m,
                    lo,
                    hi,
                    wdmarket::stats::mean(&sizes).into(),
                ]);
            }
        }
        out.push(table);
    }
    Ok(out)
}
