//! Endogenous-budget and joint procurement, and the δ risk sweep.

use wdmarket::benchmarks::{solve_central, BudgetRule, CentralMetric, CentralResult};
use wdmarket::distributions::Family;
use wdmarket::mechanisms::{Mechanism, MechanismResult};
use wdmarket::tasks::TaskKind;
use wdmarket::valuation::Population;

use super::{fraction, per_trial, population_label, run_mechanism, summary, uniform_virtual_costs, Context};
use crate::coupling::{couple_ranks, Rho};
use crate::output::Table;
use crate::trials::Trial;
use crate::HarnessError;

/// Costs of one procurement decision against the reference budget.
#[derive(Debug, Clone, Copy)]
pub(super) struct Outcome {
    pub mask: u32,
    pub outside: bool,
    pub b_ref: f64,
    /// Loss the decision rule believed it would incur.
    pub modelled_loss: f64,
    pub payment: f64,
    /// `Ω̂`; `B_ref` when nothing was bought.
    pub omega_hat: f64,
    /// `Ω = (L(X_P) − L(X_T)) + Σt`; `B_ref` when nothing was bought.
    pub omega: f64,
}

impl Outcome {
    /// `scale` multiplies the mechanism's modelled loss; the exogenous
    /// mechanism models with `K = 1`.
    pub fn from_mechanism(t: &Trial, task: usize, b_ref: f64, r: &MechanismResult, scale: f64) -> Self {
        let mask = r.mask();
        let modelled_loss = scale * r.v_bound;
        Self::build(t, task, b_ref, mask, modelled_loss, r.total_payment())
    }

    pub fn from_central(t: &Trial, task: usize, b_ref: f64, r: &CentralResult) -> Self {
        Self::build(t, task, b_ref, r.mask, r.metric, r.payment)
    }

    fn build(t: &Trial, task: usize, b_ref: f64, mask: u32, modelled_loss: f64, payment: f64) -> Self {
        let outside = mask == 0;
        Outcome {
            mask,
            outside,
            b_ref,
            modelled_loss,
            payment,
            omega_hat: if outside { b_ref } else { modelled_loss + payment },
            omega: if outside { b_ref } else { t.gap(mask, task) + payment },
        }
    }

    pub fn improvement(&self) -> f64 {
        1.0 - self.omega / self.b_ref
    }
}

/// Reserve prices coupled to the individual WDs.
pub(super) fn reserves(t: &Trial, theta_bar: f64, rho: Rho) -> Vec<f64> {
    let draws: Vec<f64> = t.reserve_u.iter().map(|u| theta_bar * u).collect();
    couple_ranks(&t.w(), &draws, rho)
}

pub(super) const ENDO_TASKS: [TaskKind; 4] = [
    TaskKind::MeanRmse,
    TaskKind::MedianMae,
    TaskKind::QuantileMpl { tau: 0.9 },
    TaskKind::QuantileMpl { tau: 0.8 },
];

#[derive(Debug, Clone, Copy, PartialEq)]
enum Scheme {
    /// Point-wise mechanism, exogenous budget `B_ref`.
    Exogenous(Population),
    Endogenous(Population),
    Joint(Population),
    /// Central with actual losses under the endogenous or joint rule.
    CenLoss {
        joint: bool,
    },
    /// Central with `K·W`.
    CenWd {
        joint: bool,
    },
}

impl Scheme {
    fn name(self, tag_population: bool) -> String {
        let with = |base: &str, p: Population| {
            if tag_population {
                format!("{base}_{}", population_label(p))
            } else {
                base.to_owned()
            }
        };
        match self {
            Scheme::Exogenous(p) => with("exogenous", p),
            Scheme::Endogenous(p) => with("endogenous", p),
            Scheme::Joint(p) => with("joint", p),
            Scheme::CenLoss { .. } => "cen_m".to_owned(),
            Scheme::CenWd { .. } => "cen_w".to_owned(),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn run(
        self,
        t: &Trial,
        task: usize,
        k: f64,
        b_ref: f64,
        theta_bar: f64,
        theta: &[f64],
        psi: &[f64],
        delta: f64,
    ) -> Result<Outcome, HarnessError> {
        let w = t.w();
        let mech = |m: Mechanism, p: Population, scale: f64| -> Result<Outcome, HarnessError> {
            let r = run_mechanism(&w, theta_bar, theta, m, delta, p)?;
            Ok(Outcome::from_mechanism(t, task, b_ref, &r, scale))
        };
        let central = |metric: CentralMetric, joint: bool| -> Result<Outcome, HarnessError> {
            let rule = if joint {
                BudgetRule::Joint {
                    reference_budget: b_ref,
                    payments: psi,
                }
            } else {
                BudgetRule::Endogenous {
                    reference_budget: b_ref,
                    payments: psi,
                }
            };
            Ok(Outcome::from_central(
                t,
                task,
                b_ref,
                &solve_central(&t.table, metric, rule)?,
            ))
        };
        match self {
            Scheme::Exogenous(p) => mech(Mechanism::Exogenous { budget: b_ref }, p, k),
            Scheme::Endogenous(p) => mech(
                Mechanism::Endogenous {
                    reference_budget: b_ref,
                    k,
                },
                p,
                1.0,
            ),
            Scheme::Joint(p) => mech(
                Mechanism::Joint {
                    reference_budget: b_ref,
                    k,
                },
                p,
                1.0,
            ),
            Scheme::CenLoss { joint } => central(CentralMetric::Loss(task), joint),
            Scheme::CenWd { joint } => central(CentralMetric::LipschitzWd { k }, joint),
        }
    }
}

/// One sweep point: a task, a correlation scenario, θ̄ and δ.
#[derive(Debug, Clone, Copy)]
struct Point {
    task: TaskKind,
    rho: Rho,
    theta_bar: f64,
    delta: f64,
}

const COLUMNS: [&str; 16] = [
    "task",
    "rho",
    "theta_bar",
    "delta",
    "mechanism",
    "mean_b_ref",
    "mean_modelled_loss",
    "mean_omega_hat",
    "mean_omega",
    "mean_improvement",
    "ci_lo",
    "ci_hi",
    "mean_error_vs_cen_m",
    "mean_n_selected",
    "frac_outside",
    "frac_omega_within_budget",
];

const RECORD_COLUMNS: [&str; 14] = [
    "task",
    "rho",
    "theta_bar",
    "delta",
    "trial",
    "mechanism",
    "mask",
    "n_selected",
    "outside",
    "b_ref",
    "modelled_loss",
    "payment",
    "omega_hat",
    "omega",
];

/// Runs `schemes` at every point and tabulates. The benchmark for the
/// error column is the central loss scheme under `joint_reference`.
fn sweep(
    ctx: &mut Context,
    name: &str,
    points: &[Point],
    schemes: &[Scheme],
    joint_reference: bool,
) -> Result<Vec<Table>, HarnessError> {
    let set = ctx.trials(ctx.cfg.family_or(Family::Gaussian))?;
    let tag_population = {
        let mut pops: Vec<Population> = schemes
            .iter()
            .filter_map(|s| match s {
                Scheme::Exogenous(p) | Scheme::Endogenous(p) | Scheme::Joint(p) => Some(*p),
                _ => None,
            })
            .collect();
        pops.dedup();
        pops.len() > 1
    };
    let reference = Scheme::CenLoss { joint: joint_reference };

    // [trial][point] -> (reference, per-scheme outcomes)
    let res: Vec<Vec<(Outcome, Vec<Outcome>)>> = per_trial(&set, |t| {
        points
            .iter()
            .map(|p| {
                let task = t.task_index(p.task);
                let k = t.table.tasks()[task].k_lipschitz;
                let b_ref = t.reference_budget(task);
                let theta = reserves(t, p.theta_bar, p.rho);
                let psi = uniform_virtual_costs(p.theta_bar, &theta)?;
                let go = |s: Scheme| s.run(t, task, k, b_ref, p.theta_bar, &theta, &psi, p.delta);
                Ok((
                    go(reference)?,
                    schemes.iter().map(|&s| go(s)).collect::<Result<Vec<_>, _>>()?,
                ))
            })
            .collect()
    })?;

    let mut table = Table::new(name, &COLUMNS);
    let mut records = Table::new(format!("{name}_trials"), &RECORD_COLUMNS);
    for (pi, p) in points.iter().enumerate() {
        for (si, s) in schemes.iter().enumerate() {
            let label = s.name(tag_population);
            let col: Vec<(Outcome, Outcome)> = res.iter().map(|r| (r[pi].0, r[pi].1[si])).collect();
            let get = |f: &dyn Fn(&Outcome) -> f64| col.iter().map(|(_, o)| f(o)).collect::<Vec<_>>();
            let [m, lo, hi] = summary(&get(&|o| o.improvement()));
            let errors: Vec<f64> = col.iter().map(|(c, o)| (c.omega - o.omega) / o.b_ref).collect();
            table.push(vec![
                p.task.label().into(),
                i64::from(p.rho.value()).into(),
                p.theta_bar.into(),
                p.delta.into(),
                label.as_str().into(),
                super::finite_mean(&get(&|o| o.b_ref)).into(),
                super::finite_mean(&get(&|o| o.modelled_loss)).into(),
                super::finite_mean(&get(&|o| o.omega_hat)).into(),
                super::finite_mean(&get(&|o| o.omega)).into(),
                m,
                lo,
                hi,
                super::finite_mean(&errors).into(),
                super::finite_mean(&get(&|o| o.mask.count_ones() as f64)).into(),
                fraction(col.iter().map(|(_, o)| o.outside)).into(),
                fraction(col.iter().map(|(_, o)| o.omega <= o.b_ref)).into(),
            ]);
            for (trial, (_, o)) in col.iter().enumerate() {
                records.push(vec![
                    p.task.label().into(),
                    i64::from(p.rho.value()).into(),
                    p.theta_bar.into(),
                    p.delta.into(),
                    trial.into(),
                    label.as_str().into(),
                    (o.mask as usize).into(),
                    (o.mask.count_ones() as usize).into(),
                    o.outside.into(),
                    o.b_ref.into(),
                    o.modelled_loss.into(),
                    o.payment.into(),
                    o.omega_hat.into(),
                    o.omega.into(),
                ]);
            }
        }
    }
    Ok(vec![table, records])
}

fn theta_points(ctx: &Context, tasks: &[TaskKind]) -> Vec<Point> {
    let cfg = ctx.cfg;
    let mut points = Vec::new();
    for &task in tasks {
        for rho in cfg.rhos_or(&Rho::ALL) {
            for &theta_bar in &cfg.theta_bar_sweep {
                points.push(Point {
                    task,
                    rho,
                    theta_bar,
                    delta: cfg.delta,
                });
            }
        }
    }
    points
}

pub(super) fn proc_endo(ctx: &mut Context) -> Result<Vec<Table>, HarnessError> {
    let pop = ctx.cfg.population.unwrap_or(Population::Finite);
    let points = theta_points(ctx, &ENDO_TASKS);
    let schemes = [
        Scheme::Exogenous(pop),
        Scheme::Endogenous(pop),
        Scheme::Joint(pop),
        Scheme::CenLoss { joint: false },
        Scheme::CenWd { joint: false },
    ];
    sweep(ctx, "proc_endo", &points, &schemes, false)
}

pub(super) fn proc_joint(ctx: &mut Context) -> Result<Vec<Table>, HarnessError> {
    let mut schemes: Vec<Scheme> = ctx
        .cfg
        .populations_or(&[Population::Finite, Population::Infinite])
        .into_iter()
        .map(Scheme::Joint)
        .collect();
    schemes.extend([Scheme::CenLoss { joint: true }, Scheme::CenWd { joint: true }]);
    let points = theta_points(ctx, &ENDO_TASKS);
    sweep(ctx, "proc_joint", &points, &schemes, true)
}

pub(super) fn proc_risk(ctx: &mut Context) -> Result<Vec<Table>, HarnessError> {
    let cfg = ctx.cfg;
    let pop = cfg.population.unwrap_or(Population::Finite);
    let theta_bar = cfg.theta_bar.unwrap_or(1.4);
    let mut points = Vec::new();
    for rho in cfg.rhos_or(&Rho::ALL) {
        for &delta in &cfg.delta_sweep {
            points.push(Point {
                task: TaskKind::MedianMae,
                rho,
                theta_bar,
                delta,
            });
        }
    }
    let schemes = [
        Scheme::Endogenous(pop),
        Scheme::Joint(pop),
        Scheme::CenLoss { joint: true },
    ];
    sweep(ctx, "proc_risk", &points, &schemes, true)
}
