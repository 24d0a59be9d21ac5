//! Valuation experiments: Lipschitz tightness, distance/loss correlations,
//! Shapley allocations and Hoeffding approximations.

use wdmarket::benchmarks::{distance_value_fn, loss_value_fn, members, proportions, shapley};
use wdmarket::distances::DistanceKind;
use wdmarket::distributions::Family;
use wdmarket::stats::{mean, pearson, spearman};
use wdmarket::tasks::VIOLATION_SLACK;
use wdmarket::valuation::{hoeffding_from_sums, HoeffdingParams, Population};

use super::{fraction, per_trial, summary, Context};
use crate::output::{Cell, Table};
use crate::trials::Trial;
use crate::HarnessError;

pub(super) fn lipschitz(ctx: &mut Context) -> Result<Vec<Table>, HarnessError> {
    let mut violations = Table::new(
        "val_lipschitz_violations",
        &[
            "family",
            "task",
            "n_coalitions",
            "n_violations",
            "trials_with_violation",
            "max_excess",
        ],
    );
    let mut out = Vec::new();
    for family in ctx.cfg.families_or_all() {
        let set = ctx.trials(family)?;
        let mut by_size = Table::new(
            format!("val_lipschitz_{}", family.name()),
            &["task", "size", "mean_wd", "mean_scaled_gap", "mean_slack"],
        );
        let mut scatter = Table::new(
            format!("val_lipschitz_scatter_{}", family.name()),
            &["trial", "task", "mask", "size", "wd", "scaled_gap"],
        );
        let n = ctx.cfg.n_owners;
        let tasks = set.trials[0].table.tasks().to_vec();
        for (ti, task) in tasks.iter().enumerate() {
            let k = task.k_lipschitz;
            // per trial: (wd, gap/K) per mask
            let points: Vec<Vec<(u32, f64, f64)>> = per_trial(&set, |t| {
                Ok(t.table
                    .masks()
                    .map(|m| (m, t.table.entry(m).distances.wd, t.gap(m, ti) / k))
                    .collect())
            })?;
            for size in 1..=n {
                let pick = |f: &dyn Fn(f64, f64) -> f64| {
                    points
                        .iter()
                        .flatten()
                        .filter(|(m, _, _)| m.count_ones() as usize == size)
                        .map(|&(_, w, g)| f(w, g))
                        .collect::<Vec<_>>()
                };
                by_size.push(vec![
                    task.kind.label().into(),
                    size.into(),
                    mean(&pick(&|w, _| w)).into(),
                    mean(&pick(&|_, g| g)).into(),
                    mean(&pick(&|w, g| g - w)).into(),
                ]);
            }
            // violation when gap > K·W + slack
            let excess = |&(_, w, g): &(u32, f64, f64)| k * g - k * w;
            let flagged = |p: &(u32, f64, f64)| excess(p) > VIOLATION_SLACK;
            violations.push(vec![
                family.name().into(),
                task.kind.label().into(),
                points.iter().map(Vec::len).sum::<usize>().into(),
                points.iter().flatten().filter(|p| flagged(p)).count().into(),
                points.iter().filter(|t| t.iter().any(flagged)).count().into(),
                points
                    .iter()
                    .flatten()
                    .map(excess)
                    .fold(f64::NEG_INFINITY, f64::max)
                    .into(),
            ]);
            for &(m, w, g) in &points[0] {
                scatter.push(vec![
                    0usize.into(),
                    task.kind.label().into(),
                    (m as usize).into(),
                    (m.count_ones() as usize).into(),
                    w.into(),
                    g.into(),
                ]);
            }
        }
        out.push(by_size);
        out.push(scatter);
    }
    out.push(violations);
    Ok(out)
}

/// Pearson and Spearman coefficients between `kind` and task `ti` over the
/// coalitions where `kind` is defined.
fn coalition_correlation(t: &Trial, kind: DistanceKind, ti: usize) -> (f64, f64) {
    let (mut d, mut l) = (Vec::new(), Vec::new());
    for m in t.table.masks() {
        if let Some(x) = t.table.entry(m).distances.get(kind) {
            d.push(x);
            l.push(t.gap(m, ti));
        }
    }
    if d.len() < 3 {
        return (f64::NAN, f64::NAN);
    }
    (pearson(&d, &l), spearman(&d, &l))
}

pub(super) fn correlations(ctx: &mut Context) -> Result<Vec<Table>, HarnessError> {
    let mut out = Vec::new();
    for family in ctx.cfg.families_or_all() {
        let set = ctx.trials(family)?;
        let mut table = Table::new(
            format!("val_corr_{}", family.name()),
            &[
                "distance",
                "task",
                "mean_pearson",
                "ci_lo",
                "ci_hi",
                "mean_spearman",
                "frac_wd_at_least",
                "n_trials",
            ],
        );
        let tasks = set.trials[0].table.tasks().to_vec();
        // [trial][kind][task] -> (pearson, spearman)
        let coef: Vec<Vec<Vec<(f64, f64)>>> = per_trial(&set, |t| {
            Ok(DistanceKind::ALL
                .iter()
                .map(|&k| (0..tasks.len()).map(|ti| coalition_correlation(t, k, ti)).collect())
                .collect())
        })?;
        for (ki, kind) in DistanceKind::ALL.iter().enumerate() {
            for (ti, task) in tasks.iter().enumerate() {
                let defined: Vec<&Vec<Vec<(f64, f64)>>> = coef.iter().filter(|c| c[ki][ti].0.is_finite()).collect();
                let p: Vec<f64> = defined.iter().map(|c| c[ki][ti].0).collect();
                let s: Vec<f64> = defined.iter().map(|c| c[ki][ti].1).collect();
                let wd_ge = fraction(defined.iter().map(|c| c[0][ti].0 >= c[ki][ti].0));
                let [m, lo, hi] = summary(&p);
                table.push(vec![
                    kind.name().into(),
                    task.kind.label().into(),
                    m,
                    lo,
                    hi,
                    super::finite_mean(&s).into(),
                    wd_ge.into(),
                    p.len().into(),
                ]);
            }
        }
        out.push(table);
    }
    Ok(out)
}

/// Hoeffding bound of every nonempty coalition, indexed by `mask − 1`.
fn coalition_bounds(w: &[f64], params: &HoeffdingParams) -> Vec<f64> {
    let n = w.len();
    (1..1u32 << n)
        .map(|m| {
            let sum_sq: f64 = members(m, n).map(|i| w[i] * w[i]).sum();
            hoeffding_from_sums(sum_sq, m.count_ones() as usize, params)
        })
        .collect()
}

/// Distances compared pairwise for allocation stability.
const ALLOCATION_DISTANCES: [DistanceKind; 4] =
    [DistanceKind::Wd, DistanceKind::Ks, DistanceKind::Tvd, DistanceKind::Jsd];

pub(super) fn shapley_allocations(ctx: &mut Context) -> Result<Vec<Table>, HarnessError> {
    let family = ctx.cfg.family_or(Family::Gaussian);
    let delta = ctx.cfg.delta;
    let set = ctx.trials(family)?;
    let n = ctx.cfg.n_owners;
    let tasks = set.trials[0].table.tasks().to_vec();
    let mut metrics: Vec<String> = DistanceKind::ALL.iter().map(|k| k.name().to_owned()).collect();
    metrics.extend(["hoeffding_fin".to_owned(), "hoeffding_inf".to_owned()]);
    let n_distances = metrics.len();
    metrics.extend(tasks.iter().map(|t| t.kind.label()));

    // [trial][metric] -> (shares, proportions)
    let alloc: Vec<Vec<(Vec<f64>, Vec<f64>)>> = per_trial(&set, |t| {
        let mut rows = Vec::new();
        for &k in &DistanceKind::ALL {
            rows.push(shapley(n, distance_value_fn(&t.table, k))?);
        }
        let w = t.w();
        for pop in [Population::Finite, Population::Infinite] {
            let bounds = coalition_bounds(&w, &HoeffdingParams::new(delta, pop, n)?);
            let worst = bounds.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            rows.push(shapley(
                n,
                |m| if m == 0 { 0.0 } else { worst - bounds[m as usize - 1] },
            )?);
        }
        for ti in 0..tasks.len() {
            rows.push(shapley(n, loss_value_fn(&t.table, ti))?);
        }
        Ok(rows
            .into_iter()
            .map(|phi| {
                let p = proportions(&phi);
                (phi, p)
            })
            .collect())
    })?;

    let mut allocations = Table::new(
        "val_shapley_allocations",
        &["trial", "metric", "owner", "share", "proportion"],
    );
    for (t, rows) in alloc.iter().enumerate() {
        for (mi, (phi, p)) in rows.iter().enumerate() {
            for i in 0..n {
                allocations.push(vec![
                    t.into(),
                    metrics[mi].as_str().into(),
                    i.into(),
                    phi[i].into(),
                    p[i].into(),
                ]);
            }
        }
    }

    let mean_abs_diff = |a: &[f64], b: &[f64]| mean(&a.iter().zip(b).map(|(x, y)| (x - y).abs()).collect::<Vec<_>>());
    let max_abs_diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);

    let mut misallocation = Table::new(
        "val_shapley_misallocation",
        &["metric", "task", "mean_abs_diff", "ci_lo", "ci_hi"],
    );
    for mi in 0..n_distances {
        for (ti, task) in tasks.iter().enumerate() {
            let diffs: Vec<f64> = alloc
                .iter()
                .map(|rows| mean_abs_diff(&rows[mi].1, &rows[n_distances + ti].1))
                .collect();
            let [m, lo, hi] = summary(&diffs);
            misallocation.push(vec![metrics[mi].as_str().into(), task.kind.label().into(), m, lo, hi]);
        }
    }

    let mut pairs = Table::new(
        "val_shapley_distance_pairs",
        &[
            "metric_a",
            "metric_b",
            "mean_max_diff",
            "ci_lo",
            "ci_hi",
            "worst_max_diff",
        ],
    );
    let index = |k: DistanceKind| DistanceKind::ALL.iter().position(|&x| x == k).expect("listed");
    for (a, &ka) in ALLOCATION_DISTANCES.iter().enumerate() {
        for &kb in &ALLOCATION_DISTANCES[a + 1..] {
            let diffs: Vec<f64> = alloc
                .iter()
                .map(|rows| max_abs_diff(&rows[index(ka)].1, &rows[index(kb)].1))
                .collect();
            let [m, lo, hi] = summary(&diffs);
            let worst = diffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            pairs.push(vec![ka.name().into(), kb.name().into(), m, lo, hi, worst.into()]);
        }
    }
    Ok(vec![allocations, misallocation, pairs])
}

/// Lowest-bound coalition of each size, fewest index bits on ties.
fn minimisers(bounds: &[f64], n: usize) -> Vec<u32> {
    (1..=n)
        .map(|size| {
            (1..1u32 << n)
                .filter(|m| m.count_ones() as usize == size)
                .fold(None, |best: Option<u32>, m| match best {
                    Some(b) if bounds[b as usize - 1] <= bounds[m as usize - 1] => Some(b),
                    _ => Some(m),
                })
                .expect("every size has a coalition")
        })
        .collect()
}

pub(super) fn hoeffding(ctx: &mut Context) -> Result<Vec<Table>, HarnessError> {
    let family = ctx.cfg.family_or(Family::Gaussian);
    let cfg = ctx.cfg;
    let set = ctx.trials(family)?;
    let n = cfg.n_owners;

    struct PerTrial {
        wd: Vec<f64>,
        fin: Vec<f64>,
        inf: Vec<f64>,
        sweep: Vec<(Population, f64, Vec<f64>)>,
    }
    let data: Vec<PerTrial> = per_trial(&set, |t| {
        let w = t.w();
        let bounds = |delta, pop| -> Result<Vec<f64>, HarnessError> {
            Ok(coalition_bounds(&w, &HoeffdingParams::new(delta, pop, n)?))
        };
        let mut sweep = Vec::new();
        for pop in [Population::Finite, Population::Infinite] {
            for &d in &cfg.delta_sweep {
                sweep.push((pop, d, bounds(d, pop)?));
            }
        }
        Ok(PerTrial {
            wd: t.table.masks().map(|m| t.table.entry(m).distances.wd).collect(),
            fin: bounds(cfg.delta, Population::Finite)?,
            inf: bounds(cfg.delta, Population::Infinite)?,
            sweep,
        })
    })?;

    let size_of = |idx: usize| (idx as u32 + 1).count_ones() as usize;
    let mut by_size = Table::new(
        "val_hoeffding_by_size",
        &[
            "size",
            "mean_wd",
            "mean_min_wd",
            "mean_fin",
            "mean_inf",
            "mean_wd_fin_minimiser",
            "mean_wd_inf_minimiser",
            "frac_fin_dominates",
        ],
    );
    let fin_min: Vec<Vec<u32>> = data.iter().map(|d| minimisers(&d.fin, n)).collect();
    let inf_min: Vec<Vec<u32>> = data.iter().map(|d| minimisers(&d.inf, n)).collect();
    for size in 1..=n {
        let at = |v: &[f64]| -> Vec<f64> {
            v.iter()
                .enumerate()
                .filter(|(i, _)| size_of(*i) == size)
                .map(|(_, x)| *x)
                .collect()
        };
        let wd: Vec<f64> = data.iter().flat_map(|d| at(&d.wd)).collect();
        let min_wd: Vec<f64> = data
            .iter()
            .map(|d| at(&d.wd).into_iter().fold(f64::INFINITY, f64::min))
            .collect();
        let fin: Vec<f64> = data.iter().flat_map(|d| at(&d.fin)).collect();
        let inf: Vec<f64> = data.iter().flat_map(|d| at(&d.inf)).collect();
        let wd_fin_min: Vec<f64> = data
            .iter()
            .zip(&fin_min)
            .map(|(d, m)| d.wd[m[size - 1] as usize - 1])
            .collect();
        let wd_inf_min: Vec<f64> = data
            .iter()
            .zip(&inf_min)
            .map(|(d, m)| d.wd[m[size - 1] as usize - 1])
            .collect();
        let dominated = fraction(
            data.iter()
                .flat_map(|d| at(&d.fin).into_iter().zip(at(&d.wd)).map(|(b, w)| b >= w)),
        );
        by_size.push(vec![
            size.into(),
            mean(&wd).into(),
            mean(&min_wd).into(),
            mean(&fin).into(),
            mean(&inf).into(),
            mean(&wd_fin_min).into(),
            mean(&wd_inf_min).into(),
            dominated.into(),
        ]);
    }

    let mut delta_table = Table::new("val_hoeffding_delta", &["population", "delta", "size", "mean_bound"]);
    for (si, (pop, d, _)) in data[0].sweep.iter().enumerate() {
        for size in 1..=n {
            let vals: Vec<f64> = data
                .iter()
                .flat_map(|t| {
                    t.sweep[si]
                        .2
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| size_of(*i) == size)
                        .map(|(_, x)| *x)
                        .collect::<Vec<_>>()
                })
                .collect();
            delta_table.push(vec![pop.name().into(), (*d).into(), size.into(), mean(&vals).into()]);
        }
    }

    type Metric = fn(&PerTrial) -> f64;
    let mut summary_table = Table::new("val_hoeffding_summary", &["metric", "mean", "ci_lo", "ci_hi"]);
    let rows: [(&str, Metric); 5] = [
        ("pearson_wd_fin", |d| pearson(&d.wd, &d.fin)),
        ("pearson_wd_inf", |d| pearson(&d.wd, &d.inf)),
        ("spearman_wd_fin", |d| spearman(&d.wd, &d.fin)),
        ("spearman_wd_inf", |d| spearman(&d.wd, &d.inf)),
        ("fin_dominance_fraction", |d| {
            fraction(d.fin.iter().zip(&d.wd).map(|(b, w)| b >= w))
        }),
    ];
    for (name, f) in rows {
        let vals: Vec<f64> = data.iter().map(f).collect();
        let [m, lo, hi] = summary(&vals);
        summary_table.push(vec![Cell::from(name), m, lo, hi]);
    }
    Ok(vec![by_size, delta_table, summary_table])
}
