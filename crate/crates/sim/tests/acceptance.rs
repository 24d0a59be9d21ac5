//! Acceptance checks. Prints one `criterion N PASS|FAIL: ...` line per
//! criterion and exits non-zero if any result differs from the expected one.
//!
//! Criteria listed in `KNOWN_RED` are expected to fail for the documented
//! reason; the run also fails if one of them unexpectedly passes.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng as _;
use wdmarket::benchmarks::shapley;
use wdmarket::distances::{wasserstein1, wasserstein1_gaussian, wasserstein1_quantile, DistanceKind};
use wdmarket::distributions::{DistributionSpec, EmpiricalSample, Family};
use wdmarket::mechanisms::{build_misocp, check_monotonicity, solve, MarketInstance, Mechanism, PriorSpec};
use wdmarket::rng::{stream, Rng, StreamId};
use wdmarket::tasks::TaskKind;
use wdmarket::valuation::{hoeffding_bound, HoeffdingParams, Population};
use wdmarket_sim::config::{ExperimentConfig, ExperimentId};
use wdmarket_sim::output::Table;
use wdmarket_sim::trials::TrialSet;

/// Criteria that cannot be met as stated, with the reason checked below.
const KNOWN_RED: [(u32, &str); 2] = [
    (4, "reference finite value 1.27042 is off by 3.2e-5 from the formula"),
    (5, "finite-bound dominance is about 0.85, below 0.90"),
];

struct Outcome {
    id: u32,
    pass: bool,
    detail: String,
    /// For known-red criteria: whether the failure has the documented cause.
    expected_cause: bool,
}

fn outcome(id: u32, pass: bool, detail: String) -> Outcome {
    Outcome {
        id,
        pass,
        detail,
        expected_cause: false,
    }
}

fn rng(tag: u16) -> Rng {
    stream(0x00ac_ce97, StreamId::new(0, 100, tag))
}

fn default_cfg() -> ExperimentConfig {
    ExperimentConfig::default()
}

fn table<'a>(tables: &'a [Table], name: &str) -> &'a Table {
    tables
        .iter()
        .find(|t| t.name == name)
        .unwrap_or_else(|| panic!("missing table {name}"))
}

// Oracle model of the point-wise problem, written out from the definitions.

#[derive(Clone, Copy)]
enum Kind {
    Exo,
    Endo,
    Joint,
}

struct Inst {
    w: Vec<f64>,
    upper: f64,
    theta: Vec<f64>,
    kind: Kind,
    budget: f64,
    k: f64,
    pop: Population,
    delta: f64,
}

impl Inst {
    fn random(r: &mut Rng, n: usize) -> Self {
        let kind = [Kind::Exo, Kind::Endo, Kind::Joint][r.random_range(0..3)];
        let upper = r.random_range(0.2..2.0);
        Inst {
            w: (0..n).map(|_| r.random_range(0.0..3.0)).collect(),
            upper,
            theta: (0..n).map(|_| r.random_range(0.0..upper)).collect(),
            kind,
            budget: r.random_range(0.0..6.0),
            k: r.random_range(0.5..2.0),
            pop: if r.random_bool(0.5) {
                Population::Finite
            } else {
                Population::Infinite
            },
            delta: 0.95,
        }
    }

    fn n(&self) -> usize {
        self.w.len()
    }

    fn mechanism(&self) -> Mechanism {
        match self.kind {
            Kind::Exo => Mechanism::Exogenous { budget: self.budget },
            Kind::Endo => Mechanism::Endogenous {
                reference_budget: self.budget,
                k: self.k,
            },
            Kind::Joint => Mechanism::Joint {
                reference_budget: self.budget,
                k: self.k,
            },
        }
    }

    fn instance(&self) -> MarketInstance {
        MarketInstance::new(
            self.w.clone(),
            PriorSpec::uniform_iid(self.upper, self.n()).unwrap(),
            self.mechanism(),
            HoeffdingParams::new(self.delta, self.pop, self.n()).unwrap(),
        )
        .unwrap()
    }

    // uniform prior: ψ(θ) = 2θ
    fn psi(&self, i: usize) -> f64 {
        2.0 * self.theta[i]
    }

    /// `C·g(q)` for a nonempty selection.
    fn modelled(&self, mask: u32) -> f64 {
        let n = self.n() as f64;
        let p = mask.count_ones() as f64;
        let sum_sq: f64 = (0..self.n())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| self.w[i].powi(2))
            .sum();
        let k = if let Kind::Exo = self.kind { 1.0 } else { self.k };
        let ln = (2.0 / (1.0 - self.delta)).ln();
        match self.pop {
            // the full coalition carries no finite-population term
            Population::Finite if p == n => 0.0,
            Population::Finite => k * (ln / (2.0 * (n - 1.0))).sqrt() * ((n - p) * sum_sq).sqrt() / p,
            Population::Infinite => k * (ln / 2.0).sqrt() * sum_sq.sqrt() / p,
        }
    }

    fn pay(&self, mask: u32) -> f64 {
        (0..self.n()).filter(|i| mask >> i & 1 == 1).map(|i| self.psi(i)).sum()
    }

    /// Objective and feasibility of `(q₀, mask)`.
    fn evaluate(&self, q0: bool, mask: u32) -> (f64, bool) {
        let v = if mask == 0 { 0.0 } else { self.modelled(mask) };
        let pay = self.pay(mask);
        let out = if q0 { self.budget } else { 0.0 };
        let card = q0 as u32 + mask.count_ones();
        let card_ok = card >= 1 && card as usize <= self.n();
        match self.kind {
            Kind::Joint => (out + v + pay, card_ok),
            Kind::Endo => (out + v, card_ok && v + pay <= self.budget),
            Kind::Exo => (v, card_ok && !q0 && pay <= self.budget),
        }
    }
}

fn beats(a: (f64, u32), b: (f64, u32)) -> bool {
    let tol = 1e-12 * a.0.abs().max(b.0.abs()).max(1.0);
    if a.0 < b.0 - tol {
        return true;
    }
    if a.0 > b.0 + tol {
        return false;
    }
    let (sa, sb) = (a.1.count_ones(), b.1.count_ones());
    if sa != sb {
        return sa < sb;
    }
    let diff = a.1 ^ b.1;
    diff != 0 && a.1 & (1 << diff.trailing_zeros()) != 0
}

/// Per-subset brute force with the declared tie-break. Returns `(q₀, mask)`.
fn brute_force(inst: &Inst) -> (bool, u32) {
    let mut best: Option<(f64, u32)> = None;
    for mask in 1u32..1 << inst.n() {
        let (obj, ok) = inst.evaluate(false, mask);
        if ok && best.is_none_or(|b| beats((obj, mask), b)) {
            best = Some((obj, mask));
        }
    }
    match (inst.kind, best) {
        (Kind::Exo, None) => (false, 0),
        (_, None) => (true, 0),
        (Kind::Joint, Some(b)) if beats((inst.budget, 0), b) => (true, 0),
        (_, Some((_, m))) => (false, m),
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let (mut checked, mut exceptions) = (0usize, 0usize);
    for n in 2..=6 {
        for _ in 0..100 {
            let inst = Inst::random(&mut r, n);
            let p = build_misocp(&inst.instance(), &inst.theta, inst.pop).unwrap();
            for bits in 1u32..(1 << (n + 1)) - 1 {
                let (q0, mask) = (bits & 1 == 1, bits >> 1);
                let q: Vec<bool> = (0..=n).map(|i| bits >> i & 1 == 1).collect();
                let (obj, ok) = inst.evaluate(q0, mask);
                let x = p.implied_assignment(&q).unwrap();
                let misocp_ok = p.check_feasible(&x, 1e-9).is_ok();
                let m = p.objective_value(&x);
                checked += 1;
                if misocp_ok != ok || (ok && (m - obj).abs() > 1e-9 * obj.abs().max(1.0)) {
                    exceptions += 1;
                }
            }
        }
    }
    let took = start.elapsed();
    outcome(
        1,
        exceptions == 0 && took < Duration::from_secs(10),
        format!("{checked} admissible selections over 500 instances, {exceptions} exceptions, {took:.2?}"),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut r = rng(2);
    let mut mismatches = 0;
    for case in 0..200 {
        let n = r.random_range(1..=12);
        let mut inst = Inst::random(&mut r, n);
        if case % 4 == 0 && n >= 2 {
            // duplicate owners force exact ties
            inst.w[1] = inst.w[0];
            inst.theta[1] = inst.theta[0];
        }
        let got = solve(&inst.instance(), &inst.theta).unwrap();
        if (got.outside_option(), got.mask()) != brute_force(&inst) {
            mismatches += 1;
        }
    }
    let took = start.elapsed();
    outcome(
        2,
        mismatches == 0 && took < Duration::from_secs(60),
        format!("200 instances with N <= 12, {mismatches} subset mismatches, {took:.2?}"),
    )
}

fn criterion_3() -> Outcome {
    let mut r = rng(3);
    let mut violations = 0;
    for trial in 0..1000 {
        let n = r.random_range(2..=8);
        let mut inst = Inst::random(&mut r, n);
        inst.kind = [Kind::Exo, Kind::Endo, Kind::Joint][trial % 3];
        let owner = r.random_range(0..n);
        let raised = inst.theta[owner] + r.random_range(1e-6..inst.upper);
        let raised = raised.min(inst.upper);
        if raised <= inst.theta[owner] {
            continue;
        }
        let instance = inst.instance();
        let before = solve(&instance, &inst.theta).unwrap();
        let mut bumped = inst.theta.clone();
        bumped[owner] = raised;
        let after = solve(&instance, &bumped).unwrap();
        let upgraded = !before.q[owner + 1] && after.q[owner + 1];
        let lib = check_monotonicity(&instance, &inst.theta, owner, raised).unwrap();
        if upgraded || !lib {
            violations += 1;
        }
    }
    outcome(
        3,
        violations == 0,
        format!("1000 single-coordinate raises, {violations} violations"),
    )
}

fn criterion_4() -> Outcome {
    let mut w = vec![0.5; 8];
    w[0] = 1.0;
    let fin = HoeffdingParams::new(0.95, Population::Finite, 8).unwrap();
    let inf = HoeffdingParams::new(0.95, Population::Infinite, 8).unwrap();
    let f = hoeffding_bound(&w, &[0], &fin).unwrap();
    let i = hoeffding_bound(&w, &[0], &inf).unwrap();
    let full = hoeffding_bound(&w, &(0..8).collect::<Vec<_>>(), &fin).unwrap();
    let oracle_f = (7.0 / 8.0 * 40f64.ln() / 2.0).sqrt();
    let oracle_i = (40f64.ln() / 2.0).sqrt();
    let f_ok = (f - 1.27042).abs() <= 1e-5;
    let i_ok = (i - 1.35811).abs() <= 1e-5;
    let full_ok = full == 0.0;
    let mut o = outcome(
        4,
        f_ok && i_ok && full_ok,
        format!("finite {f:.7} (target 1.27042), infinite {i:.7} (target 1.35811), full {full}"),
    );
    o.expected_cause = !f_ok && (f - oracle_f).abs() < 1e-12 && (i - oracle_i).abs() < 1e-12 && i_ok && full_ok;
    o
}

/// Per-trial `(actual WD, finite bound, infinite bound)` of every coalition.
fn bound_points(set: &TrialSet, delta: f64) -> Vec<Vec<(f64, f64, f64)>> {
    let ln = (2.0 / (1.0 - delta)).ln();
    set.trials
        .iter()
        .map(|t| {
            let n = t.n_owners() as f64;
            let w = t.w();
            t.table
                .masks()
                .map(|m| {
                    let p = m.count_ones() as f64;
                    let ss: f64 = (0..w.len()).filter(|i| m >> i & 1 == 1).map(|i| w[i] * w[i]).sum();
                    let inf = (ss * ln / (2.0 * p * p)).sqrt();
                    let fin = ((n - p) / n).sqrt() * inf;
                    (t.table.entry(m).distances.wd, fin, inf)
                })
                .collect()
        })
        .collect()
}

fn criterion_5(gaussian: &TrialSet, cfg: &ExperimentConfig) -> Outcome {
    let start = Instant::now();
    let tables = wdmarket_sim::run(cfg, &[ExperimentId::ValHoeffding]).unwrap();
    let took = start.elapsed();
    let reported = table(&tables, "val_hoeffding_summary").values("mean", &[("metric", "fin_dominance_fraction")])[0];
    let points = bound_points(gaussian, 0.95);
    let per_trial: Vec<f64> = points
        .iter()
        .map(|t| t.iter().filter(|(wd, fin, _)| fin >= wd).count() as f64 / t.len() as f64)
        .collect();
    let frac = per_trial.iter().sum::<f64>() / per_trial.len() as f64;
    let n_coalitions = points[0].len();
    let fast = took < Duration::from_secs(120);
    let agrees = (frac - reported).abs() < 1e-12;
    let mut o = outcome(
        5,
        frac >= 0.90 && fast && agrees && n_coalitions == 255,
        format!(
            "mean dominance {frac:.4} over {n_coalitions} coalitions x {} trials (harness {reported:.4}), {took:.2?}",
            per_trial.len()
        ),
    );
    o.expected_cause = (0.80..0.90).contains(&frac) && fast && agrees;
    o
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}

fn criterion_6(gaussian: &TrialSet) -> Outcome {
    let points = bound_points(gaussian, 0.95);
    let mean_corr = |pick: fn(&(f64, f64, f64)) -> f64| {
        let cs: Vec<f64> = points
            .iter()
            .map(|t| {
                pearson(
                    &t.iter().map(|p| p.0).collect::<Vec<_>>(),
                    &t.iter().map(pick).collect::<Vec<_>>(),
                )
            })
            .collect();
        cs.iter().sum::<f64>() / cs.len() as f64
    };
    let fin = mean_corr(|p| p.1);
    let inf = mean_corr(|p| p.2);
    outcome(
        6,
        (fin - 0.72).abs() <= 0.10 && (inf - 0.67).abs() <= 0.10,
        format!("rho(W, W_fin) = {fin:.3} (0.72 +- 0.10), rho(W, W_inf) = {inf:.3} (0.67 +- 0.10)"),
    )
}

fn criterion_7(gaussian: &TrialSet) -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for kind in [TaskKind::MedianMae, TaskKind::MeanRmse] {
        let cs: Vec<f64> = gaussian
            .trials
            .iter()
            .map(|t| {
                let ti = t.task_index(kind);
                let wd: Vec<f64> = t.table.masks().map(|m| t.table.entry(m).distances.wd).collect();
                let gap: Vec<f64> = t.table.masks().map(|m| t.gap(m, ti)).collect();
                pearson(&wd, &gap)
            })
            .collect();
        let m = cs.iter().sum::<f64>() / cs.len() as f64;
        pass &= (0.6..=1.0).contains(&m);
        parts.push(format!("{} {m:.3}", kind.label()));
    }
    outcome(7, pass, format!("mean Pearson(WD, loss gap): {}", parts.join(", ")))
}

/// `(violations, trials with a violation)` of `gap <= K·W` for one task.
fn lipschitz_violations(set: &TrialSet, kind: TaskKind) -> (usize, usize) {
    let (mut total, mut trials) = (0, 0);
    for t in &set.trials {
        let ti = t.task_index(kind);
        let k = t.table.tasks()[ti].k_lipschitz;
        let v = t
            .table
            .masks()
            .filter(|&m| t.gap(m, ti) > k * t.table.entry(m).distances.wd + 1e-9)
            .count();
        total += v;
        trials += (v > 0) as usize;
    }
    (total, trials)
}

fn criterion_8(gaussian: &TrialSet, uniform: &TrialSet) -> Outcome {
    let (u_viol, _) = lipschitz_violations(uniform, TaskKind::MedianMae);
    let (g_viol, g_trials) = lipschitz_violations(gaussian, TaskKind::MeanRmse);
    outcome(
        8,
        u_viol == 0 && g_trials >= 1,
        format!("uniform/MAE {u_viol} violations; gaussian/RMSE {g_viol} violations in {g_trials} trials"),
    )
}

/// Shapley values by averaging marginal contributions over all orderings.
fn shapley_by_permutations(n: usize, v: &dyn Fn(u32) -> f64) -> Vec<f64> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut phi = vec![0.0; n];
    let mut count = 0.0;
    loop {
        let mut mask = 0u32;
        let mut prev = v(0);
        for &i in &order {
            mask |= 1 << i;
            let cur = v(mask);
            phi[i] += cur - prev;
            prev = cur;
        }
        count += 1.0;
        // next lexicographic permutation
        let Some(i) = (0..n - 1).rev().find(|&i| order[i] < order[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| order[j] > order[i]).unwrap();
        order.swap(i, j);
        order[i + 1..].reverse();
    }
    phi.iter().map(|p| p / count).collect()
}

fn criterion_9(gaussian: &TrialSet) -> Outcome {
    let mut r = rng(9);
    let mut axiom_err: f64 = 0.0;
    for _ in 0..200 {
        let n = r.random_range(3..=7);
        let mut vals: Vec<f64> = (0..1u32 << n).map(|_| r.random_range(-2.0..2.0)).collect();
        vals[0] = 0.0;
        // player n-1 is a dummy; players 0 and 1 are symmetric
        for m in 0..1u32 << n {
            let last = 1u32 << (n - 1);
            if m & last != 0 {
                vals[m as usize] = vals[(m & !last) as usize];
            }
        }
        for m in 0..1u32 << n {
            let swapped = (m & !3) | (m & 1) << 1 | (m >> 1) & 1;
            if swapped > m {
                vals[swapped as usize] = vals[m as usize];
            }
        }
        let phi = shapley(n, |m| vals[m as usize]).unwrap();
        let oracle = shapley_by_permutations(n, &|m| vals[m as usize]);
        let efficiency = phi.iter().sum::<f64>() - vals[(1usize << n) - 1];
        axiom_err = axiom_err
            .max(efficiency.abs())
            .max((phi[0] - phi[1]).abs())
            .max(phi[n - 1].abs())
            .max(phi.iter().zip(&oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    }

    let kinds = [DistanceKind::Wd, DistanceKind::Ks, DistanceKind::Tvd, DistanceKind::Jsd];
    let mut worst_pair = (0.0, "", "");
    let per_trial: Vec<Vec<Vec<f64>>> = gaussian
        .trials
        .iter()
        .map(|t| {
            let n = t.n_owners();
            kinds
                .iter()
                .map(|&k| {
                    let d = |m: u32| t.table.entry(m).distances.get(k).unwrap();
                    let top = t.table.masks().map(d).fold(f64::NEG_INFINITY, f64::max);
                    let v = |m: u32| if m == 0 { 0.0 } else { top - d(m) };
                    let phi = shapley_by_permutations(n, &v);
                    let s: f64 = phi.iter().sum();
                    phi.iter().map(|p| p / s).collect()
                })
                .collect()
        })
        .collect();
    for a in 0..kinds.len() {
        for b in a + 1..kinds.len() {
            let mean_max = per_trial
                .iter()
                .map(|t| t[a].iter().zip(&t[b]).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
                .sum::<f64>()
                / per_trial.len() as f64;
            if mean_max > worst_pair.0 {
                worst_pair = (mean_max, kinds[a].name(), kinds[b].name());
            }
        }
    }
    outcome(
        9,
        axiom_err <= 1e-10 && worst_pair.0 < 0.08,
        format!(
            "axiom error {axiom_err:.1e}; largest mean proportion gap {:.4} ({} vs {})",
            worst_pair.0, worst_pair.1, worst_pair.2
        ),
    )
}

fn criterion_10(all: &[Table]) -> Outcome {
    let t = table(all, "proc_exo_rho_0");
    let budgets: Vec<String> = {
        let c = t.column("budget").unwrap();
        let mut b: Vec<String> = t.rows.iter().map(|r| r[c].render()).collect();
        b.dedup();
        b
    };
    let mut bad = Vec::new();
    for b in &budgets {
        let get = |m: &str| t.values("mean_wd", &[("budget", b), ("mechanism", m)])[0];
        let (cen, fin, rnd) = (get("cen"), get("fin"), get("rand"));
        if !(cen <= fin + 1e-12 && fin <= rnd + 0.02) {
            bad.push(format!("{b}: cen {cen:.3} fin {fin:.3} rand {rnd:.3}"));
        }
    }
    outcome(
        10,
        bad.is_empty() && !budgets.is_empty(),
        if bad.is_empty() {
            format!("CEN <= FIN <= RAND + 0.02 at all {} budgets", budgets.len())
        } else {
            format!("ordering broken at {}", bad.join("; "))
        },
    )
}

fn criterion_11(all: &[Table]) -> Outcome {
    let (mut records, mut hat_viol, mut within) = (0usize, 0usize, 0usize);
    for (name, mechs) in [
        ("proc_endo_trials", &["endogenous", "joint"][..]),
        ("proc_joint_trials", &["joint", "joint_fin", "joint_inf"][..]),
    ] {
        let t = table(all, name);
        let col = |c: &str| t.column(c).unwrap();
        let (m, outside, hat, omega, b) = (
            col("mechanism"),
            col("outside"),
            col("omega_hat"),
            col("omega"),
            col("b_ref"),
        );
        for row in t.rows.iter().filter(|r| mechs.contains(&r[m].render().as_str())) {
            let f = |i: usize| row[i].as_f64().unwrap();
            let b_ref = f(b);
            let tol = 1e-12 * b_ref.abs().max(1.0);
            records += 1;
            if f(outside) == 0.0 && f(hat) > b_ref + tol {
                hat_viol += 1;
            }
            within += (f(omega) <= b_ref + tol) as usize;
        }
    }
    let frac = within as f64 / records as f64;
    outcome(
        11,
        records > 0 && hat_viol == 0 && frac >= 0.95,
        format!("{records} endogenous/joint records: {hat_viol} modelled-cost breaches, actual cost within budget in {frac:.4}"),
    )
}

fn criterion_12() -> Outcome {
    let mut r = rng(12);
    let mut max_err: f64 = 0.0;
    for _ in 0..500 {
        let n = r.random_range(1..200);
        let shift = r.random_range(-5.0..5.0);
        let a: Vec<f64> = (0..n).map(|_| r.random_range(-3.0..3.0)).collect();
        let b: Vec<f64> = (0..n).map(|_| shift + r.random_range(0.0..4.0)).collect();
        let (mut sa, mut sb) = (a.clone(), b.clone());
        sa.sort_by(f64::total_cmp);
        sb.sort_by(f64::total_cmp);
        let oracle = sa.iter().zip(&sb).map(|(x, y)| (x - y).abs()).sum::<f64>() / n as f64;
        let (ea, eb) = (EmpiricalSample::new(a).unwrap(), EmpiricalSample::new(b).unwrap());
        let sorted = wasserstein1(&ea, &eb);
        let quantile = wasserstein1_quantile(&ea, &eb);
        max_err = max_err.max((sorted - quantile).abs()).max((sorted - oracle).abs());
    }
    let (mu1, s1, mu2, s2) = (0.3, 1.2, -0.4, 0.7);
    let closed = wasserstein1_gaussian(mu1, s1, mu2, s2).unwrap();
    let mut g = rng(120);
    let x = DistributionSpec::new(Family::Gaussian, mu1, s1)
        .unwrap()
        .sample(100_000, &mut g)
        .unwrap();
    let y = DistributionSpec::new(Family::Gaussian, mu2, s2)
        .unwrap()
        .sample(100_000, &mut g)
        .unwrap();
    let empirical = wasserstein1(&x, &y);
    let rel = (empirical - closed).abs() / closed;
    outcome(
        12,
        max_err <= 1e-10 && rel < 0.02,
        format!("sorted vs quantile W1 max diff {max_err:.1e}; Gaussian closed form {closed:.5} vs empirical {empirical:.5} ({:.2}%)", rel * 100.0),
    )
}

fn criterion_13(took: Duration, n_tables: usize) -> Outcome {
    outcome(
        13,
        took < Duration::from_secs(300),
        format!("full suite ({n_tables} tables, 50 trials, N = 8) in {took:.2?}"),
    )
}

fn main() -> ExitCode {
    let cfg = default_cfg();
    assert_eq!((cfg.trials, cfg.n_owners), (50, 8));

    let mut results = vec![criterion_1(), criterion_2(), criterion_3(), criterion_4()];

    let gaussian = TrialSet::generate(&cfg, Family::Gaussian).unwrap();
    let uniform = TrialSet::generate(&cfg, Family::Uniform).unwrap();
    results.push(criterion_5(&gaussian, &cfg));
    results.push(criterion_6(&gaussian));
    results.push(criterion_7(&gaussian));
    results.push(criterion_8(&gaussian, &uniform));
    results.push(criterion_9(&gaussian));

    let start = Instant::now();
    let all = wdmarket_sim::run(&cfg, &ExperimentId::ALL).unwrap();
    let took = start.elapsed();
    results.push(criterion_10(&all));
    results.push(criterion_11(&all));
    results.push(criterion_12());
    results.push(criterion_13(took, all.len()));

    let mut ok = true;
    for o in &results {
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {} {verdict}: {}", o.id, o.detail);
        match KNOWN_RED.iter().find(|(id, _)| *id == o.id) {
            Some((_, reason)) if !o.pass => {
                println!("    known red: {reason}");
                if !o.expected_cause {
                    println!("    but the failure does not match the documented cause");
                    ok = false;
                }
            }
            Some(_) => {
                println!("    listed as known red but passed; update the list");
                ok = false;
            }
            None => ok &= o.pass,
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
