use alloc::vec;
use alloc::vec::Vec;

use super::{MarketInstance, Mechanism, MechanismResult};
use crate::{Error, Result};

/// Largest owner count [`solve`] will enumerate.
pub const MAX_ENUMERATION_OWNERS: usize = 24;

const TIE_TOL: f64 = 1e-12;

/// Objective of a binary selection `q` (index 0 = outside option).
///
/// Joint: `q₀·B_ref + C·g(q) + Σ q_i ψ_i`; endogenous: `q₀·B_ref + C·g(q)`;
/// exogenous: `C·g(q)`. The distance term is zero when no owner is selected.
/// Budget feasibility is reported separately by [`pointwise_feasible`].
pub fn pointwise_objective(q: &[bool], instance: &MarketInstance, theta: &[f64]) -> Result<f64> {
    let (size, sum_sq, pay) = selection_sums(q, instance, theta)?;
    let v = if size == 0 {
        0.0
    } else {
        instance.modelled_loss(size, sum_sq)
    };
    let outside = if q[0] { instance.mechanism().budget() } else { 0.0 };
    Ok(match instance.mechanism() {
        Mechanism::Joint { .. } => outside + v + pay,
        Mechanism::Endogenous { .. } => outside + v,
        Mechanism::Exogenous { .. } => v,
    })
}

/// Whether `q` satisfies cardinality (`1 ≤ Σ_{i=0..N} q_i ≤ N`) and the
/// mechanism's budget row.
pub fn pointwise_feasible(q: &[bool], instance: &MarketInstance, theta: &[f64]) -> Result<bool> {
    let (size, sum_sq, pay) = selection_sums(q, instance, theta)?;
    let total = size + q[0] as usize;
    if total > instance.n_owners() {
        return Ok(false);
    }
    let v = if size == 0 {
        0.0
    } else {
        instance.modelled_loss(size, sum_sq)
    };
    Ok(match instance.mechanism() {
        Mechanism::Joint { .. } => true,
        Mechanism::Endogenous { reference_budget, .. } => v + pay <= reference_budget,
        Mechanism::Exogenous { budget } => !q[0] && pay <= budget,
    })
}

fn selection_sums(q: &[bool], instance: &MarketInstance, theta: &[f64]) -> Result<(usize, f64, f64)> {
    let n = instance.n_owners();
    if q.len() != n + 1 {
        return Err(Error::SizeMismatch {
            expected: n + 1,
            found: q.len(),
        });
    }
    if !q.iter().any(|&b| b) {
        return Err(Error::param("q", "at least one entry must be set"));
    }
    let psi = instance.virtual_costs(theta)?;
    let w = instance.w();
    let (mut size, mut sum_sq, mut pay) = (0, 0.0, 0.0);
    for i in 0..n {
        if q[i + 1] {
            size += 1;
            sum_sq += w[i] * w[i];
            pay += psi[i];
        }
    }
    Ok((size, sum_sq, pay))
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    mask: u32,
    size: u32,
    objective: f64,
}

impl Candidate {
    fn beats(&self, other: &Candidate) -> bool {
        let tol = TIE_TOL * self.objective.abs().max(other.objective.abs()).max(1.0);
        if self.objective < other.objective - tol {
            return true;
        }
        if self.objective > other.objective + tol {
            return false;
        }
        if self.size != other.size {
            return self.size < other.size;
        }
        let diff = self.mask ^ other.mask;
        // for equal sizes, the set holding the smallest differing index sorts first
        diff != 0 && self.mask & (1 << diff.trailing_zeros()) != 0
    }
}

fn keep_best(best: &mut Option<Candidate>, c: Candidate) {
    match best {
        Some(b) if !c.beats(b) => {}
        _ => *best = Some(c),
    }
}

struct Enumerator<'a> {
    instance: &'a MarketInstance,
    w_sq: Vec<f64>,
    psi: Vec<f64>,
    best: Option<Candidate>,
}

impl Enumerator<'_> {
    // depth-first over owners, carrying running sums
    fn visit(&mut self, next: usize, mask: u32, size: u32, sum_sq: f64, pay: f64) {
        let n = self.w_sq.len();
        for i in next..n {
            let (m, s, sq, p) = (mask | 1 << i, size + 1, sum_sq + self.w_sq[i], pay + self.psi[i]);
            self.consider(m, s, sq, p);
            self.visit(i + 1, m, s, sq, p);
        }
    }

    fn consider(&mut self, mask: u32, size: u32, sum_sq: f64, pay: f64) {
        let v = self.instance.modelled_loss(size as usize, sum_sq);
        let objective = match self.instance.mechanism() {
            Mechanism::Exogenous { budget } => {
                if pay > budget {
                    return;
                }
                v
            }
            Mechanism::Endogenous { reference_budget, .. } => {
                if v + pay > reference_budget {
                    return;
                }
                v
            }
            Mechanism::Joint { .. } => v + pay,
        };
        keep_best(&mut self.best, Candidate { mask, size, objective });
    }
}

fn check_size(instance: &MarketInstance) -> Result<()> {
    let n = instance.n_owners();
    if n > MAX_ENUMERATION_OWNERS {
        return Err(Error::TooManyOwners {
            what: "exact enumeration",
            max: MAX_ENUMERATION_OWNERS,
            got: n,
        });
    }
    Ok(())
}

/// Exact optimum of the point-wise problem by subset enumeration.
///
/// Ties are broken by lowest objective (relative tolerance `1e-12`), then
/// fewest owners, then the lexicographically smallest owner set.
pub fn solve(instance: &MarketInstance, theta: &[f64]) -> Result<MechanismResult> {
    check_size(instance)?;
    let psi = instance.virtual_costs(theta)?;
    let mut e = Enumerator {
        instance,
        w_sq: instance.w().iter().map(|w| w * w).collect(),
        psi,
        best: None,
    };
    e.visit(0, 0, 0, 0.0, 0.0);
    let best = e.best;
    let psi = e.psi;
    Ok(finish(instance, &psi, best))
}

/// Brute force over every bitmask, recomputing each objective from
/// [`pointwise_objective`]; the reference for [`solve`].
pub fn solve_naive(instance: &MarketInstance, theta: &[f64]) -> Result<MechanismResult> {
    check_size(instance)?;
    let n = instance.n_owners();
    let psi = instance.virtual_costs(theta)?;
    let mut best = None;
    for mask in 1u32..(1u32 << n) {
        let mut q = vec![false; n + 1];
        for (i, slot) in q[1..].iter_mut().enumerate() {
            *slot = mask >> i & 1 == 1;
        }
        if !pointwise_feasible(&q, instance, theta)? {
            continue;
        }
        let objective = pointwise_objective(&q, instance, theta)?;
        keep_best(
            &mut best,
            Candidate {
                mask,
                size: mask.count_ones(),
                objective,
            },
        );
    }
    Ok(finish(instance, &psi, best))
}

fn finish(instance: &MarketInstance, psi: &[f64], best: Option<Candidate>) -> MechanismResult {
    let n = instance.n_owners();
    let mechanism = instance.mechanism();
    let outside = MechanismResult {
        q: {
            let mut q = vec![false; n + 1];
            q[0] = mechanism.has_outside_option();
            q
        },
        t: vec![0.0; n],
        v_bound: 0.0,
        objective: mechanism.budget(),
        feasible: mechanism.has_outside_option(),
    };
    let best = match (mechanism, best) {
        (_, None) => {
            if !mechanism.has_outside_option() {
                return MechanismResult {
                    objective: f64::INFINITY,
                    ..outside
                };
            }
            return outside;
        }
        (Mechanism::Joint { reference_budget, .. }, Some(c)) => {
            // q₀ costs B_ref and buys nothing, so it ranks ahead of any
            // coalition at equal objective
            let q0 = Candidate {
                mask: 0,
                size: 0,
                objective: reference_budget,
            };
            if q0.beats(&c) {
                return outside;
            }
            c
        }
        (_, Some(c)) => c,
    };
    let mut q = vec![false; n + 1];
    let mut t = vec![0.0; n];
    let mut sum_sq = 0.0;
    for i in 0..n {
        if best.mask >> i & 1 == 1 {
            q[i + 1] = true;
            t[i] = psi[i];
            sum_sq += instance.w()[i] * instance.w()[i];
        }
    }
    MechanismResult {
        q,
        t,
        v_bound: instance.modelled_loss(best.size as usize, sum_sq),
        objective: best.objective,
        feasible: true,
    }
}

/// Whether raising `owner`'s reserve from `theta[owner]` to `raised` never
/// turns a deselected owner into a selected one.
pub fn check_monotonicity(instance: &MarketInstance, theta: &[f64], owner: usize, raised: f64) -> Result<bool> {
    let current = *theta.get(owner).ok_or(Error::param("owner", "index out of range"))?;
    if !(raised > current) {
        return Err(Error::param("raised", "must exceed the current reserve"));
    }
    let before = solve(instance, theta)?;
    let mut bumped = theta.to_vec();
    bumped[owner] = raised;
    let after = solve(instance, &bumped)?;
    Ok(before.q[owner + 1] >= after.q[owner + 1])
}

/// Lower bound on the reference budget: `(L(X_R) − L(X_T)) − K·bound`.
pub fn reference_budget_bound(loss_ref_minus_target: f64, k: f64, hoeffding_term: f64) -> f64 {
    loss_ref_minus_target - k * hoeffding_term
}

/// Upper estimate `K·W(X_R, X_T)` of the reference budget.
pub fn reference_budget_upper_estimate(k: f64, wd_ref_target: f64) -> f64 {
    k * wd_ref_target
}
