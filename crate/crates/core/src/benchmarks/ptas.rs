use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PtasOutcome {
    /// Selected owners in ascending cost-per-value order.
    pub selected: Vec<usize>,
    /// Per-owner payments, zero for owners not selected.
    pub payments: Vec<f64>,
}

impl PtasOutcome {
    pub fn mask(&self) -> u32 {
        self.selected.iter().fold(0, |m, &i| m | 1 << i)
    }

    pub fn total_payment(&self) -> f64 {
        self.payments.iter().sum()
    }
}

/// Budget-feasible proportional-share benchmark.
///
/// Owners are ranked by cost per unit value `g_i = θ_i·d_i` (value `1/d_i`).
/// The largest prefix `k` with `g_k ≤ B/Σ_{i≤k} 1/d_i` is selected and each
/// selected owner is paid `min{B/Σ_{i≤k} 1/d_i, g_{k+1}}/d_i`, taking
/// `g_{N+1} = ∞`.
pub fn solve_ptas(theta: &[f64], d: &[f64], budget: f64) -> Result<PtasOutcome> {
    let n = theta.len();
    if d.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            found: d.len(),
        });
    }
    if d.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
        return Err(Error::param("d", "distances must be finite and positive"));
    }
    if !(budget >= 0.0) {
        return Err(Error::param("budget", "must be non-negative"));
    }
    let g: Vec<f64> = theta.iter().zip(d).map(|(t, di)| t * di).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| g[a].total_cmp(&g[b]).then(a.cmp(&b)));

    let mut k = 0;
    let mut share_k = 0.0;
    let mut inv_sum = 0.0;
    for (pos, &i) in order.iter().enumerate() {
        inv_sum += 1.0 / d[i];
        let share = budget / inv_sum;
        if g[i] <= share {
            k = pos + 1;
            share_k = share;
        }
    }
    let mut payments = vec![0.0; n];
    if k == 0 {
        return Ok(PtasOutcome {
            selected: Vec::new(),
            payments,
        });
    }
    let next = order.get(k).map_or(f64::INFINITY, |&i| g[i]);
    let unit = share_k.min(next);
    let selected = order[..k].to_vec();
    for &i in &selected {
        payments[i] = unit / d[i];
    }
    Ok(PtasOutcome { selected, payments })
}
