use alloc::vec;
use alloc::vec::Vec;

use super::coalition::CoalitionTable;
use crate::distances::DistanceKind;
use crate::{Error, Result};

/// Largest game solved by exact enumeration.
pub const MAX_SHAPLEY_PLAYERS: usize = 12;

/// Exact Shapley values of the `n`-player game `v` (indexed by bitmask).
pub fn shapley<F: Fn(u32) -> f64>(n: usize, v: F) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Empty("players"));
    }
    if n > MAX_SHAPLEY_PLAYERS {
        return Err(Error::TooManyOwners {
            what: "exact Shapley values",
            max: MAX_SHAPLEY_PLAYERS,
            got: n,
        });
    }
    let values: Vec<f64> = (0..1u32 << n).map(&v).collect();
    // weight[s] = s!(n−s−1)!/n!
    let mut weight = vec![0.0; n];
    for (s, w) in weight.iter_mut().enumerate() {
        let mut x = 1.0 / n as f64;
        // 1/(n·C(n−1, s))
        for j in 0..s {
            x *= (j + 1) as f64 / (n - 1 - j) as f64;
        }
        *w = x;
    }
    let mut phi = vec![0.0; n];
    for (i, p) in phi.iter_mut().enumerate() {
        let bit = 1u32 << i;
        for mask in 0..1u32 << n {
            if mask & bit == 0 {
                *p += weight[mask.count_ones() as usize] * (values[(mask | bit) as usize] - values[mask as usize]);
            }
        }
    }
    Ok(phi)
}

/// Shares as proportions of their sum; NaN when the sum is zero.
pub fn proportions(phi: &[f64]) -> Vec<f64> {
    let total: f64 = phi.iter().sum();
    phi.iter().map(|p| p / total).collect()
}

/// `v(P) = max_S L(X_S) − L(X_P)` over nonempty coalitions `S`, `v(∅) = 0`.
pub fn loss_value_fn(table: &CoalitionTable, task: usize) -> impl Fn(u32) -> f64 + '_ {
    let worst = table
        .masks()
        .map(|m| table.entry(m).loss_gaps[task])
        .fold(f64::NEG_INFINITY, f64::max);
    move |mask| {
        if mask == 0 {
            0.0
        } else {
            worst - table.entry(mask).loss_gaps[task]
        }
    }
}

/// `v(P) = max_S d(X_S, X_T) − d(X_P, X_T)`, `v(∅) = 0`. Undefined
/// distances count as zero.
pub fn distance_value_fn(table: &CoalitionTable, kind: DistanceKind) -> impl Fn(u32) -> f64 + '_ {
    let d = move |mask: u32| table.entry(mask).distances.get(kind).unwrap_or(0.0);
    let worst = table.masks().map(d).fold(f64::NEG_INFINITY, f64::max);
    move |mask| if mask == 0 { 0.0 } else { worst - d(mask) }
}

/// Shapley cost-sharing benchmark with the buyer as an extra player.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapCgOutcome {
    pub owner_shares: Vec<f64>,
    pub buyer_share: f64,
    /// `full_loss + Σ owner_shares`.
    pub total_cost: f64,
}

/// `(n+1)`-player game where coalitions without the buyer are worth 0 and
/// `v(S ∪ {buyer}) = value(S)`; `value(0)` should be 0. Owners are paid
/// their Shapley shares for the full dataset, whose loss is `full_loss`.
pub fn shap_cg_benchmark<F: Fn(u32) -> f64>(n: usize, value: F, full_loss: f64) -> Result<ShapCgOutcome> {
    let buyer = 1u32 << n;
    let phi = shapley(n + 1, |mask| if mask & buyer == 0 { 0.0 } else { value(mask & !buyer) })?;
    let owner_shares = phi[..n].to_vec();
    let total_cost = full_loss + owner_shares.iter().sum::<f64>();
    Ok(ShapCgOutcome {
        owner_shares,
        buyer_share: phi[n],
        total_cost,
    })
}

#[cfg(test)]
mod tests {
    use super::super::coalition::members;
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn axioms_small() {
        let phi = shapley(2, |m| if m == 3 { 1.0 } else { 0.0 }).unwrap();
        assert_eq!(phi, vec![0.5, 0.5]);
        let c = [0.3, -1.0, 2.5];
        let phi = shapley(3, |m| members(m, 3).map(|i| c[i]).sum()).unwrap();
        for i in 0..3 {
            assert_abs_diff_eq!(phi[i], c[i], epsilon = 1e-14);
        }
        assert_eq!(proportions(&[1.0, 3.0]), vec![0.25, 0.75]);
    }

    #[test]
    fn efficiency_against_direct_sum() {
        // pseudo-random game from a fixed hash
        let v = |m: u32| {
            if m == 0 {
                0.0
            } else {
                ((m.wrapping_mul(2_654_435_761) >> 7) % 1000) as f64 / 100.0
            }
        };
        let phi = shapley(5, v).unwrap();
        assert_abs_diff_eq!(phi.iter().sum::<f64>(), v(31) - v(0), epsilon = 1e-10);
    }

    #[test]
    fn cost_sharing() {
        let r = shap_cg_benchmark(1, |m| m as f64, 0.0).unwrap();
        assert_abs_diff_eq!(r.owner_shares[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(r.buyer_share, 0.5, epsilon = 1e-15);
        let r = shap_cg_benchmark(3, |_| 0.0, 0.2).unwrap();
        assert_eq!(r.owner_shares, vec![0.0; 3]);
        assert_eq!(r.total_cost, 0.2);
        let r = shap_cg_benchmark(3, |m| m.count_ones() as f64 * 0.4, 0.0).unwrap();
        assert_abs_diff_eq!(r.owner_shares[0], r.owner_shares[2], epsilon = 1e-15);
    }

    #[test]
    fn too_many_players() {
        assert!(shapley(13, |_| 0.0).is_err());
    }
}
