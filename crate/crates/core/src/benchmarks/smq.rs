use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Take-it-or-leave-it offers and their outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct SmqOutcome {
    pub offers: Vec<f64>,
    pub accepted: Vec<bool>,
    /// Offer paid to every accepting owner, zero otherwise.
    pub payments: Vec<f64>,
    /// Multiplier of the expected-spend constraint; zero when slack.
    pub lambda: f64,
}

impl SmqOutcome {
    pub fn accepted_mask(&self) -> u32 {
        self.accepted
            .iter()
            .enumerate()
            .fold(0, |m, (i, &a)| if a { m | 1 << i } else { m })
    }

    pub fn total_payment(&self) -> f64 {
        self.payments.iter().sum()
    }
}

/// Expected spend `Σ p_i·F_i(p_i) = Σ p_i²/θ̄_i` under uniform priors.
pub fn smq_expected_spend(offers: &[f64], uppers: &[f64]) -> f64 {
    offers
        .iter()
        .zip(uppers)
        .map(|(&p, &u)| if u > 0.0 { p * p / u } else { 0.0 })
        .sum()
}

fn offers_at(lambda: f64, values: &[f64], uppers: &[f64]) -> Vec<f64> {
    values
        .iter()
        .zip(uppers)
        .map(|(&v, &u)| if lambda == 0.0 { u } else { u.min(v / (2.0 * lambda)) })
        .collect()
}

/// Sequential-mechanism benchmark under `U(0, θ̄_i)` priors.
///
/// Offers maximise `Σ V_i·F_i(p_i)` subject to `Σ p_i·F_i(p_i) ≤ B`; the
/// KKT solution is `p_i = min(θ̄_i, V_i/(2λ))` with `λ` found by bisection
/// from the feasible side, so the expected spend never exceeds `B`. Owner
/// `i` sells iff `θ_i ≤ p_i` and is paid `p_i`.
pub fn solve_smq(values: &[f64], uppers: &[f64], budget: f64, theta: &[f64]) -> Result<SmqOutcome> {
    let n = values.len();
    if uppers.len() != n || theta.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            found: if uppers.len() != n { uppers.len() } else { theta.len() },
        });
    }
    if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::param("values", "must be finite and non-negative"));
    }
    if uppers.iter().any(|u| !u.is_finite() || *u < 0.0) {
        return Err(Error::param("uppers", "must be finite and non-negative"));
    }
    let (offers, lambda) = if !(budget > 0.0) {
        (vec![0.0; n], f64::INFINITY)
    } else if smq_expected_spend(uppers, uppers) <= budget {
        (uppers.to_vec(), 0.0)
    } else {
        let spend = |l: f64| smq_expected_spend(&offers_at(l, values, uppers), uppers);
        let mut hi = 1.0;
        while spend(hi) > budget {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if spend(mid) > budget {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        (offers_at(hi, values, uppers), hi)
    };
    let accepted: Vec<bool> = theta.iter().zip(&offers).map(|(t, p)| t <= p).collect();
    let payments = offers
        .iter()
        .zip(&accepted)
        .map(|(&p, &a)| if a { p } else { 0.0 })
        .collect();
    Ok(SmqOutcome {
        offers,
        accepted,
        payments,
        lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn symmetric_kkt() {
        let r = solve_smq(&[1.0, 1.0], &[1.0, 1.0], 0.5, &[0.4, 0.6]).unwrap();
        assert_abs_diff_eq!(r.offers[0], 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(r.offers[1], 0.5, epsilon = 1e-10);
        assert_eq!(r.accepted, vec![true, false]);
        assert_eq!(r.payments[1], 0.0);
    }

    #[test]
    fn asymmetric_kkt() {
        let r = solve_smq(&[2.0, 1.0], &[1.0, 1.0], 0.5, &[0.0, 0.0]).unwrap();
        let c = libm::sqrt(0.1);
        assert_abs_diff_eq!(r.offers[0], 2.0 * c, epsilon = 1e-10);
        assert_abs_diff_eq!(r.offers[1], c, epsilon = 1e-10);
        assert!(smq_expected_spend(&r.offers, &[1.0, 1.0]) <= 0.5);
    }

    #[test]
    fn large_and_zero_budget() {
        let r = solve_smq(&[1.0, 3.0], &[1.0, 2.0], 100.0, &[1.0, 0.5]).unwrap();
        assert_eq!(r.offers, vec![1.0, 2.0]);
        assert_eq!(r.lambda, 0.0);
        assert_eq!(r.accepted_mask(), 0b11);
        let r = solve_smq(&[1.0, 3.0], &[1.0, 2.0], 0.0, &[0.1, 0.5]).unwrap();
        assert_eq!(r.offers, vec![0.0, 0.0]);
        assert_eq!(r.total_payment(), 0.0);
    }
}
