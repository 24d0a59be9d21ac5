//! Owner-level WD valuation: DP composition, Lipschitz and Hoeffding bounds.

use core::f64::consts::PI;

use crate::distances::wasserstein1_gaussian;
use crate::distributions::{DistributionSpec, DpMechanism, DpParams, Family};
use crate::{Error, Result};

/// `W(X_DP, δ₀)`: the WD the additive mechanism noise alone contributes.
///
/// Laplace: `Δ/ε`. Gaussian: `(2Δ/ε)·sqrt(ln(1.25/δ)/π)`.
pub fn dp_wd_term(dp: &DpParams) -> Result<f64> {
    let dp = dp.validated()?;
    let base = dp.sensitivity / dp.epsilon;
    Ok(match dp.mechanism {
        DpMechanism::Laplace => base,
        DpMechanism::Gaussian { delta } => 2.0 * base * libm::sqrt(libm::log(1.25 / delta) / PI),
    })
}

/// How an owner's WD is composed from heterogeneity and privacy noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValuationVariant {
    /// `1/ε` only.
    DpOnly,
    /// Noiseless `W(X_i, X_T)` only.
    NonIidOnly,
    /// Closed-form WD of the noisy Gaussian source (Gaussian family only).
    ExactDpGaussian,
    /// `W(X_i, X_T) + W(X_DP, δ₀)`.
    UpperBoundDp,
}

impl ValuationVariant {
    pub const ALL: [ValuationVariant; 4] = [
        ValuationVariant::DpOnly,
        ValuationVariant::NonIidOnly,
        ValuationVariant::ExactDpGaussian,
        ValuationVariant::UpperBoundDp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ValuationVariant::DpOnly => "dp_only",
            ValuationVariant::NonIidOnly => "non_iid_only",
            ValuationVariant::ExactDpGaussian => "exact_dp_gaussian",
            ValuationVariant::UpperBoundDp => "upper_bound_dp",
        }
    }
}

/// Gaussian parameters of the aggregate target, for the exact-DP variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianTarget {
    pub mean: f64,
    pub std_dev: f64,
}

impl GaussianTarget {
    /// Moment-matched target of the Euclidean aggregate of `specs`:
    /// mean of the means and `sqrt(Σσ²)/N`.
    pub fn of_aggregate(specs: &[DistributionSpec]) -> Result<Self> {
        if specs.is_empty() {
            return Err(Error::Empty("aggregate specs"));
        }
        let n = specs.len() as f64;
        Ok(GaussianTarget {
            mean: specs.iter().map(|s| s.mean()).sum::<f64>() / n,
            std_dev: libm::sqrt(specs.iter().map(|s| s.variance()).sum::<f64>()) / n,
        })
    }
}

/// One data owner.
#[derive(Debug, Clone, PartialEq)]
pub struct OwnerProfile {
    pub id: usize,
    pub spec: DistributionSpec,
    /// Noiseless `W(X_i, X_T)`.
    pub w_raw: f64,
    pub dp: DpParams,
    /// Reserve price θ_i.
    pub reserve: f64,
    /// `W_i` under the chosen valuation variant.
    pub w_effective: f64,
}

impl OwnerProfile {
    /// Builds an owner and fills `w_effective` for `variant`.
    pub fn new(
        id: usize,
        spec: DistributionSpec,
        w_raw: f64,
        dp: DpParams,
        reserve: f64,
        variant: ValuationVariant,
        target: Option<GaussianTarget>,
    ) -> Result<Self> {
        if !(w_raw >= 0.0) || !(reserve >= 0.0) {
            return Err(Error::param("owner", "w_raw and reserve must be non-negative"));
        }
        let mut owner = OwnerProfile {
            id,
            spec,
            w_raw,
            dp: dp.validated()?,
            reserve,
            w_effective: w_raw,
        };
        owner.w_effective = effective_wd(&owner, variant, target)?;
        Ok(owner)
    }
}

/// `W_i` for `owner` under `variant`.
pub fn effective_wd(owner: &OwnerProfile, variant: ValuationVariant, target: Option<GaussianTarget>) -> Result<f64> {
    match variant {
        ValuationVariant::DpOnly => Ok(1.0 / owner.dp.validated()?.epsilon),
        ValuationVariant::NonIidOnly => Ok(owner.w_raw),
        ValuationVariant::UpperBoundDp => Ok(owner.w_raw + dp_wd_term(&owner.dp)?),
        ValuationVariant::ExactDpGaussian => {
            if owner.spec.family() != Family::Gaussian {
                return Err(Error::Incompatible("exact DP valuation needs a gaussian source"));
            }
            if !matches!(owner.dp.mechanism, DpMechanism::Gaussian { .. }) {
                return Err(Error::Incompatible("exact DP valuation needs the gaussian mechanism"));
            }
            let target = target.ok_or(Error::Incompatible("exact DP valuation needs a gaussian target"))?;
            let noise = owner.dp.noise_scale();
            let sigma = libm::sqrt(owner.spec.scale() * owner.spec.scale() + noise * noise);
            wasserstein1_gaussian(owner.spec.location(), sigma, target.mean, target.std_dev)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Population {
    /// With the `(N − |P|)/N` correction.
    Finite,
    Infinite,
}

impl Population {
    pub const ALL: [Population; 2] = [Population::Finite, Population::Infinite];

    pub fn name(self) -> &'static str {
        match self {
            Population::Finite => "finite",
            Population::Infinite => "infinite",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "finite" => Some(Population::Finite),
            "infinite" => Some(Population::Infinite),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoeffdingParams {
    /// Confidence level δ ∈ [0, 1).
    pub delta: f64,
    pub population: Population,
    pub n_total: usize,
}

impl HoeffdingParams {
    pub fn new(delta: f64, population: Population, n_total: usize) -> Result<Self> {
        if !(0.0..1.0).contains(&delta) {
            return Err(Error::param("delta", "confidence level must lie in [0, 1)"));
        }
        if n_total == 0 {
            return Err(Error::param("n_total", "must be at least one"));
        }
        Ok(HoeffdingParams {
            delta,
            population,
            n_total,
        })
    }

    /// `ln(2/(1−δ))`.
    pub fn log_term(&self) -> f64 {
        libm::log(2.0 / (1.0 - self.delta))
    }
}

/// Hoeffding bound on `W(X_P, X_T)` from the individual WDs of `selected`.
///
/// `selected` holds owner indices into `w`; duplicates are not allowed.
pub fn hoeffding_bound(w: &[f64], selected: &[usize], params: &HoeffdingParams) -> Result<f64> {
    if selected.is_empty() {
        return Err(Error::Empty("coalition"));
    }
    if w.len() > params.n_total {
        return Err(Error::SizeMismatch {
            expected: params.n_total,
            found: w.len(),
        });
    }
    let mut sum_sq = 0.0;
    for (k, &i) in selected.iter().enumerate() {
        let wi = *w.get(i).ok_or(Error::param("selected", "owner index out of range"))?;
        if selected[..k].contains(&i) {
            return Err(Error::param("selected", "duplicate owner"));
        }
        sum_sq += wi * wi;
    }
    Ok(hoeffding_from_sums(sum_sq, selected.len(), params))
}

/// Bound from `Σ_{i∈P} W_i²` and `|P| ≥ 1`.
pub fn hoeffding_from_sums(sum_sq: f64, size: usize, params: &HoeffdingParams) -> f64 {
    let p = size as f64;
    let correction = match params.population {
        Population::Finite => {
            let n = params.n_total as f64;
            ((n - p) / n).max(0.0)
        }
        Population::Infinite => 1.0,
    };
    libm::sqrt(correction * sum_sq * params.log_term() / (2.0 * p * p))
}

/// `K · W`: the Lipschitz bound on the loss gap.
pub fn lipschitz_loss_bound(k: f64, wd: f64) -> f64 {
    k * wd
}
