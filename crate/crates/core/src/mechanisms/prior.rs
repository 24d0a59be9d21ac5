use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// Number of interior points on which regularity is checked.
pub const REGULARITY_GRID: usize = 1024;

/// Common-knowledge prior `F_i` over an owner's reserve price.
pub trait ReservePrior: fmt::Debug + Send + Sync {
    /// Closed support `[lo, hi]`.
    fn support(&self) -> (f64, f64);
    fn cdf(&self, theta: f64) -> f64;
    fn pdf(&self, theta: f64) -> f64;

    /// `ψ(θ) = θ + F(θ)/f(θ)`.
    fn virtual_cost(&self, theta: f64) -> Result<f64> {
        let (lo, hi) = self.support();
        if !theta.is_finite() || theta < lo || theta > hi {
            return Err(Error::OutsideSupport { value: theta, lo, hi });
        }
        let f = self.pdf(theta);
        if !(f > 0.0) {
            return Err(Error::param("prior", "density vanishes inside the support"));
        }
        Ok(theta + self.cdf(theta) / f)
    }
}

/// `U(0, θ̄)`, with `ψ(θ) = 2θ`. `θ̄ = 0` is the point mass at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformPrior {
    upper: f64,
}

impl UniformPrior {
    pub fn new(upper: f64) -> Result<Self> {
        if !upper.is_finite() || upper < 0.0 {
            return Err(Error::param("upper", "must be finite and non-negative"));
        }
        Ok(UniformPrior { upper })
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }
}

impl ReservePrior for UniformPrior {
    fn support(&self) -> (f64, f64) {
        (0.0, self.upper)
    }

    fn cdf(&self, theta: f64) -> f64 {
        if self.upper == 0.0 {
            return if theta >= 0.0 { 1.0 } else { 0.0 };
        }
        (theta / self.upper).clamp(0.0, 1.0)
    }

    fn pdf(&self, theta: f64) -> f64 {
        if self.upper > 0.0 && (0.0..=self.upper).contains(&theta) {
            1.0 / self.upper
        } else {
            0.0
        }
    }

    fn virtual_cost(&self, theta: f64) -> Result<f64> {
        if !theta.is_finite() || theta < 0.0 || theta > self.upper {
            return Err(Error::OutsideSupport {
                value: theta,
                lo: 0.0,
                hi: self.upper,
            });
        }
        Ok(2.0 * theta)
    }
}

/// One prior per owner, each checked for regularity (non-decreasing ψ).
#[derive(Clone)]
pub struct PriorSpec {
    priors: Vec<Arc<dyn ReservePrior>>,
}

impl fmt::Debug for PriorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.priors.iter()).finish()
    }
}

impl PriorSpec {
    pub fn new(priors: Vec<Arc<dyn ReservePrior>>) -> Result<Self> {
        if priors.is_empty() {
            return Err(Error::Empty("priors"));
        }
        for (owner, p) in priors.iter().enumerate() {
            check_regular(owner, p.as_ref())?;
        }
        Ok(PriorSpec { priors })
    }

    /// Independent `U(0, θ̄_i)` priors.
    pub fn uniform(uppers: &[f64]) -> Result<Self> {
        let priors = uppers
            .iter()
            .map(|&u| UniformPrior::new(u).map(|p| Arc::new(p) as Arc<dyn ReservePrior>))
            .collect::<Result<Vec<_>>>()?;
        Self::new(priors)
    }

    /// `n` identical `U(0, θ̄)` priors.
    pub fn uniform_iid(upper: f64, n: usize) -> Result<Self> {
        Self::uniform(&alloc::vec![upper; n])
    }

    pub fn len(&self) -> usize {
        self.priors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.priors.is_empty()
    }

    pub fn get(&self, owner: usize) -> Option<&dyn ReservePrior> {
        self.priors.get(owner).map(|p| p.as_ref())
    }

    pub fn virtual_cost(&self, owner: usize, theta: f64) -> Result<f64> {
        self.get(owner)
            .ok_or(Error::param("owner", "index out of range"))?
            .virtual_cost(theta)
    }
}

fn check_regular(owner: usize, prior: &dyn ReservePrior) -> Result<()> {
    let (lo, hi) = prior.support();
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::param("prior", "support must be a finite interval"));
    }
    if lo == hi {
        return prior.virtual_cost(lo).map(|_| ());
    }
    let mut prev = f64::NEG_INFINITY;
    for k in 0..REGULARITY_GRID {
        let theta = lo + (hi - lo) * (k as f64 + 0.5) / REGULARITY_GRID as f64;
        let psi = prior
            .virtual_cost(theta)
            .map_err(|_| Error::IrregularPrior { owner, theta })?;
        if psi < prev - 1e-12 * prev.abs().max(1.0) {
            return Err(Error::IrregularPrior { owner, theta });
        }
        prev = psi;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug)]
    struct StepUp;

    // density jumps up at 0.5, so ψ drops there
    impl ReservePrior for StepUp {
        fn support(&self) -> (f64, f64) {
            (0.0, 1.0)
        }
        fn pdf(&self, t: f64) -> f64 {
            if t < 0.5 {
                0.2
            } else {
                1.8
            }
        }
        fn cdf(&self, t: f64) -> f64 {
            if t < 0.5 {
                0.2 * t
            } else {
                0.1 + 1.8 * (t - 0.5)
            }
        }
    }

    #[test]
    fn uniform_virtual_cost() {
        let p = UniformPrior::new(2.0).unwrap();
        assert_eq!(p.virtual_cost(0.7).unwrap(), 1.4);
        assert!(matches!(p.virtual_cost(2.5), Err(Error::OutsideSupport { .. })));
        // generic formula agrees
        assert!((p.cdf(0.7) / p.pdf(0.7) + 0.7 - 1.4).abs() < 1e-15);
    }

    #[test]
    fn degenerate_uniform() {
        let spec = PriorSpec::uniform(&[0.0, 1.0]).unwrap();
        assert_eq!(spec.virtual_cost(0, 0.0).unwrap(), 0.0);
        assert!(spec.virtual_cost(0, 0.1).is_err());
    }

    #[test]
    fn irregular_prior_rejected() {
        let priors: Vec<Arc<dyn ReservePrior>> = alloc::vec![Arc::new(StepUp)];
        assert!(matches!(
            PriorSpec::new(priors),
            Err(Error::IrregularPrior { owner: 0, .. })
        ));
    }
}
