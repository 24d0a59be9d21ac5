//! One-dimensional statistical distances between empirical samples.
//!
//! WD and KS work directly on the sorted samples. TVD, KLD and JSD need
//! densities and use shared equal-width histograms; no flooring is applied,
//! so disjoint supports make the KLD undefined exactly as they should.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{LN_2, PI};

use crate::distributions::EmpiricalSample;
use crate::special::normal_cdf;
use crate::{Error, Result};

pub const DEFAULT_BINS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DistanceKind {
    Wd,
    Kld,
    Jsd,
    Ks,
    Tvd,
}

impl DistanceKind {
    pub const ALL: [DistanceKind; 5] = [
        DistanceKind::Wd,
        DistanceKind::Kld,
        DistanceKind::Jsd,
        DistanceKind::Ks,
        DistanceKind::Tvd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DistanceKind::Wd => "wd",
            DistanceKind::Kld => "kld",
            DistanceKind::Jsd => "jsd",
            DistanceKind::Ks => "ks",
            DistanceKind::Tvd => "tvd",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Upper bound the distance saturates at, if any.
    pub fn saturation(self) -> Option<f64> {
        match self {
            DistanceKind::Wd | DistanceKind::Kld => None,
            DistanceKind::Ks | DistanceKind::Tvd => Some(1.0),
            DistanceKind::Jsd => Some(libm::sqrt(LN_2)),
        }
    }

    pub fn needs_histogram(self) -> bool {
        matches!(self, DistanceKind::Kld | DistanceKind::Jsd | DistanceKind::Tvd)
    }
}

/// Sorted-sample 1-Wasserstein distance.
///
/// Equal sizes use the order-statistic coupling; otherwise the quantile
/// functions are integrated exactly over the merged breakpoints.
pub fn wasserstein1(a: &EmpiricalSample, b: &EmpiricalSample) -> f64 {
    if a.len() == b.len() {
        let n = a.len() as f64;
        a.values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x - y).abs())
            .sum::<f64>()
            / n
    } else {
        wasserstein1_quantile(a, b)
    }
}

/// `∫₀¹ |F_a⁻¹(u) − F_b⁻¹(u)| du` over the merged step breakpoints, for any
/// pair of sizes.
pub fn wasserstein1_quantile(a: &EmpiricalSample, b: &EmpiricalSample) -> f64 {
    let (av, bv) = (a.values(), b.values());
    let (n, m) = (av.len() as u128, bv.len() as u128);
    // breakpoints measured in units of 1/(n·m)
    let (mut i, mut j) = (0usize, 0usize);
    let mut pos: u128 = 0;
    let mut total = 0.0;
    while i < av.len() && j < bv.len() {
        let next_a = (i as u128 + 1) * m;
        let next_b = (j as u128 + 1) * n;
        let next = next_a.min(next_b);
        total += (next - pos) as f64 * (av[i] - bv[j]).abs();
        pos = next;
        if next_a == next {
            i += 1;
        }
        if next_b == next {
            j += 1;
        }
    }
    total / (n * m) as f64
}

/// Closed-form W1 between `N(μ₁, σ₁²)` and `N(μ₂, σ₂²)`.
///
/// Under the quantile coupling the difference is `N(μ₁−μ₂, (σ₁−σ₂)²)`, so
/// the distance is the mean of that folded normal.
pub fn wasserstein1_gaussian(mu1: f64, sigma1: f64, mu2: f64, sigma2: f64) -> Result<f64> {
    if !(sigma1 > 0.0) || !(sigma2 > 0.0) {
        return Err(Error::param("sigma", "must be strictly positive"));
    }
    let d = mu1 - mu2;
    let s = (sigma1 - sigma2).abs();
    if s < 1e-12 {
        return Ok(d.abs());
    }
    Ok(s * libm::sqrt(2.0 / PI) * libm::exp(-d * d / (2.0 * s * s)) + d * (1.0 - 2.0 * normal_cdf(-d / s)))
}

/// Kolmogorov–Smirnov statistic `sup |F_a − F_b|` with right-continuous
/// empirical CDFs.
pub fn kolmogorov_smirnov(a: &EmpiricalSample, b: &EmpiricalSample) -> f64 {
    let (av, bv) = (a.values(), b.values());
    let (n, m) = (av.len() as f64, bv.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut sup: f64 = 0.0;
    while i < av.len() || j < bv.len() {
        let v = match (av.get(i), bv.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        while i < av.len() && av[i] <= v {
            i += 1;
        }
        while j < bv.len() && bv[j] <= v {
            j += 1;
        }
        sup = sup.max((i as f64 / n - j as f64 / m).abs());
    }
    sup
}

/// Shared equal-width bins.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramConfig {
    bins: usize,
    lo: f64,
    hi: f64,
}

impl HistogramConfig {
    pub fn new(bins: usize, lo: f64, hi: f64) -> Result<Self> {
        if bins < 2 {
            return Err(Error::param("bin_count", "needs at least two bins"));
        }
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::NonFinite("histogram range"));
        }
        if !(lo < hi) {
            return Err(Error::param("range", "requires lo < hi"));
        }
        Ok(HistogramConfig { bins, lo, hi })
    }

    /// Bins spanning the pooled min/max of `samples`. A degenerate range is
    /// widened by one unit.
    pub fn pooled(samples: &[&EmpiricalSample], bins: usize) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Empty("histogram samples"));
        }
        let lo = samples.iter().map(|s| s.min()).fold(f64::INFINITY, f64::min);
        let hi = samples.iter().map(|s| s.max()).fold(f64::NEG_INFINITY, f64::max);
        if lo == hi {
            Self::new(bins, lo - 0.5, hi + 0.5)
        } else {
            Self::new(bins, lo, hi)
        }
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn range(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    fn bin_of(&self, x: f64) -> usize {
        let t = (x - self.lo) / (self.hi - self.lo) * self.bins as f64;
        (libm::floor(t) as usize).min(self.bins - 1)
    }

    /// Bin probabilities of `sample`.
    pub fn probabilities(&self, sample: &EmpiricalSample) -> Result<Vec<f64>> {
        if sample.min() < self.lo || sample.max() > self.hi {
            return Err(Error::Incompatible("sample support outside histogram range"));
        }
        let mut counts = vec![0.0; self.bins];
        for &x in sample.values() {
            counts[self.bin_of(x)] += 1.0;
        }
        let n = sample.len() as f64;
        counts.iter_mut().for_each(|c| *c /= n);
        Ok(counts)
    }
}

/// `½ Σ |p − q|`.
pub fn tvd_probs(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// `Σ p ln(p/q)`; `None` when some bin has `q = 0 < p`.
pub fn kld_probs(p: &[f64], q: &[f64]) -> Option<f64> {
    let mut total = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 {
            if qi <= 0.0 {
                return None;
            }
            total += pi * libm::log(pi / qi);
        }
    }
    Some(total.max(0.0))
}

/// Jensen–Shannon distance (square root of the divergence, natural log)
/// against the midpoint mixture.
pub fn jsd_probs(p: &[f64], q: &[f64]) -> f64 {
    let mut div = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        let mi = 0.5 * (pi + qi);
        if pi > 0.0 {
            div += 0.5 * pi * libm::log(pi / mi);
        }
        if qi > 0.0 {
            div += 0.5 * qi * libm::log(qi / mi);
        }
    }
    libm::sqrt(div.clamp(0.0, LN_2))
}

pub fn tvd(a: &EmpiricalSample, b: &EmpiricalSample, cfg: &HistogramConfig) -> Result<f64> {
    Ok(tvd_probs(&cfg.probabilities(a)?, &cfg.probabilities(b)?))
}

/// `KLD(a ‖ b)`; `Ok(None)` is the undefined case.
pub fn kld(a: &EmpiricalSample, b: &EmpiricalSample, cfg: &HistogramConfig) -> Result<Option<f64>> {
    Ok(kld_probs(&cfg.probabilities(a)?, &cfg.probabilities(b)?))
}

pub fn jsd(a: &EmpiricalSample, b: &EmpiricalSample, cfg: &HistogramConfig) -> Result<f64> {
    Ok(jsd_probs(&cfg.probabilities(a)?, &cfg.probabilities(b)?))
}

/// All five distances between a coalition sample and a target, computed
/// on one pooled histogram.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceSet {
    pub wd: f64,
    pub kld: Option<f64>,
    pub jsd: f64,
    pub ks: f64,
    pub tvd: f64,
}

impl DistanceSet {
    pub fn compute(coalition: &EmpiricalSample, target: &EmpiricalSample, bins: usize) -> Result<Self> {
        let cfg = HistogramConfig::pooled(&[coalition, target], bins)?;
        let p = cfg.probabilities(coalition)?;
        let q = cfg.probabilities(target)?;
        Ok(DistanceSet {
            wd: wasserstein1(coalition, target),
            kld: kld_probs(&p, &q),
            jsd: jsd_probs(&p, &q),
            ks: kolmogorov_smirnov(coalition, target),
            tvd: tvd_probs(&p, &q),
        })
    }

    pub fn get(&self, kind: DistanceKind) -> Option<f64> {
        match kind {
            DistanceKind::Wd => Some(self.wd),
            DistanceKind::Kld => self.kld,
            DistanceKind::Jsd => Some(self.jsd),
            DistanceKind::Ks => Some(self.ks),
            DistanceKind::Tvd => Some(self.tvd),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::DistributionSpec;
    use crate::rng::{stream, StreamId};
    use approx::assert_abs_diff_eq;

    fn s(v: &[f64]) -> EmpiricalSample {
        EmpiricalSample::new(v.to_vec()).unwrap()
    }

    #[test]
    fn wd_basics() {
        let a = s(&[0.3, 1.0, -2.0]);
        assert_eq!(wasserstein1(&a, &a), 0.0);
        assert_eq!(wasserstein1(&s(&[0.0, 0.0]), &s(&[1.0, 1.0])), 1.0);
        // unequal sizes: {0} vs {0, 2} -> half the mass moves by 2
        assert_abs_diff_eq!(wasserstein1(&s(&[0.0]), &s(&[0.0, 2.0])), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            wasserstein1(&s(&[0.0, 1.0, 2.0]), &s(&[0.0, 3.0])),
            // quantile steps: [0,1/3):0-0, [1/3,1/2):1-0, [1/2,2/3):1-3, [2/3,1):2-3
            (1.0 / 6.0) * 1.0 + (1.0 / 6.0) * 2.0 + (1.0 / 3.0) * 1.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn wd_gaussian_translation() {
        let mut r = stream(1, StreamId::new(0, 1, 0));
        let a = DistributionSpec::gaussian(0.0, 1.0)
            .unwrap()
            .sample(100_000, &mut r)
            .unwrap();
        let b = DistributionSpec::gaussian(3.0, 1.0)
            .unwrap()
            .sample(100_000, &mut r)
            .unwrap();
        assert_abs_diff_eq!(wasserstein1(&a, &b), 3.0, epsilon = 0.05);
    }

    #[test]
    fn closed_form_gaussian() {
        assert_abs_diff_eq!(wasserstein1_gaussian(0.0, 1.0, 3.0, 1.0).unwrap(), 3.0, epsilon = 1e-15);
        assert_eq!(wasserstein1_gaussian(1.0, 2.0, 1.0, 2.0).unwrap(), 0.0);
        assert!(wasserstein1_gaussian(0.0, 0.0, 0.0, 1.0).is_err());
        assert!(wasserstein1_gaussian(0.0, 1.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn closed_form_matches_quadrature() {
        // Oracle: midpoint quadrature of |F1⁻¹(u) − F2⁻¹(u)| on (0,1).
        let quad = |m1: f64, s1: f64, m2: f64, s2: f64| {
            let k = 400_000;
            (0..k)
                .map(|i| {
                    let z = crate::special::normal_quantile((i as f64 + 0.5) / k as f64);
                    ((m1 + s1 * z) - (m2 + s2 * z)).abs()
                })
                .sum::<f64>()
                / k as f64
        };
        let expected = quad(0.0, 1.0, 0.0, 2.0);
        assert_abs_diff_eq!(expected, 0.797_88, epsilon = 1e-4);
        assert_abs_diff_eq!(
            wasserstein1_gaussian(0.0, 1.0, 0.0, 2.0).unwrap(),
            expected,
            epsilon = 1e-4
        );
        for &(m1, s1, m2, s2) in &[(1.0, 0.5, 0.2, 2.0), (-3.0, 1.2, 0.0, 0.4), (2.0, 1.0, 2.5, 1.5)] {
            assert_abs_diff_eq!(
                wasserstein1_gaussian(m1, s1, m2, s2).unwrap(),
                quad(m1, s1, m2, s2),
                epsilon = 1e-4
            );
        }
    }

    #[test]
    fn ks_cases() {
        let a = s(&[0.0, 1.0]);
        assert_eq!(kolmogorov_smirnov(&a, &a), 0.0);
        assert_eq!(kolmogorov_smirnov(&a, &s(&[5.0, 6.0])), 1.0);
        assert_eq!(kolmogorov_smirnov(&a, &s(&[0.0, 2.0])), 0.5);
    }

    #[test]
    fn histogram_distances_identical_and_disjoint() {
        let a = s(&[0.0, 0.1, 0.2, 0.3]);
        let cfg = HistogramConfig::pooled(&[&a], 8).unwrap();
        assert_eq!(tvd(&a, &a, &cfg).unwrap(), 0.0);
        assert_eq!(kld(&a, &a, &cfg).unwrap(), Some(0.0));
        assert_eq!(jsd(&a, &a, &cfg).unwrap(), 0.0);

        let b = s(&[10.0, 10.5, 11.0]);
        let cfg = HistogramConfig::pooled(&[&a, &b], 16).unwrap();
        assert_eq!(tvd(&a, &b, &cfg).unwrap(), 1.0);
        assert_abs_diff_eq!(jsd(&a, &b, &cfg).unwrap(), libm::sqrt(LN_2), epsilon = 1e-15);
        assert_eq!(kld(&a, &b, &cfg).unwrap(), None);
    }

    #[test]
    fn two_bin_summation() {
        let p = [1.0, 0.0];
        let q = [0.5, 0.5];
        assert_abs_diff_eq!(tvd_probs(&p, &q), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(kld_probs(&p, &q).unwrap(), LN_2, epsilon = 1e-15);
        // reverse direction has q = 0 < p
        assert_eq!(kld_probs(&q, &p), None);
    }

    #[test]
    fn histogram_config_validation() {
        assert!(HistogramConfig::new(1, 0.0, 1.0).is_err());
        assert!(HistogramConfig::new(4, 1.0, 1.0).is_err());
        let cfg = HistogramConfig::new(4, 0.0, 1.0).unwrap();
        assert!(cfg.probabilities(&s(&[0.5, 2.0])).is_err());
        let c = s(&[3.0, 3.0]);
        let cfg = HistogramConfig::pooled(&[&c], 4).unwrap();
        assert_eq!(cfg.range(), (2.5, 3.5));
    }

    #[test]
    fn translation_scaling_saturates_bounded_distances() {
        let a = s(&[0.0, 0.2, 0.4, 1.0]);
        let shift = |d: f64| s(&a.values().iter().map(|x| x + d).collect::<Vec<_>>());
        let (b1, b2) = (shift(5.0), shift(10.0));
        assert_abs_diff_eq!(wasserstein1(&a, &b2), 2.0 * wasserstein1(&a, &b1), epsilon = 1e-12);
        assert_eq!(kolmogorov_smirnov(&a, &b1), 1.0);
        assert_eq!(kolmogorov_smirnov(&a, &b2), 1.0);
    }
}
