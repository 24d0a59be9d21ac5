//! Synthetic owner populations, Euclidean aggregation and local DP noise.

use alloc::vec::Vec;

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use crate::rng::Rng;
use crate::special::normal_quantile;
use crate::{Error, Result};

/// Default number of draws per synthetic distribution.
pub const DEFAULT_SAMPLE_SIZE: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Gaussian,
    /// `U(location, location + scale)`.
    Uniform,
    /// `location + Exp(mean = scale)`.
    Exponential,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Gaussian, Family::Uniform, Family::Exponential];

    pub fn name(self) -> &'static str {
        match self {
            Family::Gaussian => "gaussian",
            Family::Uniform => "uniform",
            Family::Exponential => "exponential",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Family::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// A location/scale member of one of the supported families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionSpec {
    family: Family,
    location: f64,
    scale: f64,
}

impl DistributionSpec {
    pub fn new(family: Family, location: f64, scale: f64) -> Result<Self> {
        if !location.is_finite() || !scale.is_finite() {
            return Err(Error::NonFinite("distribution parameters"));
        }
        if scale <= 0.0 {
            return Err(Error::param("scale", "must be strictly positive"));
        }
        Ok(DistributionSpec {
            family,
            location,
            scale,
        })
    }

    pub fn gaussian(mean: f64, std_dev: f64) -> Result<Self> {
        Self::new(Family::Gaussian, mean, std_dev)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn location(&self) -> f64 {
        self.location
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn mean(&self) -> f64 {
        match self.family {
            Family::Gaussian => self.location,
            Family::Uniform => self.location + 0.5 * self.scale,
            Family::Exponential => self.location + self.scale,
        }
    }

    pub fn variance(&self) -> f64 {
        match self.family {
            Family::Gaussian | Family::Exponential => self.scale * self.scale,
            Family::Uniform => self.scale * self.scale / 12.0,
        }
    }

    /// Analytic inverse CDF at `u ∈ (0, 1)`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::param("u", "quantile level must lie in (0, 1)"));
        }
        Ok(match self.family {
            Family::Gaussian => self.location + self.scale * normal_quantile(u),
            Family::Uniform => self.location + self.scale * u,
            Family::Exponential => self.location - self.scale * libm::log1p(-u),
        })
    }

    /// One draw in generation order.
    pub fn draw_one(&self, rng: &mut Rng) -> f64 {
        match self.family {
            Family::Gaussian => {
                let z: f64 = StandardNormal.sample(rng);
                self.location + self.scale * z
            }
            Family::Uniform => self.location + self.scale * rng.random::<f64>(),
            Family::Exponential => {
                let e: f64 = rand_distr::Exp1.sample(rng);
                self.location + self.scale * e
            }
        }
    }

    /// `n` i.i.d. draws in generation order.
    pub fn draw(&self, n: usize, rng: &mut Rng) -> Result<Draws> {
        if n == 0 {
            return Err(Error::Empty("sample size"));
        }
        Ok(Draws((0..n).map(|_| self.draw_one(rng)).collect()))
    }

    /// `n` i.i.d. draws, sorted.
    pub fn sample(&self, n: usize, rng: &mut Rng) -> Result<EmpiricalSample> {
        Ok(self.draw(n, rng)?.to_sample())
    }
}

/// Draws kept in generation order.
///
/// Euclidean aggregation pairs index `k` of every source, so it must happen
/// before sorting; pairing sorted samples would make the sources comonotone.
#[derive(Debug, Clone, PartialEq)]
pub struct Draws(Vec<f64>);

impl Draws {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("draws"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("draws"));
        }
        Ok(Draws(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_sample(&self) -> EmpiricalSample {
        EmpiricalSample::from_finite(self.0.clone())
    }

    pub fn into_sample(self) -> EmpiricalSample {
        EmpiricalSample::from_finite(self.0)
    }
}

/// Sorted, finite, equally weighted sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSample(Vec<f64>);

impl EmpiricalSample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("sample"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("sample"));
        }
        Ok(Self::from_finite(values))
    }

    fn from_finite(mut values: Vec<f64>) -> Self {
        values.sort_unstable_by(f64::total_cmp);
        EmpiricalSample(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.0[0]
    }

    pub fn max(&self) -> f64 {
        self.0[self.0.len() - 1]
    }

    pub fn mean(&self) -> f64 {
        self.0.iter().sum::<f64>() / self.0.len() as f64
    }

    /// Population variance (divides by n).
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.0.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / self.0.len() as f64
    }

    /// Left-continuous (type 1) empirical quantile: the `⌈n·τ⌉`-th order
    /// statistic, clamped to the first one for tiny `τ`.
    pub fn quantile(&self, tau: f64) -> f64 {
        let n = self.0.len();
        let rank = libm::ceil(n as f64 * tau) as usize;
        self.0[rank.clamp(1, n) - 1]
    }
}

/// Element-wise mean of equally sized draw vectors: `X_T = (1/N) Σ X_i`
/// realised on independent draws.
pub fn aggregate_draws(sources: &[&Draws]) -> Result<Draws> {
    let first = sources.first().ok_or(Error::Empty("aggregation sources"))?;
    let n = first.len();
    let mut acc = alloc::vec![0.0; n];
    for src in sources {
        if src.len() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                found: src.len(),
            });
        }
        for (a, v) in acc.iter_mut().zip(src.as_slice()) {
            *a += v;
        }
    }
    let k = sources.len() as f64;
    acc.iter_mut().for_each(|a| *a /= k);
    Ok(Draws(acc))
}

/// Euclidean aggregate as a sorted sample.
pub fn aggregate_euclidean(sources: &[&Draws]) -> Result<EmpiricalSample> {
    Ok(aggregate_draws(sources)?.into_sample())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DpMechanism {
    Laplace,
    /// Gaussian mechanism with failure probability `delta` in (0, 1).
    Gaussian {
        delta: f64,
    },
}

/// Local DP configuration of one owner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpParams {
    pub mechanism: DpMechanism,
    pub epsilon: f64,
    pub sensitivity: f64,
}

impl DpParams {
    pub fn laplace(epsilon: f64, sensitivity: f64) -> Result<Self> {
        DpParams {
            mechanism: DpMechanism::Laplace,
            epsilon,
            sensitivity,
        }
        .validated()
    }

    pub fn gaussian(epsilon: f64, delta: f64, sensitivity: f64) -> Result<Self> {
        DpParams {
            mechanism: DpMechanism::Gaussian { delta },
            epsilon,
            sensitivity,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.epsilon > 0.0) || self.epsilon.is_nan() {
            return Err(Error::param("epsilon", "must be strictly positive"));
        }
        if !(self.sensitivity > 0.0) || !self.sensitivity.is_finite() {
            return Err(Error::param("sensitivity", "must be strictly positive"));
        }
        if let DpMechanism::Gaussian { delta } = self.mechanism {
            if !(delta > 0.0 && delta < 1.0) {
                return Err(Error::param("delta_dp", "must lie in (0, 1)"));
            }
        }
        Ok(self)
    }

    /// Laplace scale `Δ/ε`, or the Gaussian mechanism's standard deviation
    /// `(Δ/ε)·sqrt(2 ln(1.25/δ))`.
    pub fn noise_scale(&self) -> f64 {
        let base = self.sensitivity / self.epsilon;
        match self.mechanism {
            DpMechanism::Laplace => base,
            DpMechanism::Gaussian { delta } => base * libm::sqrt(2.0 * libm::log(1.25 / delta)),
        }
    }

    fn noise(&self, rng: &mut Rng) -> f64 {
        let scale = self.noise_scale();
        match self.mechanism {
            DpMechanism::Laplace => {
                // inverse CDF on u ∈ (-1/2, 1/2)
                let u: f64 = rng.random::<f64>() - 0.5;
                let mag = -libm::log1p(-2.0 * u.abs());
                scale * if u < 0.0 { -mag } else { mag }
            }
            DpMechanism::Gaussian { .. } => {
                let z: f64 = StandardNormal.sample(rng);
                scale * z
            }
        }
    }
}

/// Adds i.i.d. mechanism noise to every value, preserving draw order.
pub fn add_dp_noise_draws(draws: &Draws, dp: &DpParams, rng: &mut Rng) -> Result<Draws> {
    let dp = dp.validated()?;
    let out: Vec<f64> = draws.as_slice().iter().map(|x| x + dp.noise(rng)).collect();
    Draws::new(out)
}

/// Adds i.i.d. mechanism noise to every value; the result is re-sorted.
pub fn add_dp_noise(sample: &EmpiricalSample, dp: &DpParams, rng: &mut Rng) -> Result<EmpiricalSample> {
    let dp = dp.validated()?;
    let out: Vec<f64> = sample.values().iter().map(|x| x + dp.noise(rng)).collect();
    EmpiricalSample::new(out)
}
