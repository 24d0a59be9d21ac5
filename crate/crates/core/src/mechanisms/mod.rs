//! Point-wise procurement mechanisms.
//!
//! Myerson's lemma turns the Bayesian procurement problem into a point-wise
//! one over binary selections `q = (q₀, q₁, …, q_N)`, where `q₀` is the
//! outside option of buying nothing, and payments equal virtual costs:
//! `t_i = q_i·ψ_i(θ_i)`. Three mechanisms share that structure:
//!
//! * exogenous budget: minimise the Hoeffding bound subject to `Σ t ≤ B`;
//! * endogenous budget: minimise `K·` bound subject to `K·bound + Σ t ≤ B_ref`;
//! * joint: minimise `q₀·B_ref + K·bound + Σ t`.
//!
//! Given `q` the objective is closed form, so [`solve`] enumerates subsets
//! exactly. The equivalent MISOCP is built by [`build_misocp`] for external
//! solvers and checked against the closed form by
//! [`check_reformulation_exactness`].

mod misocp;
mod prior;
mod solve;

pub use misocp::{
    build_misocp, check_reformulation_exactness, LinTerm, MisocpProblem, Row, RowViolation, VarKind, Variable,
};
pub use prior::{PriorSpec, ReservePrior, UniformPrior, REGULARITY_GRID};
pub use solve::{
    check_monotonicity, pointwise_feasible, pointwise_objective, reference_budget_bound,
    reference_budget_upper_estimate, solve, solve_naive, MAX_ENUMERATION_OWNERS,
};

use alloc::vec::Vec;

use crate::valuation::{HoeffdingParams, OwnerProfile, Population};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mechanism {
    Exogenous { budget: f64 },
    Endogenous { reference_budget: f64, k: f64 },
    Joint { reference_budget: f64, k: f64 },
}

impl Mechanism {
    pub fn name(&self) -> &'static str {
        match self {
            Mechanism::Exogenous { .. } => "exogenous",
            Mechanism::Endogenous { .. } => "endogenous",
            Mechanism::Joint { .. } => "joint",
        }
    }

    /// Lipschitz scale applied to the bound; the exogenous mechanism is
    /// task-agnostic and uses 1.
    pub fn lipschitz(&self) -> f64 {
        match *self {
            Mechanism::Exogenous { .. } => 1.0,
            Mechanism::Endogenous { k, .. } | Mechanism::Joint { k, .. } => k,
        }
    }

    /// `B` or `B_ref`.
    pub fn budget(&self) -> f64 {
        match *self {
            Mechanism::Exogenous { budget } => budget,
            Mechanism::Endogenous { reference_budget, .. } | Mechanism::Joint { reference_budget, .. } => {
                reference_budget
            }
        }
    }

    pub fn has_outside_option(&self) -> bool {
        !matches!(self, Mechanism::Exogenous { .. })
    }
}

/// Everything a mechanism needs except the realised reserve prices.
#[derive(Debug, Clone)]
pub struct MarketInstance {
    w: Vec<f64>,
    prior: PriorSpec,
    mechanism: Mechanism,
    hoeffding: HoeffdingParams,
}

impl MarketInstance {
    /// `w` holds the effective individual WDs `W_i`.
    pub fn new(w: Vec<f64>, prior: PriorSpec, mechanism: Mechanism, hoeffding: HoeffdingParams) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::Empty("owners"));
        }
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::param("w", "individual WDs must be finite and non-negative"));
        }
        if prior.len() != w.len() {
            return Err(Error::SizeMismatch {
                expected: w.len(),
                found: prior.len(),
            });
        }
        if hoeffding.n_total != w.len() {
            return Err(Error::SizeMismatch {
                expected: w.len(),
                found: hoeffding.n_total,
            });
        }
        let budget = mechanism.budget();
        if !(budget >= 0.0) || !budget.is_finite() {
            return Err(Error::param("budget", "must be finite and non-negative"));
        }
        if !(mechanism.lipschitz() > 0.0) {
            return Err(Error::param("k", "Lipschitz constant must be strictly positive"));
        }
        Ok(MarketInstance {
            w,
            prior,
            mechanism,
            hoeffding,
        })
    }

    pub fn from_owners(
        owners: &[OwnerProfile],
        prior: PriorSpec,
        mechanism: Mechanism,
        hoeffding: HoeffdingParams,
    ) -> Result<Self> {
        Self::new(
            owners.iter().map(|o| o.w_effective).collect(),
            prior,
            mechanism,
            hoeffding,
        )
    }

    pub fn n_owners(&self) -> usize {
        self.w.len()
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn prior(&self) -> &PriorSpec {
        &self.prior
    }

    pub fn mechanism(&self) -> Mechanism {
        self.mechanism
    }

    pub fn hoeffding(&self) -> &HoeffdingParams {
        &self.hoeffding
    }

    pub fn with_hoeffding(&self, hoeffding: HoeffdingParams) -> Result<Self> {
        Self::new(self.w.clone(), self.prior.clone(), self.mechanism, hoeffding)
    }

    pub fn with_mechanism(&self, mechanism: Mechanism) -> Result<Self> {
        Self::new(self.w.clone(), self.prior.clone(), mechanism, self.hoeffding)
    }

    /// Virtual costs `ψ_i(θ_i)` for every owner.
    pub fn virtual_costs(&self, theta: &[f64]) -> Result<Vec<f64>> {
        if theta.len() != self.n_owners() {
            return Err(Error::SizeMismatch {
                expected: self.n_owners(),
                found: theta.len(),
            });
        }
        theta
            .iter()
            .enumerate()
            .map(|(i, &t)| self.prior.virtual_cost(i, t))
            .collect()
    }

    /// `C`: `K·sqrt(ln(2/(1−δ))/(2(N−1)))` for a finite population,
    /// `K·sqrt(ln(2/(1−δ))/2)` for an infinite one.
    pub fn bound_scale(&self) -> f64 {
        let k = self.mechanism.lipschitz();
        let log = self.hoeffding.log_term();
        match self.hoeffding.population {
            Population::Finite => {
                let n = self.n_owners();
                if n <= 1 {
                    // the only coalition is the full one, whose term is zero
                    0.0
                } else {
                    k * libm::sqrt(log / (2.0 * (n - 1) as f64))
                }
            }
            Population::Infinite => k * libm::sqrt(log / 2.0),
        }
    }

    /// Modelled loss `C·g(q)` of a coalition with `size ≥ 1` owners and
    /// `Σ W_i² = sum_sq`. Finite: `g = sqrt((N − |P|)·ΣW²)/|P|`; infinite:
    /// `g = sqrt(ΣW²)/|P|`.
    pub fn modelled_loss(&self, size: usize, sum_sq: f64) -> f64 {
        let p = size as f64;
        let spread = match self.hoeffding.population {
            Population::Finite => (self.n_owners() as f64 - p).max(0.0) * sum_sq,
            Population::Infinite => sum_sq,
        };
        self.bound_scale() * libm::sqrt(spread) / p
    }
}

/// Outcome of one mechanism run.
#[derive(Debug, Clone, PartialEq)]
pub struct MechanismResult {
    /// Length `N + 1`; index 0 is the outside option.
    pub q: Vec<bool>,
    /// Per-owner payments, length `N`.
    pub t: Vec<f64>,
    /// Modelled loss `C·g(q)` of the selection; zero when nothing is bought.
    pub v_bound: f64,
    pub objective: f64,
    /// False only for an exogenous budget no nonempty coalition fits in.
    pub feasible: bool,
}

impl MechanismResult {
    pub fn outside_option(&self) -> bool {
        self.q[0]
    }

    pub fn selected(&self) -> Vec<usize> {
        (1..self.q.len()).filter(|&i| self.q[i]).map(|i| i - 1).collect()
    }

    pub fn n_selected(&self) -> usize {
        self.q[1..].iter().filter(|&&b| b).count()
    }

    /// Selection as an owner bitmask (bit `i` = owner `i`).
    pub fn mask(&self) -> u32 {
        self.selected().iter().fold(0, |m, &i| m | (1 << i))
    }

    pub fn total_payment(&self) -> f64 {
        self.t.iter().sum()
    }

    /// `Ω̂ = v_bound + Σt`, the cost the mechanism believes it incurs.
    pub fn modelled_cost(&self) -> f64 {
        self.v_bound + self.total_payment()
    }
}
