//! Comparison mechanisms: full-information and random baselines, the
//! sequential take-it-or-leave-it mechanism, the proportional-share PTAS
//! and Shapley-value allocation.

mod central;
mod coalition;
mod ptas;
mod shapley;
mod smq;

pub use central::{solve_central, solve_random, BudgetRule, CentralMetric, CentralResult};
pub use coalition::{members, CoalitionEntry, CoalitionTable, MAX_TABLE_OWNERS};
pub use ptas::{solve_ptas, PtasOutcome};
pub use shapley::{
    distance_value_fn, loss_value_fn, proportions, shap_cg_benchmark, shapley, ShapCgOutcome, MAX_SHAPLEY_PLAYERS,
};
pub use smq::{smq_expected_spend, solve_smq, SmqOutcome};

/// Rungs of the approximation ladder, from most to least informed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ApproximationLevel {
    Shap,
    CenIr,
    CenIc,
    CenW,
    CenDp,
    Fin,
    Inf,
}

impl ApproximationLevel {
    pub const ALL: [ApproximationLevel; 7] = [
        ApproximationLevel::Shap,
        ApproximationLevel::CenIr,
        ApproximationLevel::CenIc,
        ApproximationLevel::CenW,
        ApproximationLevel::CenDp,
        ApproximationLevel::Fin,
        ApproximationLevel::Inf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ApproximationLevel::Shap => "shap",
            ApproximationLevel::CenIr => "cen_ir",
            ApproximationLevel::CenIc => "cen_ic",
            ApproximationLevel::CenW => "cen_w",
            ApproximationLevel::CenDp => "cen_dp",
            ApproximationLevel::Fin => "fin",
            ApproximationLevel::Inf => "inf",
        }
    }
}
