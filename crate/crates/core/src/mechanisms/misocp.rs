//! Mixed-integer second-order-cone form of the point-wise problem.
//!
//! Variables are `q₀…q_N` (binary), `r_ij = q_i(1 − q_j)` for `i ≠ j`
//! (binary, finite population only), `s ≥ 0` and `z_i = q_i·s ≥ 0`. The
//! cone row ties `s` to the bound: finite `‖(C·W_i·r_ij)‖ ≤ Σ z_i`, infinite
//! `‖(W_i·q_i)‖ ≤ Σ z_i` with `C` moved into the objective.
//!
//! # Text format
//!
//! ```text
//! # misocp v1
//! MECHANISM joint
//! POPULATION finite
//! N 2
//! BIGM 1.5
//! VAR q0 BIN 0 1
//! VAR s CONT 0 inf
//! OBJ 0 0.5 q0 1 s
//! LIN name lo hi coef var coef var ...
//! SOC name rhs coef var ... | coef var ...
//! BOUND name var lo hi
//! END
//! ```
//!
//! `OBJ` starts with the constant. In a `SOC` row the terms left of `|`
//! are the cone's right-hand side and each term right of it is one
//! component of the normed vector. Numbers use Rust's shortest round-trip
//! formatting; infinities print as `inf` / `-inf`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use super::solve::{pointwise_feasible, pointwise_objective};
use super::{MarketInstance, Mechanism};
use crate::valuation::Population;
use crate::{Error, Result};

const EXACT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Continuous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinTerm {
    pub var: usize,
    pub coef: f64,
}

fn term(var: usize, coef: f64) -> LinTerm {
    LinTerm { var, coef }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Row {
    /// `lower ≤ Σ coef·x ≤ upper`.
    Lin {
        name: String,
        terms: Vec<LinTerm>,
        lower: f64,
        upper: f64,
    },
    /// `sqrt(Σ_k (coef_k·x_k)²) ≤ Σ rhs`.
    Soc {
        name: String,
        norm: Vec<LinTerm>,
        rhs: Vec<LinTerm>,
    },
}

impl Row {
    pub fn name(&self) -> &str {
        match self {
            Row::Lin { name, .. } | Row::Soc { name, .. } => name,
        }
    }
}

/// First row an assignment breaks.
#[derive(Debug, Clone, PartialEq)]
pub struct RowViolation {
    pub row: String,
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MisocpProblem {
    pub mechanism: Mechanism,
    pub population: Population,
    pub n_owners: usize,
    pub big_m: f64,
    pub vars: Vec<Variable>,
    pub objective: Vec<LinTerm>,
    pub objective_constant: f64,
    pub rows: Vec<Row>,
}

fn dot(terms: &[LinTerm], x: &[f64]) -> f64 {
    terms.iter().map(|t| t.coef * x[t.var]).sum()
}

fn norm(terms: &[LinTerm], x: &[f64]) -> f64 {
    libm::sqrt(
        terms
            .iter()
            .map(|t| {
                let v = t.coef * x[t.var];
                v * v
            })
            .sum(),
    )
}

impl MisocpProblem {
    pub fn q_index(&self, i: usize) -> usize {
        i
    }

    /// Index of `r_ij` (owners `i ≠ j`, zero-based), finite form only.
    pub fn r_index(&self, i: usize, j: usize) -> Option<usize> {
        if self.population != Population::Finite || i == j || i >= self.n_owners || j >= self.n_owners {
            return None;
        }
        let n = self.n_owners;
        Some(n + 1 + i * (n - 1) + if j < i { j } else { j - 1 })
    }

    pub fn s_index(&self) -> usize {
        match self.population {
            Population::Finite => self.n_owners * self.n_owners + 1,
            Population::Infinite => self.n_owners + 1,
        }
    }

    /// Index of `z_i`, owner `i` zero-based.
    pub fn z_index(&self, i: usize) -> usize {
        self.s_index() + 1 + i
    }

    pub fn binary_count(&self) -> usize {
        self.vars.iter().filter(|v| v.kind == VarKind::Binary).count()
    }

    pub fn soc_row_count(&self) -> usize {
        self.rows.iter().filter(|r| matches!(r, Row::Soc { .. })).count()
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective_constant + dot(&self.objective, x)
    }

    /// Checks bounds, integrality and every row within `tol`.
    pub fn check_feasible(&self, x: &[f64], tol: f64) -> core::result::Result<(), RowViolation> {
        for (var, &val) in self.vars.iter().zip(x) {
            let excess = (var.lower - val).max(val - var.upper);
            if excess > tol {
                return Err(RowViolation {
                    row: format!("bound:{}", var.name),
                    excess,
                });
            }
            if var.kind == VarKind::Binary && (val - libm::round(val)).abs() > tol {
                return Err(RowViolation {
                    row: format!("integrality:{}", var.name),
                    excess: (val - libm::round(val)).abs(),
                });
            }
        }
        for row in &self.rows {
            let excess = match row {
                Row::Lin {
                    terms, lower, upper, ..
                } => {
                    let v = dot(terms, x);
                    (lower - v).max(v - upper)
                }
                Row::Soc { norm: n, rhs, .. } => norm(n, x) - dot(rhs, x),
            };
            if excess > tol {
                return Err(RowViolation {
                    row: String::from(row.name()),
                    excess,
                });
            }
        }
        Ok(())
    }

    /// Assignment implied by `q`: `r_ij = q_i(1 − q_j)`, `s` from the cone
    /// row at equality divided by `Σ q_i`, `z_i = q_i·s`.
    pub fn implied_assignment(&self, q: &[bool]) -> Result<Vec<f64>> {
        let n = self.n_owners;
        if q.len() != n + 1 {
            return Err(Error::SizeMismatch {
                expected: n + 1,
                found: q.len(),
            });
        }
        let mut x = vec![0.0; self.vars.len()];
        for (i, &b) in q.iter().enumerate() {
            x[self.q_index(i)] = b as u8 as f64;
        }
        for i in 0..n {
            for j in 0..n {
                if let Some(r) = self.r_index(i, j) {
                    x[r] = (q[i + 1] && !q[j + 1]) as u8 as f64;
                }
            }
        }
        let size = q[1..].iter().filter(|&&b| b).count();
        if size > 0 {
            let cone = self
                .rows
                .iter()
                .find_map(|r| match r {
                    Row::Soc { norm: terms, .. } => Some(norm(terms, &x)),
                    _ => None,
                })
                .unwrap_or(0.0);
            let s = cone / size as f64;
            x[self.s_index()] = s;
            for i in 0..n {
                if q[i + 1] {
                    x[self.z_index(i)] = s;
                }
            }
        }
        Ok(x)
    }

    /// Plain-text dump; see the module docs for the format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let name = |v: usize| self.vars[v].name.as_str();
        let _ = writeln!(out, "# misocp v1");
        let _ = writeln!(out, "MECHANISM {}", self.mechanism.name());
        let _ = writeln!(out, "POPULATION {}", self.population.name());
        let _ = writeln!(out, "N {}", self.n_owners);
        let _ = writeln!(out, "BIGM {}", self.big_m);
        for v in &self.vars {
            let kind = match v.kind {
                VarKind::Binary => "BIN",
                VarKind::Continuous => "CONT",
            };
            let _ = writeln!(out, "VAR {} {} {} {}", v.name, kind, num(v.lower), num(v.upper));
        }
        let _ = write!(out, "OBJ {}", num(self.objective_constant));
        for t in &self.objective {
            let _ = write!(out, " {} {}", num(t.coef), name(t.var));
        }
        out.push('\n');
        for row in &self.rows {
            match row {
                Row::Lin {
                    name: rn,
                    terms,
                    lower,
                    upper,
                } => {
                    let _ = write!(out, "LIN {} {} {}", rn, num(*lower), num(*upper));
                    for t in terms {
                        let _ = write!(out, " {} {}", num(t.coef), name(t.var));
                    }
                }
                Row::Soc {
                    name: rn,
                    norm: terms,
                    rhs,
                } => {
                    let _ = write!(out, "SOC {}", rn);
                    for t in rhs {
                        let _ = write!(out, " {} {}", num(t.coef), name(t.var));
                    }
                    out.push_str(" |");
                    for t in terms {
                        let _ = write!(out, " {} {}", num(t.coef), name(t.var));
                    }
                }
            }
            out.push('\n');
        }
        for (v, var) in self.vars.iter().enumerate() {
            if var.kind == VarKind::Continuous {
                let _ = writeln!(
                    out,
                    "BOUND bound_{} {} {} {}",
                    var.name,
                    name(v),
                    num(var.lower),
                    num(var.upper)
                );
            }
        }
        out.push_str("END\n");
        out
    }
}

fn num(x: f64) -> String {
    if x == f64::INFINITY {
        String::from("inf")
    } else if x == f64::NEG_INFINITY {
        String::from("-inf")
    } else {
        format!("{}", x)
    }
}

/// Builds the MISOCP for `instance` at reserves `theta`.
///
/// Big-M: finite `M = K·sqrt(ln(2/(1−δ))/2)·max W`, which exceeds every
/// implied `s`; infinite `M = ‖W‖ + 1`.
pub fn build_misocp(instance: &MarketInstance, theta: &[f64], population: Population) -> Result<MisocpProblem> {
    let n = instance.n_owners();
    let psi = instance.virtual_costs(theta)?;
    let w = instance.w();
    let mechanism = instance.mechanism();
    let mut h = *instance.hoeffding();
    h.population = population;
    let inst = instance.with_hoeffding(h)?;
    let c = inst.bound_scale();
    let w_max = w.iter().cloned().fold(0.0, f64::max);
    let big_m = match population {
        Population::Finite => mechanism.lipschitz() * libm::sqrt(inst.hoeffding().log_term() / 2.0) * w_max,
        Population::Infinite => libm::sqrt(w.iter().map(|x| x * x).sum::<f64>()) + 1.0,
    };

    let mut p = MisocpProblem {
        mechanism,
        population,
        n_owners: n,
        big_m,
        vars: Vec::new(),
        objective: Vec::new(),
        objective_constant: 0.0,
        rows: Vec::new(),
    };
    let bin = |name: String, upper: f64| Variable {
        name,
        kind: VarKind::Binary,
        lower: 0.0,
        upper,
    };
    let q0_upper = if mechanism.has_outside_option() { 1.0 } else { 0.0 };
    p.vars.push(bin(String::from("q0"), q0_upper));
    for i in 1..=n {
        p.vars.push(bin(format!("q{}", i), 1.0));
    }
    if population == Population::Finite {
        for i in 1..=n {
            for j in 1..=n {
                if i != j {
                    p.vars.push(bin(format!("r{}_{}", i, j), 1.0));
                }
            }
        }
    }
    p.vars.push(Variable {
        name: String::from("s"),
        kind: VarKind::Continuous,
        lower: 0.0,
        upper: f64::INFINITY,
    });
    for i in 1..=n {
        p.vars.push(Variable {
            name: format!("z{}", i),
            kind: VarKind::Continuous,
            lower: 0.0,
            upper: f64::INFINITY,
        });
    }
    debug_assert_eq!(p.vars.len(), p.z_index(n - 1) + 1);

    let s = p.s_index();
    // coefficient of s in the objective and budget row
    let s_coef = match population {
        Population::Finite => 1.0,
        Population::Infinite => c,
    };
    let cone_norm: Vec<LinTerm> = match population {
        Population::Finite => {
            let mut t = Vec::new();
            for (i, &wi) in w.iter().enumerate() {
                for j in 0..n {
                    if let Some(r) = p.r_index(i, j) {
                        t.push(term(r, c * wi));
                    }
                }
            }
            t
        }
        Population::Infinite => (0..n).map(|i| term(p.q_index(i + 1), w[i])).collect(),
    };
    p.rows.push(Row::Soc {
        name: String::from("cone"),
        norm: cone_norm,
        rhs: (0..n).map(|i| term(p.z_index(i), 1.0)).collect(),
    });

    if population == Population::Finite {
        for i in 0..n {
            for j in 0..n {
                let Some(r) = p.r_index(i, j) else { continue };
                let (qi, qj) = (p.q_index(i + 1), p.q_index(j + 1));
                let tag = format!("{}_{}", i + 1, j + 1);
                p.rows.push(Row::Lin {
                    name: format!("r_le_qi_{}", tag),
                    terms: vec![term(r, 1.0), term(qi, -1.0)],
                    lower: f64::NEG_INFINITY,
                    upper: 0.0,
                });
                p.rows.push(Row::Lin {
                    name: format!("r_le_1mqj_{}", tag),
                    terms: vec![term(r, 1.0), term(qj, 1.0)],
                    lower: f64::NEG_INFINITY,
                    upper: 1.0,
                });
                p.rows.push(Row::Lin {
                    name: format!("r_ge_diff_{}", tag),
                    terms: vec![term(r, 1.0), term(qi, -1.0), term(qj, 1.0)],
                    lower: 0.0,
                    upper: f64::INFINITY,
                });
            }
        }
    }
    for i in 0..n {
        let (z, qi) = (p.z_index(i), p.q_index(i + 1));
        p.rows.push(Row::Lin {
            name: format!("z_le_mq_{}", i + 1),
            terms: vec![term(z, 1.0), term(qi, -big_m)],
            lower: f64::NEG_INFINITY,
            upper: 0.0,
        });
        p.rows.push(Row::Lin {
            name: format!("z_le_s_{}", i + 1),
            terms: vec![term(s, 1.0), term(z, -1.0)],
            lower: 0.0,
            upper: f64::INFINITY,
        });
        p.rows.push(Row::Lin {
            name: format!("z_ge_s_{}", i + 1),
            terms: vec![term(s, 1.0), term(z, -1.0), term(qi, big_m)],
            lower: f64::NEG_INFINITY,
            upper: big_m,
        });
    }
    p.rows.push(Row::Lin {
        name: String::from("cardinality"),
        terms: (0..=n).map(|i| term(p.q_index(i), 1.0)).collect(),
        lower: 1.0,
        upper: n as f64,
    });

    let psi_terms: Vec<LinTerm> = (0..n).map(|i| term(p.q_index(i + 1), psi[i])).collect();
    match mechanism {
        Mechanism::Joint { reference_budget, .. } => {
            p.objective.push(term(p.q_index(0), reference_budget));
            p.objective.push(term(s, s_coef));
            p.objective.extend(psi_terms);
        }
        Mechanism::Endogenous { reference_budget, .. } => {
            p.objective.push(term(p.q_index(0), reference_budget));
            p.objective.push(term(s, s_coef));
            let mut budget = vec![term(s, s_coef)];
            budget.extend(psi_terms);
            p.rows.push(Row::Lin {
                name: String::from("budget"),
                terms: budget,
                lower: f64::NEG_INFINITY,
                upper: reference_budget,
            });
        }
        Mechanism::Exogenous { budget } => {
            p.objective.push(term(s, s_coef));
            p.rows.push(Row::Lin {
                name: String::from("budget"),
                terms: psi_terms,
                lower: f64::NEG_INFINITY,
                upper: budget,
            });
        }
    }
    Ok(p)
}

/// Whether the MISOCP, at the auxiliaries implied by `q`, agrees with the
/// closed-form objective: same feasibility verdict and, when feasible,
/// objectives within `1e-9` (relative above magnitude 1).
pub fn check_reformulation_exactness(
    problem: &MisocpProblem,
    q: &[bool],
    instance: &MarketInstance,
    theta: &[f64],
) -> Result<bool> {
    if problem.n_owners != instance.n_owners() {
        return Err(Error::SizeMismatch {
            expected: instance.n_owners(),
            found: problem.n_owners,
        });
    }
    let mut h = *instance.hoeffding();
    h.population = problem.population;
    let inst = instance.with_hoeffding(h)?;
    let x = problem.implied_assignment(q)?;
    let misocp_ok = problem.check_feasible(&x, EXACT_TOL).is_ok();
    let point_ok = pointwise_feasible(q, &inst, theta)?;
    if misocp_ok != point_ok {
        return Ok(false);
    }
    if !point_ok {
        return Ok(true);
    }
    let a = problem.objective_value(&x);
    let b = pointwise_objective(q, &inst, theta)?;
    Ok((a - b).abs() <= EXACT_TOL * a.abs().max(b.abs()).max(1.0))
}
