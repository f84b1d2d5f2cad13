//! Dominance, Pareto verification and supporting-weight certificates.

use serde_json::{json, Value};
use thiserror::Error;

use crate::lp::{self, Direction, LpError, LpProblem, LpStatus, RowSense};
use crate::model::{self, payoff, MaxParetoInstance, ModelError, NumericMode, PayoffVector};
use crate::numeric::{dot, Rational};

#[derive(Debug, Error)]
pub enum ParetoError {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("point is not in the feasible region")]
    InfeasiblePoint,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("verification LP returned status {0:?}")]
    UnexpectedStatus(LpStatus),
}

/// `true` iff `u ≥ v` componentwise with at least one strict entry.
pub fn dominates(u: &PayoffVector, v: &PayoffVector) -> Result<bool, ParetoError> {
    dominates_by(u, v, &Rational::ZERO)
}

/// Dominance where "strict" means larger by more than `margin`.
pub fn dominates_by(u: &PayoffVector, v: &PayoffVector, margin: &Rational) -> Result<bool, ParetoError> {
    if u.len() != v.len() {
        return Err(ParetoError::Dimension(format!("payoff lengths {} and {}", u.len(), v.len())));
    }
    let mut strict = false;
    for (a, b) in u.0.iter().zip(&v.0) {
        let diff = a - b;
        if margin.is_zero() {
            if diff.is_negative() {
                return Ok(false);
            }
        } else if diff < -margin {
            return Ok(false);
        }
        if diff > *margin {
            strict = true;
        }
    }
    Ok(strict)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Dominated { by: Vec<Rational> },
    NotDominated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DominanceResult {
    pub verdict: Verdict,
    /// Payoff of the witness when dominated.
    pub improvement: Option<PayoffVector>,
}

impl DominanceResult {
    pub fn is_dominated(&self) -> bool {
        matches!(self.verdict, Verdict::Dominated { .. })
    }
}

fn ensure_feasible(inst: &MaxParetoInstance, x: &[Rational], mode: &NumericMode) -> Result<(), ParetoError> {
    if inst.contains(x, mode)? {
        Ok(())
    } else {
        Err(ParetoError::InfeasiblePoint)
    }
}

/// Solves `max 1ᵀUy s.t. Uy ≥ Ux, Ay ≤ b`. `x` is dominated iff the optimum
/// exceeds `1ᵀUx` (by more than `n·opt_tol` in float mode).
pub fn verify_pareto(
    inst: &MaxParetoInstance,
    x: &[Rational],
    mode: &NumericMode,
) -> Result<DominanceResult, ParetoError> {
    ensure_feasible(inst, x, mode)?;
    let ux = payoff(inst, x)?;
    let k = inst.k();
    let ones_u: Vec<Rational> = (0..k).map(|j| inst.u.iter().map(|row| row[j].clone()).sum()).collect();
    let mut region = inst.region_lp(ones_u, Direction::Max);
    for (row, target) in inst.u.iter().zip(&ux.0) {
        region.problem.add_ge_row(row.clone(), target.clone());
    }
    let sol = lp::solve_lp(&region.problem, mode)?;
    if sol.status != LpStatus::Optimal {
        return Err(ParetoError::UnexpectedStatus(sol.status));
    }
    let base = ux.sum();
    let gain = &sol.objective_value - &base;
    let not_dominated = if mode.is_exact() {
        !gain.is_positive()
    } else {
        gain.to_f64() <= inst.n() as f64 * mode.opt_tol()
    };
    if not_dominated {
        return Ok(DominanceResult { verdict: Verdict::NotDominated, improvement: None });
    }
    let uy = payoff(inst, &sol.x)?;
    Ok(DominanceResult { verdict: Verdict::Dominated { by: sol.x }, improvement: Some(uy) })
}

/// Weight vector `w ≥ 1` and row multipliers `η ≥ 0` with `Aᵀη = Uᵀw` and
/// `wᵀUx ≥ bᵀη`. By weak duality `Ux` then maximizes `wᵀu` over all
/// attainable payoffs, so `x` is Pareto-optimal.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportCertificate {
    pub w: Vec<Rational>,
    pub eta: Vec<Rational>,
}

impl SupportCertificate {
    /// Checks every certificate condition for the point `x`. Float mode
    /// allows `feas_tol` slack scaled by the magnitude of the terms.
    pub fn validate(&self, inst: &MaxParetoInstance, x: &[Rational], mode: &NumericMode) -> Result<(), String> {
        let (m, k, n) = (inst.m(), inst.k(), inst.n());
        if self.w.len() != n || self.eta.len() != m || x.len() != k {
            return Err(format!(
                "certificate shape (w: {}, eta: {}) does not match n={n}, m={m}",
                self.w.len(),
                self.eta.len()
            ));
        }
        let tol = mode.feas_tol();
        let le = |a: &Rational, b: &Rational, scale: f64| {
            if mode.is_exact() {
                a <= b
            } else {
                a.to_f64() <= b.to_f64() + tol * scale.max(1.0)
            }
        };
        if let Some(i) = self.w.iter().position(|w| !le(&Rational::ONE, w, 1.0)) {
            return Err(format!("w[{i}] = {} is below 1", self.w[i]));
        }
        if let Some(i) = self.eta.iter().position(|e| !le(&Rational::ZERO, e, 1.0)) {
            return Err(format!("eta[{i}] = {} is negative", self.eta[i]));
        }
        for j in 0..k {
            let lhs: Rational = inst.a.iter().zip(&self.eta).map(|(row, e)| &row[j] * e).sum();
            let rhs: Rational = inst.u.iter().zip(&self.w).map(|(row, w)| &row[j] * w).sum();
            let scale = lhs.to_f64().abs().max(rhs.to_f64().abs());
            if !(le(&lhs, &rhs, scale) && le(&rhs, &lhs, scale)) {
                return Err(format!("column {j}: (Aᵀη) = {lhs} but (Uᵀw) = {rhs}"));
            }
        }
        let ux = payoff(inst, x).map_err(|e| e.to_string())?;
        let wu = dot(&self.w, &ux.0);
        let beta = dot(&inst.b, &self.eta);
        let scale = wu.to_f64().abs().max(beta.to_f64().abs());
        if !le(&beta, &wu, scale) {
            return Err(format!("bᵀη = {beta} exceeds wᵀUx = {wu}"));
        }
        Ok(())
    }

    /// `w[first] / w[last]`.
    pub fn ratio(&self, first: usize, last: usize) -> Rational {
        &self.w[first] / &self.w[last]
    }

    pub fn to_json_value(&self) -> Value {
        json!({ "w": model::vector_to_json(&self.w), "eta": model::vector_to_json(&self.eta) })
    }

    pub fn from_json_value(v: &Value) -> Result<Self, ModelError> {
        let field = |name: &str| v.get(name).ok_or_else(|| ModelError::Parse(format!("missing field \"{name}\"")));
        Ok(SupportCertificate {
            w: model::vector_from_json(field("w")?)?,
            eta: model::vector_from_json(field("eta")?)?,
        })
    }
}

/// For fixed `x`, system (w, η) is linear: `Aᵀη = Uᵀw`, `bᵀη ≤ (Ux)ᵀw`,
/// `1 ≤ w ≤ w_cap`, `η ≥ 0`. Returns the solution minimizing `1ᵀw`, or
/// `None` if the system is infeasible. With `w_cap = None` in exact mode,
/// `None` proves that `x` is not Pareto-optimal.
pub fn find_support_certificate(
    inst: &MaxParetoInstance,
    x: &[Rational],
    w_cap: Option<&Rational>,
    mode: &NumericMode,
) -> Result<Option<SupportCertificate>, ParetoError> {
    ensure_feasible(inst, x, mode)?;
    let (m, k, n) = (inst.m(), inst.k(), inst.n());
    if let Some(cap) = w_cap {
        if *cap < Rational::ONE {
            return Ok(None);
        }
    }
    let ux = payoff(inst, x)?;
    // Variables: w_0..w_{n-1}, then eta_0..eta_{m-1}.
    let mut objective = vec![Rational::ONE; n];
    objective.extend(std::iter::repeat_n(Rational::ZERO, m));
    let mut p = LpProblem::new(n + m, objective, Direction::Min);
    for i in 0..n {
        p.lower[i] = Some(Rational::ONE);
        p.upper[i] = w_cap.cloned();
    }
    for j in 0..k {
        let mut row: Vec<Rational> = inst.u.iter().map(|r| -&r[j]).collect();
        row.extend(inst.a.iter().map(|r| r[j].clone()));
        p.add_row(row, RowSense::Eq, Rational::ZERO);
    }
    let mut row: Vec<Rational> = ux.0.iter().map(|v| -v).collect();
    row.extend(inst.b.iter().cloned());
    p.add_row(row, RowSense::Le, Rational::ZERO);

    let sol = lp::solve_lp(&p, mode)?;
    match sol.status {
        LpStatus::Infeasible => Ok(None),
        LpStatus::Unbounded => Err(ParetoError::UnexpectedStatus(sol.status)),
        LpStatus::Optimal => {
            let mut x_lp = sol.x;
            let eta = x_lp.split_off(n);
            Ok(Some(SupportCertificate { w: x_lp, eta }))
        }
    }
}

/// Looks for `w > 0` with `Uᵀw = c` by maximizing `t` subject to
/// `t ≤ wᵢ`, `t ≤ 1`. The returned `w` has `min wᵢ ≥ 1` whenever some
/// scaling of the solution set allows it.
pub fn detect_aligned_interests(
    inst: &MaxParetoInstance,
    mode: &NumericMode,
) -> Result<Option<Vec<Rational>>, ParetoError> {
    let (k, n) = (inst.k(), inst.n());
    // Variables: w_0..w_{n-1}, t.
    let mut objective = vec![Rational::ZERO; n];
    objective.push(Rational::ONE);
    let mut p = LpProblem::new(n + 1, objective, Direction::Max);
    p.set_free(n);
    p.upper[n] = Some(Rational::ONE);
    for j in 0..k {
        let mut row: Vec<Rational> = inst.u.iter().map(|r| r[j].clone()).collect();
        row.push(Rational::ZERO);
        p.add_row(row, RowSense::Eq, inst.c[j].clone());
    }
    for i in 0..n {
        let mut row = vec![Rational::ZERO; n + 1];
        row[i] = -Rational::ONE;
        row[n] = Rational::ONE;
        p.add_row(row, RowSense::Le, Rational::ZERO);
    }
    let sol = lp::solve_lp(&p, mode)?;
    if sol.status != LpStatus::Optimal {
        return Ok(None);
    }
    let t = &sol.x[n];
    let positive = if mode.is_exact() { t.is_positive() } else { t.to_f64() > mode.feas_tol() };
    if !positive {
        return Ok(None);
    }
    let w: Vec<Rational> = sol.x[..n].to_vec();
    if !mode.is_exact() {
        for j in 0..k {
            let lhs: Rational = inst.u.iter().zip(&w).map(|(r, wi)| &r[j] * wi).sum();
            let cj = inst.c[j].to_f64();
            if (lhs.to_f64() - cj).abs() > mode.feas_tol() * (1.0 + cj.abs()) {
                return Ok(None);
            }
        }
    }
    Ok(Some(w))
}
