//! Dense primal simplex with bounded variables.
//!
//! The engine works on `max cᵀx` (minimization is negated internally) over
//! rows `aᵢᵀx ≤ bᵢ` or `aᵢᵀx = bᵢ` and per-variable bounds. Every optimal
//! answer is a basic solution, i.e. a vertex of the feasible region.
//!
//! In [`NumericMode::ExactRational`] the problem is first solved in floating
//! point. The final basis is then re-evaluated in exact arithmetic; if it is
//! primal and dual feasible the exact vertex is returned, otherwise the whole
//! problem is re-solved with rational pivoting.

use std::ops::{Add, Div, Mul, Neg, Sub};

use thiserror::Error;

use crate::model::NumericMode;
use crate::numeric::{Field, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum RowSense {
    Le,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Direction {
    Max,
    Min,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("variable {0} has lower bound above upper bound")]
    InvalidBounds(usize),
    #[error("numerical breakdown in floating-point simplex (retry in exact mode)")]
    NumericalBreakdown,
}

/// A linear program in row form. `None` bounds are infinite.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub a: Vec<Vec<Rational>>,
    pub b: Vec<Rational>,
    pub senses: Vec<RowSense>,
    pub objective: Vec<Rational>,
    pub direction: Direction,
    pub lower: Vec<Option<Rational>>,
    pub upper: Vec<Option<Rational>>,
}

impl LpProblem {
    /// Problem with `num_vars` variables in `[0, ∞)` and no rows.
    pub fn new(num_vars: usize, objective: Vec<Rational>, direction: Direction) -> Self {
        assert_eq!(objective.len(), num_vars);
        LpProblem {
            a: Vec::new(),
            b: Vec::new(),
            senses: Vec::new(),
            objective,
            direction,
            lower: vec![Some(Rational::ZERO); num_vars],
            upper: vec![None; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.a.len()
    }

    pub fn add_row(&mut self, row: Vec<Rational>, sense: RowSense, rhs: Rational) {
        self.a.push(row);
        self.senses.push(sense);
        self.b.push(rhs);
    }

    /// Adds `rowᵀx ≥ rhs` as the negated `≤` row.
    pub fn add_ge_row(&mut self, row: Vec<Rational>, rhs: Rational) {
        self.add_row(row.iter().map(|v| -v).collect(), RowSense::Le, -rhs);
    }

    pub fn set_free(&mut self, var: usize) {
        self.lower[var] = None;
        self.upper[var] = None;
    }

    pub fn check(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(LpError::Dimension(format!("bounds must have length {n}")));
        }
        if self.b.len() != self.a.len() || self.senses.len() != self.a.len() {
            return Err(LpError::Dimension(format!(
                "{} rows but {} right-hand sides and {} senses",
                self.a.len(),
                self.b.len(),
                self.senses.len()
            )));
        }
        if let Some((i, row)) = self.a.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(LpError::Dimension(format!("row {i} has length {}, expected {n}", row.len())));
        }
        for j in 0..n {
            if let (Some(l), Some(u)) = (&self.lower[j], &self.upper[j]) {
                if l > u {
                    return Err(LpError::InvalidBounds(j));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of [`solve_lp`].
///
/// `duals[i]` is the shadow price of row `i` (derivative of the optimal value
/// with respect to `b[i]`); `reduced_costs[j] = c_j − aⱼᵀ·duals`. For an
/// infeasible problem `farkas` holds the phase-one row multipliers.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<Rational>,
    pub objective_value: Rational,
    /// Basic columns; indices `>= num_vars` refer to row slacks
    /// (`num_vars + i`) or artificial columns.
    pub basis: Vec<usize>,
    pub duals: Vec<Rational>,
    pub reduced_costs: Vec<Rational>,
    pub farkas: Option<Vec<Rational>>,
}

impl LpSolution {
    fn empty(status: LpStatus, n: usize, m: usize) -> Self {
        LpSolution {
            status,
            x: vec![Rational::ZERO; n],
            objective_value: Rational::ZERO,
            basis: Vec::new(),
            duals: vec![Rational::ZERO; m],
            reduced_costs: vec![Rational::ZERO; n],
            farkas: None,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic,
    AtLower,
    AtUpper,
    /// Free nonbasic variable held at zero.
    Zero,
}

struct Tolerances<T> {
    feas: T,
    opt: T,
    piv: T,
}

/// Standard-form data shared by the float engine and the exact certifier:
/// columns are structurals, then one slack per row, then artificials.
struct StandardForm {
    n: usize,
    m: usize,
    /// Artificial column `k` sits in row `art_rows[k]` with coefficient `art_sign[k]`.
    art_rows: Vec<usize>,
    art_sign: Vec<i8>,
}

impl StandardForm {
    fn ncols(&self) -> usize {
        self.n + self.m + self.art_rows.len()
    }
}

struct Simplex<'p, T: Field>
where
    for<'a> &'a T: Add<&'a T, Output = T>
        + Sub<&'a T, Output = T>
        + Mul<&'a T, Output = T>
        + Div<&'a T, Output = T>
        + Neg<Output = T>,
{
    p: &'p LpProblem,
    sf: StandardForm,
    /// Row-major `m × ncols` tableau `B⁻¹[A | I | Art]`.
    t: Vec<T>,
    beta: Vec<T>,
    basis: Vec<usize>,
    state: Vec<VarState>,
    lower: Vec<Option<T>>,
    upper: Vec<Option<T>>,
    cost: Vec<T>,
    d: Vec<T>,
    tol: Tolerances<T>,
    bland: bool,
    degenerate_run: usize,
    iterations: usize,
}

const BLAND_TRIGGER: usize = 50;

enum Step {
    Optimal,
    Unbounded,
    Continue,
}

impl<'p, T: Field> Simplex<'p, T>
where
    for<'a> &'a T: Add<&'a T, Output = T>
        + Sub<&'a T, Output = T>
        + Mul<&'a T, Output = T>
        + Div<&'a T, Output = T>
        + Neg<Output = T>,
{
    fn new(p: &'p LpProblem, feas_tol: f64, opt_tol: f64) -> Self {
        let n = p.num_vars();
        let m = p.num_rows();
        let conv = |v: &Option<Rational>| v.as_ref().map(T::from_rational);
        let mut lower: Vec<Option<T>> = p.lower.iter().map(conv).collect();
        let mut upper: Vec<Option<T>> = p.upper.iter().map(conv).collect();
        let mut state = Vec::with_capacity(n + 2 * m);
        let mut xval = Vec::with_capacity(n);
        for j in 0..n {
            let (s, v) = match (&lower[j], &upper[j]) {
                (Some(l), _) => (VarState::AtLower, l.clone()),
                (None, Some(u)) => (VarState::AtUpper, u.clone()),
                (None, None) => (VarState::Zero, T::zero()),
            };
            state.push(s);
            xval.push(v);
        }
        for i in 0..m {
            lower.push(Some(T::zero()));
            upper.push(match p.senses[i] {
                RowSense::Le => None,
                RowSense::Eq => Some(T::zero()),
            });
        }
        let tol = Tolerances {
            feas: T::from_f64_tol(feas_tol),
            opt: T::from_f64_tol(opt_tol),
            piv: T::from_f64_tol(1e-9),
        };

        // Residuals decide which rows need an artificial.
        let mut resid = Vec::with_capacity(m);
        for i in 0..m {
            let mut r = T::from_rational(&p.b[i]);
            for (j, aij) in p.a[i].iter().enumerate() {
                if !aij.is_zero() && !xval[j].is_exact_zero() {
                    r = &r - &(&T::from_rational(aij) * &xval[j]);
                }
            }
            resid.push(r);
        }
        let mut art_rows = Vec::new();
        let mut art_sign = Vec::new();
        let zero = T::zero();
        for i in 0..m {
            let needs = match p.senses[i] {
                RowSense::Le => resid[i] < zero,
                RowSense::Eq => true,
            };
            if needs {
                art_rows.push(i);
                art_sign.push(if resid[i] < zero { -1 } else { 1 });
            }
        }
        let sf = StandardForm { n, m, art_rows, art_sign };
        let ncols = sf.ncols();

        let mut t = vec![T::zero(); m * ncols];
        let mut row_sign = vec![1i8; m];
        for (k, &i) in sf.art_rows.iter().enumerate() {
            row_sign[i] = sf.art_sign[k];
        }
        for i in 0..m {
            let neg = row_sign[i] < 0;
            let row = &mut t[i * ncols..(i + 1) * ncols];
            for (j, aij) in p.a[i].iter().enumerate() {
                if !aij.is_zero() {
                    let v = T::from_rational(aij);
                    row[j] = if neg { -&v } else { v };
                }
            }
            row[n + i] = if neg { -&T::one() } else { T::one() };
        }
        let mut basis = vec![0; m];
        let mut beta = Vec::with_capacity(m);
        for i in 0..m {
            basis[i] = n + i;
            beta.push(resid[i].clone());
        }
        for _ in 0..m {
            state.push(VarState::AtLower);
        }
        for (k, &i) in sf.art_rows.iter().enumerate() {
            let col = n + m + k;
            // Row was scaled by the artificial's sign, so its entry is +1.
            t[i * ncols + col] = T::one();
            state[basis[i]] = VarState::AtLower;
            basis[i] = col;
            beta[i] = resid[i].abs_val();
            lower.push(Some(T::zero()));
            upper.push(None);
            state.push(VarState::Basic);
        }
        for i in 0..m {
            state[basis[i]] = VarState::Basic;
        }

        Simplex {
            p,
            sf,
            t,
            beta,
            basis,
            state,
            lower,
            upper,
            cost: Vec::new(),
            d: Vec::new(),
            tol,
            bland: false,
            degenerate_run: 0,
            iterations: 0,
        }
    }

    fn ncols(&self) -> usize {
        self.sf.ncols()
    }

    fn nonbasic_value(&self, j: usize) -> T {
        match self.state[j] {
            VarState::AtLower => self.lower[j].clone().unwrap_or_else(T::zero),
            VarState::AtUpper => self.upper[j].clone().unwrap_or_else(T::zero),
            VarState::Zero | VarState::Basic => T::zero(),
        }
    }

    fn is_fixed(&self, j: usize) -> bool {
        matches!((&self.lower[j], &self.upper[j]), (Some(l), Some(u)) if l >= u)
    }

    fn set_cost(&mut self, cost: Vec<T>) {
        let ncols = self.ncols();
        let mut d = cost.clone();
        for i in 0..self.sf.m {
            let cb = &cost[self.basis[i]];
            if cb.is_exact_zero() {
                continue;
            }
            let row = &self.t[i * ncols..(i + 1) * ncols];
            for j in 0..ncols {
                if !row[j].is_exact_zero() {
                    d[j] = &d[j] - &(cb * &row[j]);
                }
            }
        }
        for i in 0..self.sf.m {
            d[self.basis[i]] = T::zero();
        }
        self.cost = cost;
        self.d = d;
    }

    fn choose_entering(&self) -> Option<(usize, bool)> {
        let zero = T::zero();
        let neg_opt = -&self.tol.opt;
        let mut best: Option<(usize, bool, T)> = None;
        for j in 0..self.ncols() {
            let st = self.state[j];
            if st == VarState::Basic || self.is_fixed(j) {
                continue;
            }
            let dj = &self.d[j];
            let up = match st {
                VarState::AtLower => *dj > self.tol.opt,
                VarState::AtUpper => false,
                VarState::Zero => *dj > self.tol.opt,
                VarState::Basic => unreachable!(),
            };
            let down = match st {
                VarState::AtUpper | VarState::Zero => *dj < neg_opt,
                _ => false,
            };
            if !(up || down) {
                continue;
            }
            if self.bland {
                return Some((j, up));
            }
            let mag = if *dj < zero { -dj } else { dj.clone() };
            if best.as_ref().is_none_or(|(_, _, bm)| mag > *bm) {
                best = Some((j, up, mag));
            }
        }
        best.map(|(j, up, _)| (j, up))
    }

    /// One simplex iteration on the current cost vector.
    fn step(&mut self) -> Result<Step, LpError> {
        let Some((q, increase)) = self.choose_entering() else {
            return Ok(Step::Optimal);
        };
        let ncols = self.ncols();
        let m = self.sf.m;
        let zero = T::zero();

        // Ratio test. `alpha` is the rate at which basic variable i decreases.
        let mut best_row: Option<(usize, T, T)> = None; // (row, ratio, |alpha|)
        for i in 0..m {
            let tiq = &self.t[i * ncols + q];
            if tiq.is_exact_zero() {
                continue;
            }
            let alpha = if increase { tiq.clone() } else { -tiq };
            let bi = self.basis[i];
            let ratio = if alpha > self.tol.piv {
                match &self.lower[bi] {
                    Some(l) => &(&self.beta[i] - l) / &alpha,
                    None => continue,
                }
            } else if alpha < -&self.tol.piv {
                match &self.upper[bi] {
                    Some(u) => &(u - &self.beta[i]) / &(-&alpha),
                    None => continue,
                }
            } else {
                continue;
            };
            let ratio = if ratio < zero { T::zero() } else { ratio };
            let mag = alpha.abs_val();
            let better = match &best_row {
                None => true,
                Some((r, br, bm)) => {
                    if ratio < *br {
                        true
                    } else if ratio == *br {
                        if self.bland {
                            self.basis[i] < self.basis[*r]
                        } else {
                            mag > *bm
                        }
                    } else {
                        false
                    }
                }
            };
            if better {
                best_row = Some((i, ratio, mag));
            }
        }
        let flip = match (&self.lower[q], &self.upper[q]) {
            (Some(l), Some(u)) => Some(u - l),
            _ => None,
        };

        let (theta, pivot_row) = match (best_row, flip) {
            (None, None) => return Ok(Step::Unbounded),
            (None, Some(f)) => (f, None),
            (Some((r, ratio, _)), Some(f)) if f <= ratio => {
                let _ = r;
                (f, None)
            }
            (Some((r, ratio, _)), _) => (ratio, Some(r)),
        };

        if theta <= self.tol.feas {
            self.degenerate_run += 1;
            if self.degenerate_run > BLAND_TRIGGER {
                self.bland = true;
            }
        } else {
            self.degenerate_run = 0;
        }

        let signed_theta = if increase { theta.clone() } else { -&theta };
        if !theta.is_exact_zero() {
            for i in 0..m {
                let tiq = &self.t[i * ncols + q];
                if !tiq.is_exact_zero() {
                    self.beta[i] = &self.beta[i] - &(&signed_theta * tiq);
                }
            }
        }
        let entering_value = &self.nonbasic_value(q) + &signed_theta;

        match pivot_row {
            None => {
                self.state[q] = if increase { VarState::AtUpper } else { VarState::AtLower };
            }
            Some(r) => {
                let piv = self.t[r * ncols + q].clone();
                if !T::EXACT && piv.abs_val() < T::from_f64_tol(1e-11) {
                    return Err(LpError::NumericalBreakdown);
                }
                let leaving = self.basis[r];
                let alpha = if increase { piv.clone() } else { -&piv };
                self.state[leaving] = if alpha > zero { VarState::AtLower } else { VarState::AtUpper };
                // Snap the leaving variable onto the bound it reached.
                self.beta[r] = entering_value;
                self.basis[r] = q;
                self.state[q] = VarState::Basic;
                self.pivot(r, q);
            }
        }
        self.iterations += 1;
        Ok(Step::Continue)
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let ncols = self.ncols();
        let piv = self.t[r * ncols + q].clone();
        let inv = &T::one() / &piv;
        let mut nz = Vec::new();
        for j in 0..ncols {
            let v = &mut self.t[r * ncols + j];
            if !v.is_exact_zero() {
                *v = &*v * &inv;
                nz.push(j);
            }
        }
        self.t[r * ncols + q] = T::one();
        let (before, rest) = self.t.split_at_mut(r * ncols);
        let (prow, after) = rest.split_at_mut(ncols);
        for row in before.chunks_mut(ncols).chain(after.chunks_mut(ncols)) {
            let f = row[q].clone();
            if f.is_exact_zero() {
                continue;
            }
            for &j in &nz {
                row[j] = &row[j] - &(&f * &prow[j]);
            }
            row[q] = T::zero();
        }
        let f = self.d[q].clone();
        if !f.is_exact_zero() {
            for &j in &nz {
                self.d[j] = &self.d[j] - &(&f * &prow[j]);
            }
            self.d[q] = T::zero();
        }
    }

    fn run(&mut self, max_iter: usize) -> Result<Step, LpError> {
        loop {
            if self.iterations > max_iter {
                if T::EXACT {
                    // Bland's rule guarantees termination; switch if not already.
                    self.bland = true;
                } else {
                    return Err(LpError::NumericalBreakdown);
                }
            }
            match self.step()? {
                Step::Continue => continue,
                s => return Ok(s),
            }
        }
    }

    fn art_total(&self) -> T {
        let first_art = self.sf.n + self.sf.m;
        let mut s = T::zero();
        for i in 0..self.sf.m {
            if self.basis[i] >= first_art {
                s = &s + &self.beta[i];
            }
        }
        s
    }

    fn slack_duals(&self) -> Vec<T> {
        (0..self.sf.m).map(|i| -&self.d[self.sf.n + i]).collect()
    }

    fn solve(mut self) -> Result<RawResult<T>, LpError> {
        let n = self.sf.n;
        let m = self.sf.m;
        let ncols = self.ncols();
        let max_iter = 20_000 + 50 * (ncols + m);
        let first_art = n + m;

        if !self.sf.art_rows.is_empty() {
            let mut c1 = vec![T::zero(); ncols];
            for c in c1.iter_mut().skip(first_art) {
                *c = -&T::one();
            }
            self.set_cost(c1);
            self.run(max_iter)?;
            let infeas = self.art_total();
            let scale = T::from_f64_tol(1.0 + self.p.b.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max));
            if infeas > &self.tol.feas * &scale {
                let farkas = self.slack_duals();
                return Ok(RawResult::Infeasible { farkas });
            }
            // Drive zero-valued artificials out of the basis.
            for r in 0..m {
                if self.basis[r] < first_art {
                    continue;
                }
                let mut pick: Option<(usize, T)> = None;
                for j in 0..first_art {
                    if self.state[j] == VarState::Basic {
                        continue;
                    }
                    let v = self.t[r * ncols + j].abs_val();
                    if v > self.tol.piv && pick.as_ref().is_none_or(|(_, pv)| !T::EXACT && v > *pv) {
                        pick = Some((j, v));
                    }
                }
                if let Some((j, _)) = pick {
                    let val = self.nonbasic_value(j);
                    let leaving = self.basis[r];
                    self.state[leaving] = VarState::AtLower;
                    self.basis[r] = j;
                    self.state[j] = VarState::Basic;
                    self.beta[r] = val;
                    self.pivot(r, j);
                }
            }
            for j in first_art..ncols {
                self.upper[j] = Some(T::zero());
                if self.state[j] != VarState::Basic {
                    self.state[j] = VarState::AtLower;
                }
            }
        }

        let sign = match self.p.direction {
            Direction::Max => T::one(),
            Direction::Min => -&T::one(),
        };
        let mut c2 = vec![T::zero(); ncols];
        for j in 0..n {
            c2[j] = &sign * &T::from_rational(&self.p.objective[j]);
        }
        self.set_cost(c2);
        self.degenerate_run = 0;
        let outcome = self.run(max_iter)?;
        if let Step::Unbounded = outcome {
            return Ok(RawResult::Unbounded);
        }
        let mut x = vec![T::zero(); ncols];
        for j in 0..ncols {
            if self.state[j] != VarState::Basic {
                x[j] = self.nonbasic_value(j);
            }
        }
        for i in 0..m {
            x[self.basis[i]] = self.beta[i].clone();
        }
        let duals: Vec<T> = self.slack_duals().iter().map(|y| &sign * y).collect();
        let reduced: Vec<T> = (0..n).map(|j| &sign * &self.d[j]).collect();
        Ok(RawResult::Optimal {
            x,
            duals,
            reduced,
            basis: self.basis.clone(),
            state: self.state.clone(),
            sf: self.sf,
        })
    }
}

enum RawResult<T> {
    Optimal {
        x: Vec<T>,
        duals: Vec<T>,
        reduced: Vec<T>,
        basis: Vec<usize>,
        state: Vec<VarState>,
        sf: StandardForm,
    },
    Infeasible {
        farkas: Vec<T>,
    },
    Unbounded,
}

fn objective_value(p: &LpProblem, x: &[Rational]) -> Rational {
    crate::numeric::dot(&p.objective, &x[..p.num_vars()])
}

fn finish<T: Field>(p: &LpProblem, raw: RawResult<T>) -> LpSolution
where
    for<'a> &'a T: Add<&'a T, Output = T>
        + Sub<&'a T, Output = T>
        + Mul<&'a T, Output = T>
        + Div<&'a T, Output = T>
        + Neg<Output = T>,
{
    let n = p.num_vars();
    let m = p.num_rows();
    match raw {
        RawResult::Optimal { x, duals, reduced, basis, .. } => {
            let x: Vec<Rational> = x[..n].iter().map(T::to_rational).collect();
            LpSolution {
                status: LpStatus::Optimal,
                objective_value: objective_value(p, &x),
                x,
                basis,
                duals: duals.iter().map(T::to_rational).collect(),
                reduced_costs: reduced.iter().map(T::to_rational).collect(),
                farkas: None,
            }
        }
        RawResult::Infeasible { farkas } => {
            let mut s = LpSolution::empty(LpStatus::Infeasible, n, m);
            s.farkas = Some(farkas.iter().map(T::to_rational).collect());
            s
        }
        RawResult::Unbounded => LpSolution::empty(LpStatus::Unbounded, n, m),
    }
}

/// Exact re-evaluation of a basis found in floating point.
fn certify_basis(p: &LpProblem, sf: &StandardForm, basis: &[usize], state: &[VarState]) -> Option<LpSolution> {
    let n = sf.n;
    let m = sf.m;
    let ncols = sf.ncols();
    let first_art = n + m;
    let zero = Rational::ZERO;

    // Column accessor over [A | I | Art] as sparse (row, value) entries.
    let column = |j: usize| -> Vec<(usize, Rational)> {
        if j < n {
            (0..m).filter(|&i| !p.a[i][j].is_zero()).map(|i| (i, p.a[i][j].clone())).collect()
        } else if j < first_art {
            vec![(j - n, Rational::ONE)]
        } else {
            let k = j - first_art;
            vec![(sf.art_rows[k], Rational::from_integer(sf.art_sign[k] as i64))]
        }
    };
    let lower = |j: usize| -> Option<Rational> {
        if j < n {
            p.lower[j].clone()
        } else {
            Some(Rational::ZERO)
        }
    };
    let upper = |j: usize| -> Option<Rational> {
        if j < n {
            p.upper[j].clone()
        } else if j < first_art {
            match p.senses[j - n] {
                RowSense::Le => None,
                RowSense::Eq => Some(Rational::ZERO),
            }
        } else {
            Some(Rational::ZERO)
        }
    };

    let mut xval = vec![Rational::ZERO; ncols];
    for j in 0..ncols {
        xval[j] = match state[j] {
            VarState::AtLower => lower(j)?,
            VarState::AtUpper => upper(j)?,
            _ => Rational::ZERO,
        };
    }
    let mut rhs = p.b.clone();
    for j in 0..ncols {
        if state[j] != VarState::Basic && !xval[j].is_zero() {
            for (i, v) in column(j) {
                rhs[i] = &rhs[i] - &(&v * &xval[j]);
            }
        }
    }

    // Dense LU (Doolittle, row pivoting) of the basis matrix.
    let mut lu = vec![Rational::ZERO; m * m];
    for (c, &j) in basis.iter().enumerate() {
        for (i, v) in column(j) {
            lu[i * m + c] = v;
        }
    }
    let mut perm: Vec<usize> = (0..m).collect();
    for k in 0..m {
        let pr = (k..m).find(|&r| !lu[r * m + k].is_zero())?;
        if pr != k {
            for c in 0..m {
                lu.swap(k * m + c, pr * m + c);
            }
            perm.swap(k, pr);
        }
        let pivot = lu[k * m + k].clone();
        for r in k + 1..m {
            if lu[r * m + k].is_zero() {
                continue;
            }
            let f = &lu[r * m + k] / &pivot;
            for c in k + 1..m {
                if !lu[k * m + c].is_zero() {
                    let v = &lu[r * m + c] - &(&f * &lu[k * m + c]);
                    lu[r * m + c] = v;
                }
            }
            lu[r * m + k] = f;
        }
    }
    // B x = rhs  →  L U x = P rhs
    let mut yv: Vec<Rational> = perm.iter().map(|&i| rhs[i].clone()).collect();
    for r in 0..m {
        for c in 0..r {
            if !lu[r * m + c].is_zero() && !yv[c].is_zero() {
                yv[r] = &yv[r] - &(&lu[r * m + c] * &yv[c]);
            }
        }
    }
    for r in (0..m).rev() {
        for c in r + 1..m {
            if !lu[r * m + c].is_zero() && !yv[c].is_zero() {
                yv[r] = &yv[r] - &(&lu[r * m + c] * &yv[c]);
            }
        }
        yv[r] = &yv[r] / &lu[r * m + r];
    }
    for (c, &j) in basis.iter().enumerate() {
        let v = &yv[c];
        if let Some(l) = lower(j) {
            if *v < l {
                return None;
            }
        }
        if let Some(u) = upper(j) {
            if *v > u {
                return None;
            }
        }
        xval[j] = v.clone();
    }

    // Bᵀ y = c_B  →  Uᵀ Lᵀ (P y) = c_B
    let sign = match p.direction {
        Direction::Max => Rational::ONE,
        Direction::Min => -Rational::ONE,
    };
    let cost = |j: usize| -> Rational {
        if j < n {
            &sign * &p.objective[j]
        } else {
            Rational::ZERO
        }
    };
    let mut z: Vec<Rational> = basis.iter().map(|&j| cost(j)).collect();
    for r in 0..m {
        for c in 0..r {
            if !lu[c * m + r].is_zero() && !z[c].is_zero() {
                z[r] = &z[r] - &(&lu[c * m + r] * &z[c]);
            }
        }
        z[r] = &z[r] / &lu[r * m + r];
    }
    for r in (0..m).rev() {
        for c in r + 1..m {
            if !lu[c * m + r].is_zero() && !z[c].is_zero() {
                z[r] = &z[r] - &(&lu[c * m + r] * &z[c]);
            }
        }
    }
    let mut y = vec![Rational::ZERO; m];
    for (k, &i) in perm.iter().enumerate() {
        y[i] = z[k].clone();
    }

    let mut reduced = vec![Rational::ZERO; n];
    for j in 0..ncols {
        if state[j] == VarState::Basic {
            continue;
        }
        let mut dj = cost(j);
        for (i, v) in column(j) {
            if !y[i].is_zero() {
                dj = &dj - &(&v * &y[i]);
            }
        }
        let fixed = matches!((lower(j), upper(j)), (Some(l), Some(u)) if l >= u);
        if !fixed {
            let ok = match state[j] {
                VarState::AtLower => dj <= zero,
                VarState::AtUpper => dj >= zero,
                VarState::Zero => dj.is_zero(),
                VarState::Basic => true,
            };
            if !ok {
                return None;
            }
        }
        if j < n {
            reduced[j] = &sign * &dj;
        }
    }
    let x: Vec<Rational> = xval[..n].to_vec();
    Some(LpSolution {
        status: LpStatus::Optimal,
        objective_value: objective_value(p, &x),
        x,
        basis: basis.to_vec(),
        duals: y.iter().map(|v| &sign * v).collect(),
        reduced_costs: reduced,
        farkas: None,
    })
}

fn solve_exact_pivoting(p: &LpProblem) -> Result<LpSolution, LpError> {
    let raw = Simplex::<Rational>::new(p, 0.0, 0.0).solve()?;
    Ok(finish(p, raw))
}

/// Solves `p`. See the module docs for how the two numeric modes differ.
pub fn solve_lp(p: &LpProblem, mode: &NumericMode) -> Result<LpSolution, LpError> {
    p.check()?;
    match mode {
        NumericMode::Float { feas_tol, opt_tol } => {
            let raw = Simplex::<f64>::new(p, *feas_tol, *opt_tol).solve()?;
            Ok(finish(p, raw))
        }
        NumericMode::ExactRational => {
            let (ft, ot) = NumericMode::default_float_tolerances();
            match Simplex::<f64>::new(p, ft, ot).solve() {
                Ok(RawResult::Optimal { basis, state, sf, .. }) => match certify_basis(p, &sf, &basis, &state) {
                    Some(sol) => Ok(sol),
                    None => solve_exact_pivoting(p),
                },
                _ => solve_exact_pivoting(p),
            }
        }
    }
}

/// Like [`solve_lp`] in exact mode but never consults floating point.
pub fn solve_lp_rational_only(p: &LpProblem) -> Result<LpSolution, LpError> {
    p.check()?;
    solve_exact_pivoting(p)
}

/// Maximizes (or minimizes, following `p1.direction`) `secondary` over the
/// optimal face of `p1`.
pub fn solve_lexicographic(
    p1: &LpProblem,
    secondary_objective: &[Rational],
    mode: &NumericMode,
) -> Result<LpSolution, LpError> {
    let first = solve_lp(p1, mode)?;
    if !first.is_optimal() {
        return Ok(first);
    }
    optimize_over_optimal_face(p1, &first, secondary_objective, mode)
}

/// Second stage of [`solve_lexicographic`].
///
/// The optimal face is pinned through complementary slackness with the dual
/// solution of `first`: rows with a nonzero dual become equalities and
/// variables with a nonzero reduced cost are fixed at the bound they rest
/// on. In float mode "nonzero" means larger than `opt_tol` in magnitude.
pub fn optimize_over_optimal_face(
    p1: &LpProblem,
    first: &LpSolution,
    secondary_objective: &[Rational],
    mode: &NumericMode,
) -> Result<LpSolution, LpError> {
    if secondary_objective.len() != p1.num_vars() {
        return Err(LpError::Dimension(format!(
            "secondary objective has length {}, expected {}",
            secondary_objective.len(),
            p1.num_vars()
        )));
    }
    let tol = mode.opt_tol();
    let significant = |v: &Rational| !v.is_zero() && v.to_f64().abs() > tol;
    let mut p2 = p1.clone();
    p2.objective = secondary_objective.to_vec();
    for (i, y) in first.duals.iter().enumerate() {
        if significant(y) {
            p2.senses[i] = RowSense::Eq;
        }
    }
    // For a maximization a positive reduced cost means "at upper bound".
    let upper_sign = match p1.direction {
        Direction::Max => 1,
        Direction::Min => -1,
    };
    for (j, d) in first.reduced_costs.iter().enumerate() {
        if !significant(d) {
            continue;
        }
        let bound = if d.signum() == upper_sign { p1.upper[j].clone() } else { p1.lower[j].clone() };
        if let Some(v) = bound {
            p2.lower[j] = Some(v.clone());
            p2.upper[j] = Some(v);
        }
    }
    solve_lp(&p2, mode)
}
