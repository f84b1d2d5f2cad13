//! Max-Pareto instances: a bounded polyhedron `{x : Ax ≤ b}`, a payoff map
//! `U` sending solutions to per-agent payoffs, and an objective `c`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::lp::{self, Direction, LpError, LpProblem, LpSolution, LpStatus, RowSense};
use crate::numeric::{dot, Rational};

/// Arithmetic used by LP-backed operations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[derive(Default)]
pub enum NumericMode {
    Float { feas_tol: f64, opt_tol: f64 },
    #[default]
    ExactRational,
}

impl NumericMode {
    pub const DEFAULT_FEAS_TOL: f64 = 1e-9;
    pub const DEFAULT_OPT_TOL: f64 = 1e-7;

    pub fn default_float() -> Self {
        NumericMode::Float { feas_tol: Self::DEFAULT_FEAS_TOL, opt_tol: Self::DEFAULT_OPT_TOL }
    }

    pub(crate) fn default_float_tolerances() -> (f64, f64) {
        (Self::DEFAULT_FEAS_TOL, Self::DEFAULT_OPT_TOL)
    }

    pub fn float(feas_tol: f64, opt_tol: f64) -> Result<Self, ModelError> {
        if !(feas_tol > 0.0 && opt_tol > 0.0) {
            return Err(ModelError::InvalidTolerance);
        }
        Ok(NumericMode::Float { feas_tol, opt_tol })
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, NumericMode::ExactRational)
    }

    pub fn feas_tol(&self) -> f64 {
        match self {
            NumericMode::Float { feas_tol, .. } => *feas_tol,
            NumericMode::ExactRational => 0.0,
        }
    }

    pub fn opt_tol(&self) -> f64 {
        match self {
            NumericMode::Float { opt_tol, .. } => *opt_tol,
            NumericMode::ExactRational => 0.0,
        }
    }
}


#[derive(Debug, Error)]
pub enum ModelError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("tolerances must be strictly positive")]
    InvalidTolerance,
    #[error("polyhedron rejected: nonempty={nonempty}, bounded={bounded}")]
    Rejected { nonempty: bool, bounded: bool },
}

/// Optional labels for rows of `A` and columns (solution coordinates).
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Names {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rows: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cols: Vec<String>,
}

/// Marks an instance whose polyhedron is the matching polytope of a
/// bipartite graph, column `e` being the edge `edges[e]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingStructure {
    pub n1: usize,
    pub n2: usize,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxParetoInstance {
    pub a: Vec<Vec<Rational>>,
    pub b: Vec<Rational>,
    pub u: Vec<Vec<Rational>>,
    pub c: Vec<Rational>,
    pub names: Option<Names>,
    pub matching: Option<MatchingStructure>,
}

/// Payoff per agent, `u = Ux`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PayoffVector(pub Vec<Rational>);

impl PayoffVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> Rational {
        self.0.iter().cloned().sum()
    }
}

impl From<Vec<Rational>> for PayoffVector {
    fn from(v: Vec<Rational>) -> Self {
        PayoffVector(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Validation {
    pub nonempty: bool,
    pub bounded: bool,
}

impl MaxParetoInstance {
    pub fn new(
        a: Vec<Vec<Rational>>,
        b: Vec<Rational>,
        u: Vec<Vec<Rational>>,
        c: Vec<Rational>,
    ) -> Result<Self, ModelError> {
        let inst = MaxParetoInstance { a, b, u, c, names: None, matching: None };
        inst.check_dimensions()?;
        Ok(inst)
    }

    /// Number of constraint rows.
    pub fn m(&self) -> usize {
        self.a.len()
    }

    /// Number of solution coordinates.
    pub fn k(&self) -> usize {
        self.c.len()
    }

    /// Number of agents.
    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn check_dimensions(&self) -> Result<(), ModelError> {
        let (m, k, n) = (self.m(), self.k(), self.n());
        if m == 0 || k == 0 || n == 0 {
            return Err(ModelError::Dimension(format!("need m, k, n >= 1 (got m={m}, k={k}, n={n})")));
        }
        if self.b.len() != m {
            return Err(ModelError::Dimension(format!("A has {m} rows but b has length {}", self.b.len())));
        }
        if let Some((i, r)) = self.a.iter().enumerate().find(|(_, r)| r.len() != k) {
            return Err(ModelError::Dimension(format!("row {i} of A has length {}, expected k={k}", r.len())));
        }
        if let Some((i, r)) = self.u.iter().enumerate().find(|(_, r)| r.len() != k) {
            return Err(ModelError::Dimension(format!("row {i} of U has length {}, expected k={k}", r.len())));
        }
        if let Some(names) = &self.names {
            if !names.rows.is_empty() && names.rows.len() != m {
                return Err(ModelError::Dimension("row names must match m".into()));
            }
            if !names.cols.is_empty() && names.cols.len() != k {
                return Err(ModelError::Dimension("column names must match k".into()));
            }
        }
        Ok(())
    }

    pub fn with_objective(&self, c: Vec<Rational>) -> Result<Self, ModelError> {
        if c.len() != self.k() {
            return Err(ModelError::Dimension(format!("objective has length {}, expected {}", c.len(), self.k())));
        }
        Ok(MaxParetoInstance { c, ..self.clone() })
    }

    /// Exact membership test `Ax ≤ b` (or within `feas_tol·‖row‖` in float mode).
    pub fn contains(&self, x: &[Rational], mode: &NumericMode) -> Result<bool, ModelError> {
        if x.len() != self.k() {
            return Err(ModelError::Dimension(format!("point has length {}, expected {}", x.len(), self.k())));
        }
        for (row, bi) in self.a.iter().zip(&self.b) {
            let lhs = dot(row, x);
            let ok = match mode {
                NumericMode::ExactRational => lhs <= *bi,
                NumericMode::Float { feas_tol, .. } => {
                    let norm = row.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max).max(1.0);
                    lhs.to_f64() <= bi.to_f64() + feas_tol * norm
                }
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// LP over the instance's polyhedron with the given objective.
    pub fn region_lp(&self, objective: Vec<Rational>, direction: Direction) -> RegionLp {
        RegionLp::build(self, objective, direction)
    }
}

/// `payoff(inst, x) = Ux`.
pub fn payoff(inst: &MaxParetoInstance, x: &[Rational]) -> Result<PayoffVector, ModelError> {
    if x.len() != inst.k() {
        return Err(ModelError::Dimension(format!("point has length {}, expected {}", x.len(), inst.k())));
    }
    Ok(PayoffVector(inst.u.iter().map(|row| dot(row, x)).collect()))
}

/// How an instance row is represented inside a [`RegionLp`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RowRole {
    Row(usize),
    Upper { var: usize },
    Lower { var: usize },
    /// Singleton row dominated by a tighter bound on the same variable.
    Redundant,
}

/// `{x : Ax ≤ b}` as an [`LpProblem`] in which rows with a single nonzero
/// become variable bounds. Row duals for the original system are recovered
/// with [`RegionLp::row_duals`].
#[derive(Debug, Clone)]
pub struct RegionLp {
    pub problem: LpProblem,
    roles: Vec<RowRole>,
    coeffs: Vec<Rational>,
}

impl RegionLp {
    fn build(inst: &MaxParetoInstance, objective: Vec<Rational>, direction: Direction) -> Self {
        let k = inst.k();
        let mut problem = LpProblem::new(k, objective, direction);
        for j in 0..k {
            problem.set_free(j);
        }
        let mut roles = vec![RowRole::Redundant; inst.m()];
        let mut coeffs = vec![Rational::ZERO; inst.m()];
        let mut upper_src: Vec<Option<usize>> = vec![None; k];
        let mut lower_src: Vec<Option<usize>> = vec![None; k];
        for (i, row) in inst.a.iter().enumerate() {
            let mut nz = row.iter().enumerate().filter(|(_, v)| !v.is_zero());
            let first = nz.next();
            let single = first.is_some() && nz.next().is_none();
            match (single, first) {
                (true, Some((j, v))) => {
                    coeffs[i] = v.clone();
                    let bound = &inst.b[i] / v;
                    if v.is_positive() {
                        if problem.upper[j].as_ref().is_none_or(|u| bound < *u) {
                            problem.upper[j] = Some(bound);
                            upper_src[j] = Some(i);
                        }
                    } else if problem.lower[j].as_ref().is_none_or(|l| bound > *l) {
                        problem.lower[j] = Some(bound);
                        lower_src[j] = Some(i);
                    }
                }
                _ => {
                    roles[i] = RowRole::Row(problem.num_rows());
                    problem.add_row(row.clone(), RowSense::Le, inst.b[i].clone());
                }
            }
        }
        for j in 0..k {
            if let Some(i) = upper_src[j] {
                roles[i] = RowRole::Upper { var: j };
            }
            if let Some(i) = lower_src[j] {
                roles[i] = RowRole::Lower { var: j };
            }
        }
        // Contradictory bounds (l > u) mean an empty polyhedron; keep them as rows
        // so the LP reports infeasibility instead of a bounds error.
        for j in 0..k {
            if let (Some(l), Some(u)) = (&problem.lower[j], &problem.upper[j]) {
                if l > u {
                    for src in [upper_src[j], lower_src[j]].into_iter().flatten() {
                        roles[src] = RowRole::Row(problem.num_rows());
                        problem.add_row(inst.a[src].clone(), RowSense::Le, inst.b[src].clone());
                    }
                    problem.lower[j] = None;
                    problem.upper[j] = None;
                }
            }
        }
        RegionLp { problem, roles, coeffs }
    }

    /// Multipliers `η`, one per instance row, such that `Aᵀη = c` and
    /// `bᵀη` equals the optimal value (for a maximization at optimum). A
    /// nonzero reduced cost marks a nonbasic variable, and its sign tells
    /// which bound it rests on.
    pub fn row_duals(&self, sol: &LpSolution) -> Vec<Rational> {
        self.roles
            .iter()
            .zip(&self.coeffs)
            .map(|(role, a)| match role {
                RowRole::Row(r) => sol.duals[*r].clone(),
                RowRole::Upper { var } => {
                    let d = &sol.reduced_costs[*var];
                    if d.is_positive() == a.is_positive() && !d.is_zero() {
                        d / a
                    } else {
                        Rational::ZERO
                    }
                }
                RowRole::Lower { var } => {
                    let d = &sol.reduced_costs[*var];
                    if d.is_positive() == a.is_positive() && !d.is_zero() {
                        d / a
                    } else {
                        Rational::ZERO
                    }
                }
                RowRole::Redundant => Rational::ZERO,
            })
            .collect()
    }
}

/// Checks nonemptiness with a phase-one LP and boundedness with `2k` LPs
/// (`max ±xᵢ`). Boundedness is reported `true` for an empty polyhedron.
pub fn validate_instance(inst: &MaxParetoInstance, mode: &NumericMode) -> Result<Validation, ModelError> {
    inst.check_dimensions()?;
    let k = inst.k();
    let feas = inst.region_lp(vec![Rational::ZERO; k], Direction::Max);
    let s = lp::solve_lp(&feas.problem, mode)?;
    if s.status == LpStatus::Infeasible {
        return Ok(Validation { nonempty: false, bounded: true });
    }
    for i in 0..k {
        for dir in [Direction::Max, Direction::Min] {
            let mut e = vec![Rational::ZERO; k];
            e[i] = Rational::ONE;
            let r = inst.region_lp(e, dir);
            if lp::solve_lp(&r.problem, mode)?.status == LpStatus::Unbounded {
                return Ok(Validation { nonempty: true, bounded: false });
            }
        }
    }
    Ok(Validation { nonempty: true, bounded: true })
}

/// Rejects instances whose polyhedron is empty or unbounded.
pub fn require_valid(inst: &MaxParetoInstance, mode: &NumericMode) -> Result<(), ModelError> {
    let v = validate_instance(inst, mode)?;
    if v.nonempty && v.bounded {
        Ok(())
    } else {
        Err(ModelError::Rejected { nonempty: v.nonempty, bounded: v.bounded })
    }
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

/// Integer → JSON number, otherwise `[p, q]`.
pub fn rational_to_json(r: &Rational) -> Value {
    let num = |z: num_bigint::BigInt| -> Value {
        Value::Number(z.to_string().parse::<serde_json::Number>().expect("integer literal"))
    };
    if r.is_integer() {
        num(r.numer())
    } else {
        Value::Array(vec![num(r.numer()), num(r.denom())])
    }
}

pub fn rational_from_json(v: &Value) -> Result<Rational, ModelError> {
    match v {
        Value::Number(n) => n.to_string().parse().map_err(|e| ModelError::Parse(format!("{e}"))),
        Value::Array(pq) if pq.len() == 2 => {
            let p = integer_from_json(&pq[0])?;
            let q = integer_from_json(&pq[1])?;
            if q <= num_bigint::BigInt::from(0) {
                return Err(ModelError::Parse(format!("denominator must be positive in {v}")));
            }
            Ok(Rational::from_bigints(p, q))
        }
        _ => Err(ModelError::Parse(format!("expected a number or [p, q], found {v}"))),
    }
}

fn integer_from_json(v: &Value) -> Result<num_bigint::BigInt, ModelError> {
    match v {
        Value::Number(n) => n.to_string().parse().map_err(|_| ModelError::Parse(format!("expected an integer, found {n}"))),
        _ => Err(ModelError::Parse(format!("expected an integer, found {v}"))),
    }
}

pub fn vector_to_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rational_to_json).collect())
}

pub fn vector_from_json(v: &Value) -> Result<Vec<Rational>, ModelError> {
    v.as_array()
        .ok_or_else(|| ModelError::Parse(format!("expected an array, found {v}")))?
        .iter()
        .map(rational_from_json)
        .collect()
}

pub fn matrix_from_json(v: &Value) -> Result<Vec<Vec<Rational>>, ModelError> {
    v.as_array()
        .ok_or_else(|| ModelError::Parse(format!("expected a matrix, found {v}")))?
        .iter()
        .map(vector_from_json)
        .collect()
}

fn matrix_to_json(m: &[Vec<Rational>]) -> Value {
    Value::Array(m.iter().map(|r| vector_to_json(r)).collect())
}

fn field<'a>(obj: &'a serde_json::Map<String, Value>, key: &str) -> Result<&'a Value, ModelError> {
    obj.get(key).ok_or_else(|| ModelError::Parse(format!("missing field {key:?}")))
}

fn count(obj: &serde_json::Map<String, Value>, key: &str) -> Result<usize, ModelError> {
    field(obj, key)?
        .as_u64()
        .map(|v| v as usize)
        .ok_or_else(|| ModelError::Parse(format!("field {key:?} must be a nonnegative integer")))
}

/// Optional `"matching": {"n1", "n2", "edges": [[i, j]]}` block marking the
/// polyhedron as a bipartite matching polytope with one column per edge.
fn matching_structure_from_json(v: &Value, k: usize) -> Result<MatchingStructure, ModelError> {
    let obj = v.as_object().ok_or_else(|| ModelError::Parse("\"matching\" must be an object".into()))?;
    let (n1, n2) = (count(obj, "n1")?, count(obj, "n2")?);
    let list = field(obj, "edges")?
        .as_array()
        .ok_or_else(|| ModelError::Parse("\"matching.edges\" must be an array".into()))?;
    let mut edges = Vec::with_capacity(list.len());
    for e in list {
        let pair = e
            .as_array()
            .filter(|p| p.len() == 2)
            .and_then(|p| Some((p[0].as_u64()? as usize, p[1].as_u64()? as usize)))
            .ok_or_else(|| ModelError::Parse("matching edge must be [i, j]".into()))?;
        if pair.0 >= n1 || pair.1 >= n2 {
            return Err(ModelError::Dimension(format!("matching edge {pair:?} out of range")));
        }
        edges.push(pair);
    }
    if edges.len() != k {
        return Err(ModelError::Dimension(format!("matching lists {} edges but k={k}", edges.len())));
    }
    Ok(MatchingStructure { n1, n2, edges })
}

impl MaxParetoInstance {
    pub fn from_json_str(s: &str) -> Result<Self, ModelError> {
        let v: Value = serde_json::from_str(s).map_err(|e| ModelError::Parse(e.to_string()))?;
        Self::from_json_value(&v)
    }

    pub fn from_json_value(v: &Value) -> Result<Self, ModelError> {
        let obj = v.as_object().ok_or_else(|| ModelError::Parse("instance must be a JSON object".into()))?;
        let (m, k, n) = (count(obj, "m")?, count(obj, "k")?, count(obj, "n")?);
        let a = matrix_from_json(field(obj, "A")?)?;
        let b = vector_from_json(field(obj, "b")?)?;
        let u = matrix_from_json(field(obj, "U")?)?;
        let c = vector_from_json(field(obj, "c")?)?;
        let names = match obj.get("names") {
            Some(nv) => Some(serde_json::from_value(nv.clone()).map_err(|e| ModelError::Parse(e.to_string()))?),
            None => None,
        };
        if a.len() != m || u.len() != n || c.len() != k {
            return Err(ModelError::Dimension(format!(
                "declared m={m}, k={k}, n={n} but A has {} rows, U has {} rows, c has length {}",
                a.len(),
                u.len(),
                c.len()
            )));
        }
        let matching = match obj.get("matching") {
            Some(mv) => Some(matching_structure_from_json(mv, k)?),
            None => None,
        };
        let inst = MaxParetoInstance { a, b, u, c, names, matching };
        inst.check_dimensions()?;
        Ok(inst)
    }

    pub fn to_json_value(&self) -> Value {
        let mut v = json!({
            "m": self.m(),
            "k": self.k(),
            "n": self.n(),
            "A": matrix_to_json(&self.a),
            "b": vector_to_json(&self.b),
            "U": matrix_to_json(&self.u),
            "c": vector_to_json(&self.c),
        });
        if let Some(names) = &self.names {
            v["names"] = serde_json::to_value(names).expect("names serialize");
        }
        if let Some(ms) = &self.matching {
            let edges: Vec<Value> = ms.edges.iter().map(|&(i, j)| json!([i, j])).collect();
            v["matching"] = json!({ "n1": ms.n1, "n2": ms.n2, "edges": edges });
        }
        v
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("instance serializes")
    }
}

/// Reads a `.mpj` instance. Dimensions are checked; the polyhedron is not
/// (see [`validate_instance`]).
pub fn load_instance(path: impl AsRef<Path>) -> Result<MaxParetoInstance, ModelError> {
    MaxParetoInstance::from_json_str(&fs::read_to_string(path)?)
}

pub fn save_instance(inst: &MaxParetoInstance, path: impl AsRef<Path>) -> Result<(), ModelError> {
    fs::write(path, inst.to_json_string() + "\n")?;
    Ok(())
}

/// Unit box `[0,1]^k` with identity payoff.
pub fn unit_box(k: usize, c: Vec<Rational>) -> MaxParetoInstance {
    let mut a = Vec::with_capacity(2 * k);
    let mut b = Vec::with_capacity(2 * k);
    for sign in [1i64, -1] {
        for i in 0..k {
            let mut row = vec![Rational::ZERO; k];
            row[i] = Rational::from_integer(sign);
            a.push(row);
            b.push(if sign > 0 { Rational::ONE } else { Rational::ZERO });
        }
    }
    let u = (0..k)
        .map(|i| (0..k).map(|j| if i == j { Rational::ONE } else { Rational::ZERO }).collect())
        .collect();
    MaxParetoInstance::new(a, b, u, c).expect("unit box dimensions")
}
