//! Max-Pareto solvers: weight-space heuristic, exact oracles and the
//! exponential-weight instance family.

use std::collections::{HashMap, HashSet};
use std::time::{Duration, Instant};

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::lp::{self, Direction, LpError, LpStatus};
use crate::matching::{self, BipartiteInstance, Matching, MatchingError};
use crate::model::{self, MaxParetoInstance, ModelError, NumericMode};
use crate::numeric::{dot, Rational};
use crate::pareto::{self, ParetoError, SupportCertificate};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("instance too large for exact enumeration (k={k}, m={m}; caps {cap_k}/{cap_m})")]
    CapExceeded { k: usize, m: usize, cap_k: usize, cap_m: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("LP over the feasible region returned {0:?}")]
    UnexpectedStatus(LpStatus),
    #[error("incumbent failed verification: {0}")]
    Unverified(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Pareto(#[from] ParetoError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
}

#[derive(Debug, Clone)]
pub struct HeuristicConfig {
    /// Upper bound on each weight; weights live in `[1, w_cap]`.
    pub w_cap: Rational,
    pub starts: usize,
    pub local_steps: usize,
    pub step_factor: Rational,
    pub time_limit: Duration,
    pub seed: u64,
    pub mode: NumericMode,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        HeuristicConfig {
            w_cap: Rational::from(10),
            starts: 8,
            local_steps: 10,
            step_factor: Rational::from(2),
            time_limit: Duration::from_secs(60),
            seed: 0,
            mode: NumericMode::default_float(),
        }
    }
}

impl HeuristicConfig {
    pub fn check(&self) -> Result<(), SolverError> {
        if self.w_cap < Rational::ONE {
            return Err(SolverError::InvalidConfig("w_cap must be at least 1".into()));
        }
        if self.starts == 0 || self.local_steps == 0 {
            return Err(SolverError::InvalidConfig("starts and local_steps must be at least 1".into()));
        }
        if self.step_factor <= Rational::ONE {
            return Err(SolverError::InvalidConfig("step_factor must exceed 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ExactConfig {
    pub cap_k: usize,
    pub cap_m: usize,
    pub time_limit: Option<Duration>,
    pub mode: NumericMode,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig { cap_k: 12, cap_m: 24, time_limit: None, mode: NumericMode::ExactRational }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    /// Search finished without proving optimality (bounded weights).
    Heuristic,
    TimeLimit,
    NoIncumbent,
}

impl SolveStatus {
    pub fn label(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "Optimal",
            SolveStatus::Heuristic => "Heuristic",
            SolveStatus::TimeLimit => "TimeLimit",
            SolveStatus::NoIncumbent => "NoIncumbent",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub incumbent_x: Option<Vec<Rational>>,
    pub lb: Option<Rational>,
    pub ub: Option<Rational>,
    pub ub_valid: bool,
    pub certificate: Option<SupportCertificate>,
    pub po_verified: bool,
    pub status: SolveStatus,
    pub wallclock: Duration,
    pub iterations: u64,
}

impl SolveReport {
    fn empty(status: SolveStatus, started: Instant, iterations: u64) -> Self {
        SolveReport {
            incumbent_x: None,
            lb: None,
            ub: None,
            ub_valid: false,
            certificate: None,
            po_verified: false,
            status,
            wallclock: started.elapsed(),
            iterations,
        }
    }

    pub fn to_json_value(&self) -> Value {
        let opt = |v: &Option<Rational>| v.as_ref().map_or(Value::Null, model::rational_to_json);
        json!({
            "lb": opt(&self.lb),
            "ub": opt(&self.ub),
            "ub_valid": self.ub_valid,
            "x": self.incumbent_x.as_deref().map_or(Value::Null, model::vector_to_json),
            "certificate": self.certificate.as_ref().map_or(Value::Null, SupportCertificate::to_json_value),
            "time_ms": self.wallclock.as_millis() as u64,
            "iterations": self.iterations,
            "status": self.status.label(),
            "po_verified": self.po_verified,
        })
    }
}

/// Result of [`evaluate_weight`].
#[derive(Debug, Clone)]
pub struct WeightEvaluation {
    pub x: Vec<Rational>,
    pub value: Rational,
    pub certificate: SupportCertificate,
}

/// Scales `w` so that its smallest entry is 1.
pub fn normalize_weights(w: &[Rational]) -> Vec<Rational> {
    let min = w.iter().min().cloned().unwrap_or(Rational::ONE);
    w.iter().map(|v| v / &min).collect()
}

/// Maximizes `wᵀUx` over the region, then `cᵀx` over that optimal face.
/// The certificate pairs the normalized `w` with the first-stage row
/// duals, so `x` is Pareto-optimal whenever it validates.
pub fn evaluate_weight(
    inst: &MaxParetoInstance,
    w: &[Rational],
    mode: &NumericMode,
) -> Result<WeightEvaluation, SolverError> {
    if w.len() != inst.n() {
        return Err(ModelError::Dimension(format!("weight vector has length {}, expected {}", w.len(), inst.n())).into());
    }
    if w.iter().any(|v| !v.is_positive()) {
        return Err(SolverError::InvalidConfig("weights must be strictly positive".into()));
    }
    let w = normalize_weights(w);
    let k = inst.k();
    let obj: Vec<Rational> = (0..k).map(|j| inst.u.iter().zip(&w).map(|(row, wi)| &row[j] * wi).sum()).collect();
    let region = inst.region_lp(obj, Direction::Max);
    let first = lp::solve_lp(&region.problem, mode)?;
    if !first.is_optimal() {
        return Err(SolverError::UnexpectedStatus(first.status));
    }
    let second = lp::optimize_over_optimal_face(&region.problem, &first, &inst.c, mode)?;
    if !second.is_optimal() {
        return Err(SolverError::UnexpectedStatus(second.status));
    }
    let eta = region.row_duals(&first);
    let value = dot(&inst.c, &second.x);
    Ok(WeightEvaluation { x: second.x, value, certificate: SupportCertificate { w, eta } })
}

/// Verifies a candidate in exact arithmetic. Returns `Err` with the reason
/// if either the certificate or the dominance LP rejects it.
fn verify_exact(inst: &MaxParetoInstance, ev: &WeightEvaluation) -> Result<(), String> {
    let exact = NumericMode::ExactRational;
    ev.certificate.validate(inst, &ev.x, &exact)?;
    match pareto::verify_pareto(inst, &ev.x, &exact) {
        Ok(r) if !r.is_dominated() => Ok(()),
        Ok(_) => Err("point is dominated".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn report_from(ev: WeightEvaluation, status: SolveStatus, started: Instant, iterations: u64) -> SolveReport {
    let exact_ub = status == SolveStatus::Optimal;
    SolveReport {
        lb: Some(ev.value.clone()),
        ub: exact_ub.then(|| ev.value.clone()),
        ub_valid: exact_ub,
        incumbent_x: Some(ev.x),
        certificate: Some(ev.certificate),
        po_verified: true,
        status,
        wallclock: started.elapsed(),
        iterations,
    }
}

/// Rounds a positive float to a rational with denominator 1024, clamped to
/// `[1, cap]`.
fn snap_weight(v: f64, cap: &Rational) -> Rational {
    let r = Rational::new((v * 1024.0).round() as i64, 1024);
    Rational::min_of(&Rational::max_of(&r, &Rational::ONE), cap)
}

/// Multi-start weight search with coordinate local search.
///
/// Aligned interests are tried first: if `c = Uᵀw` for some `w > 0`, the
/// LP optimum is Pareto-optimal and the report is `Optimal`. Otherwise each
/// start draws `w` log-uniformly from `[1, w_cap]ⁿ` (start `s` uses its own
/// seed derived from `cfg.seed`), evaluates it, and repeatedly multiplies
/// or divides single coordinates by `step_factor` while that improves
/// `cᵀx`. The best candidate (ties to the earliest start) is re-evaluated
/// and verified in exact arithmetic before it is reported; no upper bound
/// is claimed.
pub fn solve_heuristic(inst: &MaxParetoInstance, cfg: &HeuristicConfig) -> Result<SolveReport, SolverError> {
    cfg.check()?;
    let started = Instant::now();
    let deadline = started + cfg.time_limit;
    let mode = &cfg.mode;
    let mut iterations = 0u64;

    if let Some(w) = pareto::detect_aligned_interests(inst, mode)? {
        iterations += 1;
        let ev = evaluate_weight(inst, &w, &NumericMode::ExactRational)?;
        verify_exact(inst, &ev).map_err(SolverError::Unverified)?;
        // Every point of the region is weakly beaten by this one in cᵀx, so
        // the value is also an upper bound.
        return Ok(report_from(ev, SolveStatus::Optimal, started, iterations));
    }

    let n = inst.n();
    let log_cap = cfg.w_cap.to_f64().ln();
    let mut cache: HashMap<Vec<Rational>, Rational> = HashMap::new();
    // (value, start, weights) of every local optimum, best first later.
    let mut finals: Vec<(Rational, usize, Vec<Rational>)> = Vec::new();
    let mut timed_out = false;

    'starts: for s in 0..cfg.starts {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(s as u64));
        let mut w: Vec<Rational> =
            (0..n).map(|_| snap_weight(rng.gen_range(0.0..=log_cap).exp(), &cfg.w_cap)).collect();
        let mut eval = |w: &Vec<Rational>, iterations: &mut u64| -> Result<Rational, SolverError> {
            if let Some(v) = cache.get(w) {
                return Ok(v.clone());
            }
            *iterations += 1;
            let v = evaluate_weight(inst, w, mode)?.value;
            cache.insert(w.clone(), v.clone());
            Ok(v)
        };
        let mut value = eval(&w, &mut iterations)?;
        for _ in 0..cfg.local_steps {
            if Instant::now() >= deadline {
                timed_out = true;
                finals.push((value, s, w));
                break 'starts;
            }
            let mut improved = false;
            'coords: for i in 0..n {
                for up in [true, false] {
                    let next = if up { &w[i] * &cfg.step_factor } else { &w[i] / &cfg.step_factor };
                    let next = Rational::min_of(&Rational::max_of(&next, &Rational::ONE), &cfg.w_cap);
                    if next == w[i] {
                        continue;
                    }
                    let mut cand = w.clone();
                    cand[i] = next;
                    let v = eval(&cand, &mut iterations)?;
                    if v > value {
                        value = v;
                        w = cand;
                        improved = true;
                        break 'coords;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        finals.push((value, s, w));
        if Instant::now() >= deadline {
            timed_out = true;
            break;
        }
    }

    finals.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let status = if timed_out { SolveStatus::TimeLimit } else { SolveStatus::Heuristic };
    let mut tried = HashSet::new();
    for (_, _, w) in finals {
        if !tried.insert(w.clone()) {
            continue;
        }
        iterations += 1;
        let ev = evaluate_weight(inst, &w, &NumericMode::ExactRational)?;
        if verify_exact(inst, &ev).is_ok() {
            return Ok(report_from(ev, status, started, iterations));
        }
    }
    Ok(SolveReport::empty(if timed_out { SolveStatus::TimeLimit } else { SolveStatus::NoIncumbent }, started, iterations))
}

/// Solves the square system `a x = b` exactly; `None` if singular.
pub fn solve_square(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = b.len();
    let mut m: Vec<Vec<Rational>> = a.iter().zip(b).map(|(row, bi)| {
        let mut r = row.clone();
        r.push(bi.clone());
        r
    }).collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let inv = m[col][col].recip();
        for v in m[col].iter_mut().skip(col) {
            *v = &*v * &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=n {
                    let t = &m[col][c] * &f;
                    m[r][c] = &m[r][c] - &t;
                }
            }
        }
    }
    Some(m.into_iter().map(|mut r| r.pop().expect("augmented column")).collect())
}

/// All vertices of `{x : Ax ≤ b}` by basis enumeration: every `k`-subset of
/// rows with a nonsingular system whose solution is feasible.
pub fn enumerate_vertices(inst: &MaxParetoInstance) -> Vec<Vec<Rational>> {
    let k = inst.k();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for rows in (0..inst.m()).combinations(k) {
        let a: Vec<Vec<Rational>> = rows.iter().map(|&i| inst.a[i].clone()).collect();
        let b: Vec<Rational> = rows.iter().map(|&i| inst.b[i].clone()).collect();
        if let Some(x) = solve_square(&a, &b) {
            let feasible = inst.a.iter().zip(&inst.b).all(|(row, bi)| dot(row, &x) <= *bi);
            if feasible && seen.insert(x.clone()) {
                out.push(x);
            }
        }
    }
    out
}

/// Exact optimum over Pareto-optimal points.
///
/// Instances built on a matching polytope are solved by branch and bound
/// over Pareto-optimal matchings. Other instances enumerate vertices
/// (within `cap_k`/`cap_m`), sort them by `cᵀx` and return the first that
/// passes the verification LP; an optimum sits at a vertex, so this is the
/// maximum.
pub fn solve_exact(inst: &MaxParetoInstance, cfg: &ExactConfig) -> Result<SolveReport, SolverError> {
    let started = Instant::now();
    if let Some(g) = matching::graph_of_instance(inst) {
        return solve_exact_matching(inst, &g, cfg, started);
    }
    let (k, m) = (inst.k(), inst.m());
    if k > cfg.cap_k || m > cfg.cap_m {
        return Err(SolverError::CapExceeded { k, m, cap_k: cfg.cap_k, cap_m: cfg.cap_m });
    }
    let deadline = cfg.time_limit.map(|d| started + d);
    let mut vertices: Vec<(Rational, Vec<Rational>)> =
        enumerate_vertices(inst).into_iter().map(|x| (dot(&inst.c, &x), x)).collect();
    vertices.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    let mut iterations = 0u64;
    for (value, x) in vertices {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return Ok(SolveReport::empty(SolveStatus::TimeLimit, started, iterations));
        }
        iterations += 1;
        if pareto::verify_pareto(inst, &x, &cfg.mode)?.is_dominated() {
            continue;
        }
        return finish_exact(inst, x, value, cfg, started, iterations);
    }
    Ok(SolveReport::empty(SolveStatus::NoIncumbent, started, iterations))
}

fn finish_exact(
    inst: &MaxParetoInstance,
    x: Vec<Rational>,
    value: Rational,
    cfg: &ExactConfig,
    started: Instant,
    iterations: u64,
) -> Result<SolveReport, SolverError> {
    let cert = pareto::find_support_certificate(inst, &x, None, &cfg.mode)?
        .ok_or_else(|| SolverError::Unverified("no supporting weight vector for a non-dominated vertex".into()))?;
    cert.validate(inst, &x, &cfg.mode).map_err(SolverError::Unverified)?;
    Ok(SolveReport {
        incumbent_x: Some(x),
        lb: Some(value.clone()),
        ub: Some(value),
        ub_valid: true,
        certificate: Some(cert),
        po_verified: true,
        status: SolveStatus::Optimal,
        wallclock: started.elapsed(),
        iterations,
    })
}

fn solve_exact_matching(
    inst: &MaxParetoInstance,
    g: &BipartiteInstance,
    cfg: &ExactConfig,
    started: Instant,
) -> Result<SolveReport, SolverError> {
    let deadline = cfg.time_limit.map(|d| started + d);
    let out = matching::max_welfare_po_matching(g, &inst.c, deadline)?;
    let Some((m, value)) = out.best else {
        let status = if out.complete { SolveStatus::NoIncumbent } else { SolveStatus::TimeLimit };
        return Ok(SolveReport::empty(status, started, out.nodes));
    };
    let x = matching::indicator(g, &m);
    if pareto::verify_pareto(inst, &x, &cfg.mode)?.is_dominated() {
        return Err(SolverError::Unverified("branch and bound returned a dominated matching".into()));
    }
    let mut report = finish_exact(inst, x, value, cfg, started, out.nodes)?;
    if !out.complete {
        report.status = SolveStatus::TimeLimit;
        report.ub = None;
        report.ub_valid = false;
    }
    Ok(report)
}

/// Complete `n × n` graph with `e_ij = 1` if `i = j`, `n` if `i = j + 1`,
/// `0` otherwise. The diagonal matching has payoff `(1, …, 1)`, is
/// Pareto-optimal, and needs weights with `w₁/wₙ ≥ (n−1)^(n−1)`.
pub fn make_prop9_instance(n: usize) -> Result<BipartiteInstance, SolverError> {
    if n < 2 {
        return Err(SolverError::InvalidConfig("n must be at least 2".into()));
    }
    let nn = i64::try_from(n).map_err(|_| SolverError::InvalidConfig("n too large".into()))?;
    let mut triples = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let w = if i == j {
                1
            } else if i == j + 1 {
                nn
            } else {
                0
            };
            triples.push((i, j, w));
        }
    }
    Ok(BipartiteInstance::from_triples(n, n, &triples)?)
}

/// The diagonal matching of [`make_prop9_instance`].
pub fn prop9_diagonal(g: &BipartiteInstance) -> Result<Matching, SolverError> {
    let pairs: Vec<(usize, usize)> = (0..g.n1()).map(|i| (i, i)).collect();
    Ok(Matching::from_pairs(g, &pairs)?)
}

/// Minimal-sum supporting certificate of the diagonal matching and its
/// ratio `w₁/wₙ`.
pub fn prop9_certificate(n: usize, mode: &NumericMode) -> Result<(SupportCertificate, Rational), SolverError> {
    let g = make_prop9_instance(n)?;
    let inst = matching::matching_polytope(&g, None)?;
    let x = matching::indicator(&g, &prop9_diagonal(&g)?);
    let cert = pareto::find_support_certificate(&inst, &x, None, mode)?
        .ok_or_else(|| SolverError::Unverified("diagonal matching has no certificate".into()))?;
    let ratio = cert.ratio(0, n - 1);
    Ok((cert, ratio))
}

/// `(n−1)^(n−1)`.
pub fn prop9_bound(n: usize) -> Rational {
    let base = num_bigint::BigInt::from(n as u64 - 1);
    Rational::from(num_traits::pow::pow(base, n - 1))
}
