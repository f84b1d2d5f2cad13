//! Random allocation instances and the benchmark suite.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Mutex;
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::matching::{self, AllocationInstance, BipartiteInstance, Edge, MatchingError};
use crate::model::MaxParetoInstance;
use crate::numeric::Rational;
use crate::solver::{self, ExactConfig, HeuristicConfig, SolveReport, SolveStatus, SolverError};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("unknown method {0:?} (expected heuristic:half, heuristic:one, heuristic:two or exact)")]
    UnknownMethod(String),
    #[error("tripwire: heuristic lower bound exceeds exact optimum\n{0}")]
    Tripwire(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
}

pub const MULTIPLIERS: [usize; 4] = [1, 2, 5, 10];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GenSpec {
    pub agents: usize,
    pub items_multiplier: usize,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(agents: usize, items_multiplier: usize, seed: u64) -> Result<Self, BenchError> {
        if agents == 0 {
            return Err(BenchError::InvalidSpec("agents must be at least 1".into()));
        }
        if !MULTIPLIERS.contains(&items_multiplier) {
            return Err(BenchError::InvalidSpec(format!("items multiplier {items_multiplier} not in {MULTIPLIERS:?}")));
        }
        Ok(GenSpec { agents, items_multiplier, seed })
    }

    pub fn items(&self) -> usize {
        self.agents * self.items_multiplier
    }
}

/// A sampled allocation problem. `payoff[a][i]` and `welfare[a][i]` are
/// uniform on `1..=items`; every item is admissible to every agent.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedInstance {
    pub spec: GenSpec,
    pub allocation: AllocationInstance,
    pub payoff: Vec<Vec<u32>>,
    pub welfare: Vec<Vec<u32>>,
}

impl GeneratedInstance {
    /// Graph with cardinal payoffs as edge weights, edges ordered by
    /// agent then item.
    pub fn graph(&self) -> Result<BipartiteInstance, BenchError> {
        let mut edges = Vec::new();
        for (a, row) in self.payoff.iter().enumerate() {
            for (i, &p) in row.iter().enumerate() {
                edges.push(Edge { i: a, j: i, w: Rational::from(p) });
            }
        }
        Ok(BipartiteInstance::new(self.spec.agents, self.spec.items(), edges)?)
    }

    /// Max-Pareto instance over the matching polytope with welfare as
    /// objective.
    pub fn to_instance(&self) -> Result<MaxParetoInstance, BenchError> {
        let g = self.graph()?;
        let c = g.edges().iter().map(|e| Rational::from(self.welfare[e.i][e.j])).collect();
        Ok(matching::matching_polytope(&g, Some(c))?)
    }
}

/// Deterministic in `spec`: the payoff matrix is drawn row by row, then
/// the welfare matrix, from a ChaCha8 stream seeded with `spec.seed`.
/// Preferences list items by decreasing payoff, ties to the lower index.
pub fn generate_allocation(spec: &GenSpec) -> GeneratedInstance {
    let items = spec.items();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut draw = || -> Vec<Vec<u32>> {
        (0..spec.agents).map(|_| (0..items).map(|_| rng.gen_range(1..=items as u32)).collect()).collect()
    };
    let payoff = draw();
    let welfare = draw();
    let preferences = payoff
        .iter()
        .map(|row| {
            let mut order: Vec<usize> = (0..items).collect();
            order.sort_by(|&x, &y| row[y].cmp(&row[x]).then(x.cmp(&y)));
            order
        })
        .collect();
    let allocation = AllocationInstance { agents: spec.agents, objects: items, preferences, required: None };
    GeneratedInstance { spec: *spec, allocation, payoff, welfare }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WCapSetting {
    Half,
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Heuristic(WCapSetting),
    Exact,
}

impl Method {
    pub fn parse(s: &str) -> Result<Self, BenchError> {
        match s.trim() {
            "heuristic:half" => Ok(Method::Heuristic(WCapSetting::Half)),
            "heuristic:one" => Ok(Method::Heuristic(WCapSetting::One)),
            "heuristic:two" => Ok(Method::Heuristic(WCapSetting::Two)),
            "exact" => Ok(Method::Exact),
            other => Err(BenchError::UnknownMethod(other.to_string())),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Method::Heuristic(WCapSetting::Half) => "heuristic:half",
            Method::Heuristic(WCapSetting::One) => "heuristic:one",
            Method::Heuristic(WCapSetting::Two) => "heuristic:two",
            Method::Exact => "exact",
        }
    }

    /// `|I|/2`, `|I|` or `2|I|`, never below 1.
    pub fn w_cap(&self, items: usize) -> Option<Rational> {
        let cap = match self {
            Method::Heuristic(WCapSetting::Half) => Rational::new(items as i64, 2),
            Method::Heuristic(WCapSetting::One) => Rational::from(items),
            Method::Heuristic(WCapSetting::Two) => Rational::from(2 * items),
            Method::Exact => return None,
        };
        Some(Rational::max_of(&cap, &Rational::ONE))
    }

    pub fn all() -> Vec<Method> {
        vec![
            Method::Heuristic(WCapSetting::Half),
            Method::Heuristic(WCapSetting::One),
            Method::Heuristic(WCapSetting::Two),
            Method::Exact,
        ]
    }
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub spec: GenSpec,
    pub method: Method,
    pub w_cap: Option<Rational>,
    pub lb: Option<Rational>,
    pub ub: Option<Rational>,
    pub ub_valid: bool,
    pub status: SolveStatus,
    pub po_verified: bool,
    pub time: Duration,
}

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub time_limit: Duration,
    /// Template for heuristic rows; `w_cap`, `seed` and `time_limit` are
    /// overwritten per row.
    pub heuristic: HeuristicConfig,
    pub workers: usize,
    /// Write measured times; when `false` the CSV time column is 0 so that
    /// repeated runs produce identical bytes.
    pub record_time: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            time_limit: Duration::from_secs(60),
            heuristic: HeuristicConfig::default(),
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            record_time: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub rows: Vec<BenchRow>,
    /// Instances with all three heuristic settings present.
    pub compared_instances: usize,
    /// Of those, instances where a larger `w_cap` gave a smaller lower bound.
    pub non_monotone_instances: usize,
}

fn run_row(inst: &MaxParetoInstance, spec: &GenSpec, method: Method, opts: &SuiteOptions) -> Result<BenchRow, BenchError> {
    let report: SolveReport = match method {
        Method::Exact => {
            let cfg = ExactConfig { time_limit: Some(opts.time_limit), ..ExactConfig::default() };
            solver::solve_exact(inst, &cfg)?
        }
        Method::Heuristic(_) => {
            let cfg = HeuristicConfig {
                w_cap: method.w_cap(spec.items()).expect("heuristic has a cap"),
                seed: spec.seed,
                time_limit: opts.time_limit,
                ..opts.heuristic.clone()
            };
            solver::solve_heuristic(inst, &cfg)?
        }
    };
    Ok(BenchRow {
        spec: *spec,
        method,
        w_cap: method.w_cap(spec.items()),
        lb: report.lb,
        ub: report.ub,
        ub_valid: report.ub_valid,
        status: report.status,
        po_verified: report.po_verified,
        time: report.wallclock,
    })
}

/// Runs every `(spec, method)` pair on a pool of `opts.workers` threads and
/// returns rows sorted by spec, then method. Fails if a heuristic lower
/// bound exceeds a proven exact optimum on the same instance.
pub fn run_suite(specs: &[GenSpec], methods: &[Method], opts: &SuiteOptions) -> Result<SuiteResult, BenchError> {
    let instances: Vec<MaxParetoInstance> =
        specs.iter().map(|s| generate_allocation(s).to_instance()).collect::<Result<_, _>>()?;
    let jobs: Vec<(usize, Method)> = (0..specs.len()).flat_map(|s| methods.iter().map(move |&m| (s, m))).collect();
    let next = Mutex::new(0usize);
    let results: Mutex<Vec<Option<Result<BenchRow, BenchError>>>> = Mutex::new((0..jobs.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..opts.workers.max(1).min(jobs.len().max(1)) {
            scope.spawn(|| loop {
                let idx = {
                    let mut n = next.lock().expect("queue lock");
                    let idx = *n;
                    *n += 1;
                    idx
                };
                let Some(&(s, method)) = jobs.get(idx) else { break };
                let row = run_row(&instances[s], &specs[s], method, opts);
                results.lock().expect("results lock")[idx] = Some(row);
            });
        }
    });
    let mut rows = Vec::with_capacity(jobs.len());
    for r in results.into_inner().expect("results lock") {
        rows.push(r.expect("every job ran")?);
    }
    rows.sort_by(|a, b| a.spec.cmp(&b.spec).then(a.method.cmp(&b.method)));
    check_tripwire(&rows)?;
    let (compared_instances, non_monotone_instances) = non_monotonicity(&rows);
    Ok(SuiteResult { rows, compared_instances, non_monotone_instances })
}

fn check_tripwire(rows: &[BenchRow]) -> Result<(), BenchError> {
    for exact in rows.iter().filter(|r| r.method == Method::Exact && r.ub_valid) {
        let Some(opt) = &exact.ub else { continue };
        for h in rows.iter().filter(|r| r.spec == exact.spec && r.method != Method::Exact) {
            if h.lb.as_ref().is_some_and(|lb| lb > opt) {
                let mut dump = String::new();
                for r in rows.iter().filter(|r| r.spec == exact.spec) {
                    let _ = writeln!(dump, "{:?} {} lb={:?} ub={:?} status={}", r.spec, r.method.label(), r.lb, r.ub, r.status.label());
                }
                return Err(BenchError::Tripwire(dump));
            }
        }
    }
    Ok(())
}

fn non_monotonicity(rows: &[BenchRow]) -> (usize, usize) {
    let mut specs: Vec<GenSpec> = rows.iter().map(|r| r.spec).collect();
    specs.dedup();
    let (mut compared, mut non_monotone) = (0, 0);
    for spec in specs {
        let lb = |s: WCapSetting| {
            rows.iter()
                .find(|r| r.spec == spec && r.method == Method::Heuristic(s))
                .map(|r| r.lb.clone())
        };
        if let (Some(h), Some(o), Some(t)) = (lb(WCapSetting::Half), lb(WCapSetting::One), lb(WCapSetting::Two)) {
            compared += 1;
            let below = |a: &Option<Rational>, b: &Option<Rational>| match (a, b) {
                (Some(a), Some(b)) => a < b,
                (None, Some(_)) => true,
                _ => false,
            };
            if below(&o, &h) || below(&t, &o) || below(&t, &h) {
                non_monotone += 1;
            }
        }
    }
    (compared, non_monotone)
}

pub const CSV_HEADER: [&str; 10] = ["agents", "items", "method", "w_cap", "lb", "ub", "ub_valid", "status", "time_ms", "seed"];

fn cell(v: &Option<Rational>) -> String {
    v.as_ref().map_or_else(String::new, |r| r.to_string())
}

pub fn write_csv<W: std::io::Write>(rows: &[BenchRow], out: W, record_time: bool) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        let time_ms = if record_time { r.time.as_millis() } else { 0 };
        w.write_record([
            r.spec.agents.to_string(),
            r.spec.items().to_string(),
            r.method.label().to_string(),
            cell(&r.w_cap),
            cell(&r.lb),
            cell(&r.ub),
            r.ub_valid.to_string(),
            r.status.label().to_string(),
            time_ms.to_string(),
            r.spec.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file(rows: &[BenchRow], path: impl AsRef<Path>, record_time: bool) -> Result<(), BenchError> {
    let file = std::fs::File::create(path)?;
    write_csv(rows, std::io::BufWriter::new(file), record_time)
}

/// Aligned text table; the best lower bound of each instance is marked
/// `*best*`.
pub fn format_table(rows: &[BenchRow]) -> String {
    let header = ["agents", "items", "seed", "method", "w_cap", "lb", "ub", "status", "time_ms"];
    let mut lines: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
    for r in rows {
        let best = rows.iter().filter(|o| o.spec == r.spec).filter_map(|o| o.lb.clone()).max();
        let lb = match (&r.lb, &best) {
            (Some(lb), Some(b)) if lb == b => format!("{lb} *best*"),
            (Some(lb), _) => lb.to_string(),
            (None, _) => "-".into(),
        };
        lines.push(vec![
            r.spec.agents.to_string(),
            r.spec.items().to_string(),
            r.spec.seed.to_string(),
            r.method.label().into(),
            r.w_cap.as_ref().map_or("-".into(), |w| w.to_string()),
            lb,
            r.ub.as_ref().map_or("-".into(), |u| u.to_string()),
            r.status.label().into(),
            r.time.as_millis().to_string(),
        ]);
    }
    let widths: Vec<usize> = (0..header.len()).map(|c| lines.iter().map(|l| l[c].len()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for l in &lines {
        let cells: Vec<String> = l.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect();
        let _ = writeln!(out, "{}", cells.join("  ").trim_end());
    }
    out
}
