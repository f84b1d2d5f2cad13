use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use maxpareto::bench::{self, GenSpec, Method, SuiteOptions};
use maxpareto::matching::{self, AllocationInstance, BipartiteInstance, BlockingSet, Matching};
use maxpareto::model::{self, load_instance, MaxParetoInstance};
use maxpareto::numeric::parse_vector;
use maxpareto::pareto::{self, Verdict};
use maxpareto::solver::{self, ExactConfig, HeuristicConfig, SolveReport, SolverError};
use maxpareto::{NumericMode, Rational};

#[derive(Parser)]
#[command(name = "maxpareto", version, about = "Optimize a linear objective over Pareto-optimal solutions")]
struct Cli {
    /// Arithmetic used by LP solves and checks
    #[arg(long, value_enum, global = true, default_value = "rational")]
    mode: ModeArg,
    /// Random seed
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Also write the result as JSON to this file
    #[arg(long, global = true, value_name = "PATH")]
    json_out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Float,
    Rational,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance with the weight-space heuristic or the exact oracle
    Solve(SolveArgs),
    /// Check whether a point is Pareto-optimal
    Verify(PointArgs),
    /// Find a supporting weight certificate for a point
    Certify(CertifyArgs),
    /// Exact optimum by vertex or matching enumeration
    Oracle(OracleArgs),
    /// Check (fractional) Pareto-optimality of a matching
    FpoCheck(MatchingArgs),
    /// Construct a blocking set for a Pareto-optimal matching
    BlockingSet(BlockingArgs),
    /// Encode an allocation instance as a Max-Pareto instance
    Encode(EncodeArgs),
    /// Generate a random allocation instance
    Generate(GenerateArgs),
    /// Run the benchmark suite
    Bench(BenchArgs),
    /// Supporting-weight ratio for the exponential-weight family
    Prop9(Prop9Args),
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveMethod {
    Heuristic,
    Exact,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file (.mpj)
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "heuristic")]
    method: SolveMethod,
    /// Weight cap for the heuristic
    #[arg(long, default_value = "10")]
    w_cap: Rational,
    #[arg(long, default_value_t = 8)]
    starts: usize,
    #[arg(long, default_value_t = 10)]
    local_steps: usize,
    #[arg(long, default_value = "2")]
    step_factor: Rational,
    /// Time limit in seconds
    #[arg(long, default_value_t = 60)]
    limit: u64,
}

#[derive(Args)]
struct PointArgs {
    /// Instance file (.mpj)
    #[arg(long)]
    instance: PathBuf,
    /// Comma-separated coordinates, e.g. "1/3,2/3"
    #[arg(long, conflicts_with = "point_file", required_unless_present = "point_file")]
    point: Option<String>,
    /// File holding the point (JSON array or comma/whitespace separated)
    #[arg(long)]
    point_file: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    point: PointArgs,
    /// Upper bound on weights (unbounded if omitted)
    #[arg(long)]
    w_cap: Option<Rational>,
}

#[derive(Args)]
struct OracleArgs {
    /// Instance file (.mpj)
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = 12)]
    cap_k: usize,
    #[arg(long, default_value_t = 24)]
    cap_m: usize,
    /// Time limit in seconds
    #[arg(long)]
    limit: Option<u64>,
}

#[derive(Args)]
struct MatchingArgs {
    /// Graph file (.bgj)
    #[arg(long)]
    graph: PathBuf,
    /// Matched pairs "agent:object,...", zero-based
    #[arg(long, default_value = "")]
    matching: String,
}

#[derive(Args)]
struct BlockingArgs {
    #[command(flatten)]
    base: MatchingArgs,
    /// Agent with an improving edge
    #[arg(long, required_unless_present = "all")]
    agent: Option<usize>,
    /// Object on the improving edge
    #[arg(long, required_unless_present = "all")]
    object: Option<usize>,
    /// List every blocking set instead
    #[arg(long)]
    all: bool,
}

#[derive(Args)]
struct EncodeArgs {
    /// Allocation file (.alj)
    #[arg(long)]
    allocation: PathBuf,
    /// Output instance file (.mpj)
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    agents: usize,
    /// Items per agent: 1, 2, 5 or 10
    #[arg(long, default_value_t = 1)]
    mult: usize,
    /// Output instance file (.mpj)
    #[arg(long)]
    out: PathBuf,
    /// Also write the preference profile (.alj)
    #[arg(long)]
    allocation_out: Option<PathBuf>,
    /// Also write the payoff graph (.bgj)
    #[arg(long)]
    graph_out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Agent counts, comma-separated
    #[arg(long, value_delimiter = ',', default_value = "4,6,8,10")]
    agents: Vec<usize>,
    /// Item multipliers, comma-separated
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    mult: Vec<usize>,
    /// Methods: heuristic:half, heuristic:one, heuristic:two, exact
    #[arg(long, value_delimiter = ',', default_value = "heuristic:half,heuristic:one,heuristic:two,exact")]
    methods: Vec<String>,
    /// Instances per (agents, mult) cell, seeded from --seed upward
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    /// Per-row time limit in seconds
    #[arg(long, default_value_t = 60)]
    limit: u64,
    /// CSV output file
    #[arg(long)]
    out: PathBuf,
    /// Worker threads (defaults to available cores)
    #[arg(long)]
    workers: Option<usize>,
    /// Write 0 in the time column for byte-identical reruns
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct Prop9Args {
    #[arg(long)]
    n: usize,
}

/// Failure classes mapped to exit codes.
enum Failure {
    Domain(String),
    Usage(String),
}

type CliResult = Result<(i32, Value), Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn domain(e: impl std::fmt::Display) -> Failure {
    Failure::Domain(e.to_string())
}

fn solver_failure(e: SolverError) -> Failure {
    match e {
        SolverError::Model(m) => usage(m),
        SolverError::InvalidConfig(m) => usage(m),
        other => domain(other),
    }
}

fn mode_of(m: ModeArg) -> NumericMode {
    match m {
        ModeArg::Float => NumericMode::default_float(),
        ModeArg::Rational => NumericMode::ExactRational,
    }
}

fn fmt_vec(v: &[Rational]) -> String {
    v.iter().map(Rational::to_string).collect::<Vec<_>>().join(",")
}

fn read_point(args: &PointArgs) -> Result<Vec<Rational>, Failure> {
    match (&args.point, &args.point_file) {
        (Some(p), _) => parse_vector(p).map_err(usage),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            let text = text.trim();
            if text.starts_with('[') {
                let v: Value = serde_json::from_str(text).map_err(usage)?;
                model::vector_from_json(&v).map_err(usage)
            } else {
                let joined = text.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect::<Vec<_>>().join(",");
                parse_vector(&joined).map_err(usage)
            }
        }
        (None, None) => Err(usage("a point is required (--point or --point-file)")),
    }
}

fn load(path: &Path) -> Result<MaxParetoInstance, Failure> {
    load_instance(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_valid(path: &Path, mode: &NumericMode) -> Result<MaxParetoInstance, Failure> {
    let inst = load(path)?;
    model::require_valid(&inst, mode).map_err(domain)?;
    Ok(inst)
}

fn parse_pairs(g: &BipartiteInstance, s: &str) -> Result<Matching, Failure> {
    let mut pairs = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (i, j) = item.split_once(':').ok_or_else(|| usage(format!("pair {item:?} must be agent:object")))?;
        let i = i.trim().parse::<usize>().map_err(usage)?;
        let j = j.trim().parse::<usize>().map_err(usage)?;
        pairs.push((i, j));
    }
    Matching::from_pairs(g, &pairs).map_err(usage)
}

fn print_report(r: &SolveReport) {
    let show = |v: &Option<Rational>| v.as_ref().map_or("-".to_string(), Rational::to_string);
    println!("status: {}", r.status.label());
    println!("lb: {}", show(&r.lb));
    println!("ub: {} (valid: {})", show(&r.ub), r.ub_valid);
    if let Some(x) = &r.incumbent_x {
        println!("x: {}", fmt_vec(x));
    }
    if let Some(c) = &r.certificate {
        println!("w: {}", fmt_vec(&c.w));
    }
    println!("time_ms: {}", r.wallclock.as_millis());
    println!("iterations: {}", r.iterations);
}

fn cmd_solve(a: &SolveArgs, mode: NumericMode, seed: u64) -> CliResult {
    let inst = load_valid(&a.instance, &mode)?;
    let report = match a.method {
        SolveMethod::Heuristic => {
            let cfg = HeuristicConfig {
                w_cap: a.w_cap.clone(),
                starts: a.starts,
                local_steps: a.local_steps,
                step_factor: a.step_factor.clone(),
                time_limit: Duration::from_secs(a.limit),
                seed,
                mode,
            };
            solver::solve_heuristic(&inst, &cfg).map_err(solver_failure)?
        }
        SolveMethod::Exact => {
            let cfg = ExactConfig { time_limit: Some(Duration::from_secs(a.limit)), mode, ..ExactConfig::default() };
            solver::solve_exact(&inst, &cfg).map_err(solver_failure)?
        }
    };
    print_report(&report);
    let code = if report.incumbent_x.is_some() { 0 } else { 1 };
    Ok((code, report.to_json_value()))
}

fn cmd_oracle(a: &OracleArgs, mode: NumericMode) -> CliResult {
    let inst = load_valid(&a.instance, &mode)?;
    let cfg = ExactConfig { cap_k: a.cap_k, cap_m: a.cap_m, time_limit: a.limit.map(Duration::from_secs), mode };
    let report = solver::solve_exact(&inst, &cfg).map_err(solver_failure)?;
    print_report(&report);
    let code = if report.incumbent_x.is_some() { 0 } else { 1 };
    Ok((code, report.to_json_value()))
}

fn cmd_verify(a: &PointArgs, mode: NumericMode) -> CliResult {
    let inst = load(&a.instance)?;
    let x = read_point(a)?;
    let r = pareto::verify_pareto(&inst, &x, &mode).map_err(domain)?;
    match (&r.verdict, &r.improvement) {
        (Verdict::NotDominated, _) => {
            println!("not dominated");
            Ok((0, json!({ "dominated": false })))
        }
        (Verdict::Dominated { by }, imp) => {
            let payoff = imp.as_ref().map(|p| p.0.clone()).unwrap_or_default();
            println!("dominated");
            println!("witness: {}", fmt_vec(by));
            println!("witness payoff: {}", fmt_vec(&payoff));
            Ok((1, json!({ "dominated": true, "witness": model::vector_to_json(by), "payoff": model::vector_to_json(&payoff) })))
        }
    }
}

fn cmd_certify(a: &CertifyArgs, mode: NumericMode) -> CliResult {
    let inst = load(&a.point.instance)?;
    let x = read_point(&a.point)?;
    match pareto::find_support_certificate(&inst, &x, a.w_cap.as_ref(), &mode).map_err(domain)? {
        Some(cert) => {
            println!("w: {}", fmt_vec(&cert.w));
            println!("eta: {}", fmt_vec(&cert.eta));
            Ok((0, cert.to_json_value()))
        }
        None => {
            println!("no certificate");
            Ok((1, Value::Null))
        }
    }
}

fn cmd_fpo(a: &MatchingArgs, mode: NumericMode) -> CliResult {
    let g = BipartiteInstance::load(&a.graph).map_err(usage)?;
    let m = parse_pairs(&g, &a.matching)?;
    let payoff = matching::payoff_vector(&g, &m).map_err(domain)?;
    let po = matching::is_po_matching(&g, &m).map_err(domain)?;
    let fpo = matching::is_fpo_matching(&g, &m, &mode).map_err(domain)?;
    println!("payoff: {}", fmt_vec(&payoff.0));
    println!("po: {po}");
    println!("fpo: {fpo}");
    Ok((if fpo { 0 } else { 1 }, json!({ "payoff": model::vector_to_json(&payoff.0), "po": po, "fpo": fpo })))
}

fn cmd_blocking(a: &BlockingArgs) -> CliResult {
    let g = BipartiteInstance::load(&a.base.graph).map_err(usage)?;
    let m = parse_pairs(&g, &a.base.matching)?;
    let to_json = |b: &BlockingSet| json!(b.members());
    if a.all {
        let sets = matching::all_blocking_sets(&g, &m).map_err(domain)?;
        for b in &sets {
            println!("{:?}", b.members());
        }
        return Ok((0, Value::Array(sets.iter().map(to_json).collect())));
    }
    let (i, j) = (a.agent.expect("required by clap"), a.object.expect("required by clap"));
    let b = matching::find_blocking_set(&g, &m, i, j).map_err(domain)?;
    println!("blocking set: {:?}", b.members());
    Ok((0, to_json(&b)))
}

fn cmd_encode(a: &EncodeArgs) -> CliResult {
    let alloc = AllocationInstance::load(&a.allocation).map_err(usage)?;
    let inst = matching::encode_allocation(&alloc).map_err(domain)?;
    model::save_instance(&inst, &a.out).map_err(usage)?;
    let threshold = alloc.required.as_ref().map_or(0, Vec::len);
    println!("wrote {} (k={}, m={}, n={}, threshold={threshold})", a.out.display(), inst.k(), inst.m(), inst.n());
    Ok((0, json!({ "k": inst.k(), "m": inst.m(), "n": inst.n(), "threshold": threshold })))
}

fn cmd_generate(a: &GenerateArgs, seed: u64) -> CliResult {
    let spec = GenSpec::new(a.agents, a.mult, seed).map_err(usage)?;
    let gen = bench::generate_allocation(&spec);
    let inst = gen.to_instance().map_err(domain)?;
    model::save_instance(&inst, &a.out).map_err(usage)?;
    if let Some(p) = &a.allocation_out {
        gen.allocation.save(p).map_err(usage)?;
    }
    if let Some(p) = &a.graph_out {
        gen.graph().map_err(domain)?.save(p).map_err(usage)?;
    }
    println!("wrote {} ({} agents, {} items, seed {seed})", a.out.display(), spec.agents, spec.items());
    Ok((0, json!({ "agents": spec.agents, "items": spec.items(), "seed": seed, "payoff": gen.payoff, "welfare": gen.welfare })))
}

fn cmd_bench(a: &BenchArgs, seed: u64) -> CliResult {
    let methods: Vec<Method> = a.methods.iter().map(|m| Method::parse(m)).collect::<Result<_, _>>().map_err(usage)?;
    let mut specs = Vec::new();
    for &agents in &a.agents {
        for &mult in &a.mult {
            for s in 0..a.seeds {
                specs.push(GenSpec::new(agents, mult, seed + s).map_err(usage)?);
            }
        }
    }
    let mut opts = SuiteOptions { time_limit: Duration::from_secs(a.limit), record_time: !a.no_timing, ..SuiteOptions::default() };
    if let Some(w) = a.workers {
        opts.workers = w;
    }
    let res = bench::run_suite(&specs, &methods, &opts).map_err(domain)?;
    bench::write_csv_file(&res.rows, &a.out, opts.record_time).map_err(usage)?;
    print!("{}", bench::format_table(&res.rows));
    println!("w_cap non-monotone on {}/{} instances", res.non_monotone_instances, res.compared_instances);
    Ok((0, json!({ "rows": res.rows.len(), "non_monotone": res.non_monotone_instances, "compared": res.compared_instances })))
}

fn cmd_prop9(a: &Prop9Args, mode: NumericMode) -> CliResult {
    let (cert, ratio) = solver::prop9_certificate(a.n, &mode).map_err(solver_failure)?;
    let bound = solver::prop9_bound(a.n);
    println!("w: {}", fmt_vec(&cert.w));
    println!("ratio w1/wn: {ratio}");
    println!("bound (n-1)^(n-1): {bound}");
    let holds = if mode.is_exact() { ratio >= bound } else { ratio.to_f64() >= bound.to_f64() * (1.0 - 1e-9) };
    println!("bound holds: {holds}");
    let out = json!({ "certificate": cert.to_json_value(), "ratio": model::rational_to_json(&ratio), "bound": model::rational_to_json(&bound), "holds": holds });
    Ok((if holds { 0 } else { 1 }, out))
}

fn run(cli: &Cli) -> CliResult {
    let mode = mode_of(cli.mode);
    match &cli.command {
        Command::Solve(a) => cmd_solve(a, mode, cli.seed),
        Command::Verify(a) => cmd_verify(a, mode),
        Command::Certify(a) => cmd_certify(a, mode),
        Command::Oracle(a) => cmd_oracle(a, mode),
        Command::FpoCheck(a) => cmd_fpo(a, mode),
        Command::BlockingSet(a) => cmd_blocking(a),
        Command::Encode(a) => cmd_encode(a),
        Command::Generate(a) => cmd_generate(a, cli.seed),
        Command::Bench(a) => cmd_bench(a, cli.seed),
        Command::Prop9(a) => cmd_prop9(a, mode),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((code, value)) => {
            if let Some(path) = &cli.json_out {
                let text = serde_json::to_string_pretty(&value).expect("result serializes");
                if let Err(e) = std::fs::write(path, text + "\n") {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            ExitCode::from(code as u8)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\n{}", Cli::command().render_usage());
            ExitCode::from(2)
        }
    }
}
