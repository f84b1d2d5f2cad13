//! Weighted bipartite graphs, matchings, blocking sets and the allocation
//! encoder.
//!
//! Agents are the `V₁` side (`0..n1`), objects the `V₂` side (`0..n2`). The
//! payoff of an agent is the weight of its matched edge, or zero when
//! unmatched.

use std::collections::BTreeSet;
use std::path::Path;
use std::time::Instant;

use serde_json::{json, Value};
use thiserror::Error;

use crate::model::{self, MatchingStructure, MaxParetoInstance, ModelError, NumericMode, PayoffVector};
use crate::numeric::Rational;
use crate::pareto::{self, ParetoError};

/// Largest `n1` for which Pareto-optimality is decided by enumeration.
pub const ENUM_CAP: usize = 10;

#[derive(Debug, Error)]
pub enum MatchingError {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid matching: {0}")]
    InvalidMatching(String),
    #[error("invalid allocation instance: {0}")]
    InvalidAllocation(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("blocking set validation failed: {0}")]
    ValidationFailed(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Pareto(#[from] ParetoError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub w: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteInstance {
    n1: usize,
    n2: usize,
    edges: Vec<Edge>,
    /// `slot[i * n2 + j]` is the index of edge `(i, j)`.
    slot: Vec<Option<usize>>,
    /// Edge indices incident to each agent, sorted by object.
    adj: Vec<Vec<usize>>,
}

impl BipartiteInstance {
    pub fn new(n1: usize, n2: usize, edges: Vec<Edge>) -> Result<Self, MatchingError> {
        let mut slot = vec![None; n1 * n2];
        let mut adj = vec![Vec::new(); n1];
        for (e, edge) in edges.iter().enumerate() {
            if edge.i >= n1 || edge.j >= n2 {
                return Err(MatchingError::InvalidGraph(format!("edge ({}, {}) out of range", edge.i, edge.j)));
            }
            if edge.w.is_negative() {
                return Err(MatchingError::InvalidGraph(format!("edge ({}, {}) has negative weight", edge.i, edge.j)));
            }
            let s = &mut slot[edge.i * n2 + edge.j];
            if s.is_some() {
                return Err(MatchingError::InvalidGraph(format!("duplicate edge ({}, {})", edge.i, edge.j)));
            }
            *s = Some(e);
            adj[edge.i].push(e);
        }
        for list in &mut adj {
            list.sort_by_key(|&e| edges[e].j);
        }
        Ok(BipartiteInstance { n1, n2, edges, slot, adj })
    }

    /// Builds a graph from `(i, j, w)` triples with integer weights.
    pub fn from_triples(n1: usize, n2: usize, triples: &[(usize, usize, i64)]) -> Result<Self, MatchingError> {
        let edges = triples.iter().map(|&(i, j, w)| Edge { i, j, w: Rational::from(w) }).collect();
        Self::new(n1, n2, edges)
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_index(&self, i: usize, j: usize) -> Option<usize> {
        if i < self.n1 && j < self.n2 {
            self.slot[i * self.n2 + j]
        } else {
            None
        }
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<&Rational> {
        self.edge_index(i, j).map(|e| &self.edges[e].w)
    }

    /// Edges incident to agent `i`, ordered by object index.
    pub fn incident(&self, i: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.adj[i].iter().map(move |&e| &self.edges[e])
    }

    /// Largest weight on any edge at agent `i` (zero if isolated).
    pub fn best_weight(&self, i: usize) -> Rational {
        self.incident(i).map(|e| e.w.clone()).max().unwrap_or(Rational::ZERO)
    }

    pub fn to_json_value(&self) -> Value {
        let edges: Vec<Value> =
            self.edges.iter().map(|e| json!([e.i, e.j, model::rational_to_json(&e.w)])).collect();
        json!({ "n1": self.n1, "n2": self.n2, "edges": edges })
    }

    pub fn from_json_value(v: &Value) -> Result<Self, MatchingError> {
        let parse = |m: String| MatchingError::Model(ModelError::Parse(m));
        let count = |name: &str| {
            v.get(name)
                .and_then(Value::as_u64)
                .map(|x| x as usize)
                .ok_or_else(|| parse(format!("missing or invalid field \"{name}\"")))
        };
        let (n1, n2) = (count("n1")?, count("n2")?);
        let list = v.get("edges").and_then(Value::as_array).ok_or_else(|| parse("missing field \"edges\"".into()))?;
        let mut edges = Vec::with_capacity(list.len());
        for item in list {
            let t = item.as_array().filter(|t| t.len() == 3).ok_or_else(|| parse("edge must be [i, j, w]".into()))?;
            let idx = |x: &Value| x.as_u64().map(|x| x as usize).ok_or_else(|| parse("edge endpoint must be an index".into()));
            edges.push(Edge { i: idx(&t[0])?, j: idx(&t[1])?, w: model::rational_from_json(&t[2])? });
        }
        Self::new(n1, n2, edges)
    }

    pub fn from_json_str(s: &str) -> Result<Self, MatchingError> {
        let v: Value = serde_json::from_str(s).map_err(|e| ModelError::Parse(e.to_string()))?;
        Self::from_json_value(&v)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, MatchingError> {
        let s = std::fs::read_to_string(path).map_err(ModelError::Io)?;
        Self::from_json_str(&s)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), MatchingError> {
        let s = serde_json::to_string_pretty(&self.to_json_value()).expect("graph serializes");
        std::fs::write(path, s).map_err(|e| MatchingError::Model(ModelError::Io(e)))
    }
}

/// Partial injective map from agents to objects.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matching {
    mate: Vec<Option<usize>>,
}

impl Matching {
    pub fn empty(n1: usize) -> Self {
        Matching { mate: vec![None; n1] }
    }

    /// Builds and validates a matching from `(agent, object)` pairs.
    pub fn from_pairs(g: &BipartiteInstance, pairs: &[(usize, usize)]) -> Result<Self, MatchingError> {
        let mut m = Matching::empty(g.n1());
        for &(i, j) in pairs {
            if i >= g.n1() {
                return Err(MatchingError::InvalidMatching(format!("agent {i} out of range")));
            }
            if m.mate[i].is_some() {
                return Err(MatchingError::InvalidMatching(format!("agent {i} matched twice")));
            }
            m.mate[i] = Some(j);
        }
        m.validate(g)?;
        Ok(m)
    }

    pub fn validate(&self, g: &BipartiteInstance) -> Result<(), MatchingError> {
        if self.mate.len() != g.n1() {
            return Err(MatchingError::InvalidMatching(format!(
                "matching covers {} agents, graph has {}",
                self.mate.len(),
                g.n1()
            )));
        }
        let mut used = vec![false; g.n2()];
        for (i, j) in self.pairs() {
            if g.edge_index(i, j).is_none() {
                return Err(MatchingError::InvalidMatching(format!("({i}, {j}) is not an edge")));
            }
            if std::mem::replace(&mut used[j], true) {
                return Err(MatchingError::InvalidMatching(format!("object {j} matched twice")));
            }
        }
        Ok(())
    }

    pub fn partner(&self, i: usize) -> Option<usize> {
        self.mate.get(i).copied().flatten()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.mate.iter().enumerate().filter_map(|(i, j)| j.map(|j| (i, j)))
    }

    pub fn len(&self) -> usize {
        self.mate.iter().filter(|j| j.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Agents covered by the matching, `V₁(M)`.
    pub fn matched_agents(&self) -> Vec<usize> {
        self.pairs().map(|(i, _)| i).collect()
    }

    /// Owner of each object, if any.
    pub fn owners(&self, n2: usize) -> Vec<Option<usize>> {
        let mut owner = vec![None; n2];
        for (i, j) in self.pairs() {
            owner[j] = Some(i);
        }
        owner
    }
}

fn agent_payoff(g: &BipartiteInstance, m: &Matching, i: usize) -> Rational {
    m.partner(i).and_then(|j| g.weight(i, j)).cloned().unwrap_or(Rational::ZERO)
}

/// `u_i = w_{i,M(i)}` for matched agents, `0` otherwise.
pub fn payoff_vector(g: &BipartiteInstance, m: &Matching) -> Result<PayoffVector, MatchingError> {
    m.validate(g)?;
    Ok(PayoffVector((0..g.n1()).map(|i| agent_payoff(g, m, i)).collect()))
}

/// `G_R` with its induced matching; `agents[k]` / `objects[k]` give the
/// original index of reduced vertex `k`.
#[derive(Debug, Clone)]
pub struct ReducedGraph {
    pub graph: BipartiteInstance,
    pub matching: Matching,
    pub agents: Vec<usize>,
    pub objects: Vec<usize>,
}

/// Removes the agents in `removed` together with their partners.
pub fn reduced_graph(g: &BipartiteInstance, m: &Matching, removed: &[usize]) -> Result<ReducedGraph, MatchingError> {
    m.validate(g)?;
    let mut drop_agent = vec![false; g.n1()];
    let mut drop_object = vec![false; g.n2()];
    for &r in removed {
        if r >= g.n1() {
            return Err(MatchingError::InvalidGraph(format!("agent {r} out of range")));
        }
        drop_agent[r] = true;
        if let Some(j) = m.partner(r) {
            drop_object[j] = true;
        }
    }
    let agents: Vec<usize> = (0..g.n1()).filter(|&i| !drop_agent[i]).collect();
    let objects: Vec<usize> = (0..g.n2()).filter(|&j| !drop_object[j]).collect();
    let mut new_agent = vec![usize::MAX; g.n1()];
    let mut new_object = vec![usize::MAX; g.n2()];
    for (k, &i) in agents.iter().enumerate() {
        new_agent[i] = k;
    }
    for (k, &j) in objects.iter().enumerate() {
        new_object[j] = k;
    }
    let edges = g
        .edges()
        .iter()
        .filter(|e| !drop_agent[e.i] && !drop_object[e.j])
        .map(|e| Edge { i: new_agent[e.i], j: new_object[e.j], w: e.w.clone() })
        .collect();
    let graph = BipartiteInstance::new(agents.len(), objects.len(), edges)?;
    let pairs: Vec<(usize, usize)> =
        m.pairs().filter(|&(i, _)| !drop_agent[i]).map(|(i, j)| (new_agent[i], new_object[j])).collect();
    let matching = Matching::from_pairs(&graph, &pairs)?;
    Ok(ReducedGraph { graph, matching, agents, objects })
}

/// Every matching of `g`, the empty one included.
pub fn enumerate_matchings(g: &BipartiteInstance) -> Vec<Matching> {
    fn rec(g: &BipartiteInstance, i: usize, cur: &mut Matching, used: &mut [bool], out: &mut Vec<Matching>) {
        if i == g.n1() {
            out.push(cur.clone());
            return;
        }
        rec(g, i + 1, cur, used, out);
        for e in g.incident(i) {
            if !used[e.j] {
                used[e.j] = true;
                cur.mate[i] = Some(e.j);
                rec(g, i + 1, cur, used, out);
                cur.mate[i] = None;
                used[e.j] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(g, 0, &mut Matching::empty(g.n1()), &mut vec![false; g.n2()], &mut out);
    out
}

/// Searches for a matching whose payoff vector dominates that of `m`.
/// Each agent is restricted to edges at least as good as its current
/// payoff, which keeps the search small.
pub fn find_dominating_matching(g: &BipartiteInstance, m: &Matching) -> Result<Option<Matching>, MatchingError> {
    let u = payoff_vector(g, m)?;
    fn rec(
        g: &BipartiteInstance,
        u: &[Rational],
        i: usize,
        strict: bool,
        cur: &mut Matching,
        used: &mut [bool],
    ) -> bool {
        if i == g.n1() {
            return strict;
        }
        if u[i].is_zero() && rec(g, u, i + 1, strict, cur, used) {
            return true;
        }
        for e in g.incident(i) {
            if used[e.j] || e.w < u[i] {
                continue;
            }
            used[e.j] = true;
            cur.mate[i] = Some(e.j);
            if rec(g, u, i + 1, strict || e.w > u[i], cur, used) {
                return true;
            }
            cur.mate[i] = None;
            used[e.j] = false;
        }
        false
    }
    let mut cur = Matching::empty(g.n1());
    let found = rec(g, &u.0, 0, false, &mut cur, &mut vec![false; g.n2()]);
    Ok(found.then_some(cur))
}

/// Pareto-optimality of a matching. Decided by enumeration for
/// `n1 ≤ ENUM_CAP`, otherwise by the exact fractional check, which gives
/// the same answer.
pub fn is_po_matching(g: &BipartiteInstance, m: &Matching) -> Result<bool, MatchingError> {
    if g.n1() <= ENUM_CAP {
        Ok(find_dominating_matching(g, m)?.is_none())
    } else {
        is_fpo_matching(g, m, &NumericMode::ExactRational)
    }
}

/// Pareto flags for a batch of payoff vectors: `flags[t]` is `true` iff no
/// vector in `payoffs` dominates `payoffs[t]`.
pub fn pareto_flags(payoffs: &[PayoffVector]) -> Vec<bool> {
    let mut order: Vec<usize> = (0..payoffs.len()).collect();
    let sums: Vec<Rational> = payoffs.iter().map(PayoffVector::sum).collect();
    order.sort_by(|&a, &b| sums[b].cmp(&sums[a]).then_with(|| payoffs[b].cmp(&payoffs[a])));
    // A dominated vector is dominated by some front member, and dominators
    // have strictly larger sums, so scanning by decreasing sum suffices.
    let mut front: Vec<usize> = Vec::new();
    let mut flags = vec![false; payoffs.len()];
    for &t in &order {
        let dominated = front.iter().any(|&f| pareto::dominates(&payoffs[f], &payoffs[t]).unwrap_or(false));
        if !dominated {
            if front.iter().all(|&f| payoffs[f] != payoffs[t]) {
                front.push(t);
            }
            flags[t] = true;
        }
    }
    flags
}

/// Max-Pareto instance over the matching polytope of `g`: one variable per
/// edge, degree rows for both sides, nonnegativity rows, and `U` rows
/// `U[i][e] = w_e` for edges at agent `i`. `c` defaults to zero.
pub fn matching_polytope(g: &BipartiteInstance, c: Option<Vec<Rational>>) -> Result<MaxParetoInstance, MatchingError> {
    let k = g.edges().len();
    if k == 0 {
        return Err(MatchingError::InvalidGraph("graph has no edges".into()));
    }
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut rows_names = Vec::new();
    for i in 0..g.n1() {
        if !g.adj[i].is_empty() {
            let mut row = vec![Rational::ZERO; k];
            for &e in &g.adj[i] {
                row[e] = Rational::ONE;
            }
            a.push(row);
            b.push(Rational::ONE);
            rows_names.push(format!("agent{i}"));
        }
    }
    for j in 0..g.n2() {
        let mut row = vec![Rational::ZERO; k];
        let mut any = false;
        for (e, edge) in g.edges().iter().enumerate() {
            if edge.j == j {
                row[e] = Rational::ONE;
                any = true;
            }
        }
        if any {
            a.push(row);
            b.push(Rational::ONE);
            rows_names.push(format!("object{j}"));
        }
    }
    for e in 0..k {
        let mut row = vec![Rational::ZERO; k];
        row[e] = -Rational::ONE;
        a.push(row);
        b.push(Rational::ZERO);
        rows_names.push(format!("nonneg{e}"));
    }
    let mut u = vec![vec![Rational::ZERO; k]; g.n1()];
    for (e, edge) in g.edges().iter().enumerate() {
        u[edge.i][e] = edge.w.clone();
    }
    let c = c.unwrap_or_else(|| vec![Rational::ZERO; k]);
    let mut inst = MaxParetoInstance::new(a, b, u, c)?;
    inst.names = Some(model::Names {
        rows: rows_names,
        cols: g.edges().iter().map(|e| format!("x_{}_{}", e.i, e.j)).collect(),
    });
    inst.matching = Some(MatchingStructure {
        n1: g.n1(),
        n2: g.n2(),
        edges: g.edges().iter().map(|e| (e.i, e.j)).collect(),
    });
    Ok(inst)
}

/// Recovers the weighted graph behind a matching-structured instance.
/// Returns `None` unless every `U` row puts nonnegative weight only on
/// the edges of its own agent.
pub fn graph_of_instance(inst: &MaxParetoInstance) -> Option<BipartiteInstance> {
    let ms = inst.matching.as_ref()?;
    if inst.n() != ms.n1 || ms.edges.len() != inst.k() {
        return None;
    }
    let mut edges = Vec::with_capacity(ms.edges.len());
    for (e, &(i, j)) in ms.edges.iter().enumerate() {
        for (agent, row) in inst.u.iter().enumerate() {
            if agent != i && !row[e].is_zero() {
                return None;
            }
        }
        edges.push(Edge { i, j, w: inst.u[i][e].clone() });
    }
    BipartiteInstance::new(ms.n1, ms.n2, edges).ok()
}

/// 0/1 edge indicator of a matching.
pub fn indicator(g: &BipartiteInstance, m: &Matching) -> Vec<Rational> {
    let mut x = vec![Rational::ZERO; g.edges().len()];
    for (i, j) in m.pairs() {
        if let Some(e) = g.edge_index(i, j) {
            x[e] = Rational::ONE;
        }
    }
    x
}

/// Matching encoded by a 0/1 edge vector. Fails on fractional or
/// conflicting entries.
pub fn matching_from_indicator(g: &BipartiteInstance, x: &[Rational]) -> Result<Matching, MatchingError> {
    if x.len() != g.edges().len() {
        return Err(MatchingError::InvalidMatching(format!("indicator length {}", x.len())));
    }
    let mut pairs = Vec::new();
    for (e, v) in x.iter().enumerate() {
        if *v == Rational::ONE {
            pairs.push((g.edges()[e].i, g.edges()[e].j));
        } else if !v.is_zero() {
            return Err(MatchingError::InvalidMatching(format!("edge {e} has fractional value {v}")));
        }
    }
    Matching::from_pairs(g, &pairs)
}

/// Fractional Pareto-optimality: no convex combination of matchings
/// dominates `m`. Checked with the verification LP over the matching
/// polytope, whose points are exactly such combinations.
pub fn is_fpo_matching(g: &BipartiteInstance, m: &Matching, mode: &NumericMode) -> Result<bool, MatchingError> {
    m.validate(g)?;
    if g.edges().is_empty() {
        return Ok(true);
    }
    let inst = matching_polytope(g, None)?;
    let res = pareto::verify_pareto(&inst, &indicator(g, m), mode)?;
    Ok(!res.is_dominated())
}

/// Nonempty set of matched agents satisfying both blocking conditions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockingSet {
    members: Vec<usize>,
}

impl BlockingSet {
    /// Sorts and deduplicates; does not validate.
    pub fn new(members: impl IntoIterator<Item = usize>) -> Self {
        let set: BTreeSet<usize> = members.into_iter().collect();
        BlockingSet { members: set.into_iter().collect() }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }
}

/// Checks the blocking conditions: every member is matched, no neighbour
/// beats its partner, and neighbours outside `M(B)` are strictly worse.
pub fn validate_blocking_set(g: &BipartiteInstance, m: &Matching, b: &BlockingSet) -> Result<(), String> {
    if b.members.is_empty() {
        return Err("blocking set is empty".into());
    }
    let mut partners = BTreeSet::new();
    for &i in &b.members {
        match m.partner(i) {
            Some(j) => partners.insert(j),
            None => return Err(format!("agent {i} is not matched")),
        };
    }
    for &i in &b.members {
        let own = agent_payoff(g, m, i);
        for e in g.incident(i) {
            if e.w > own {
                return Err(format!("agent {i} prefers object {} ({} > {own})", e.j, e.w));
            }
            if !partners.contains(&e.j) && e.w >= own {
                return Err(format!("agent {i} is not strictly worse off with object {} outside M(B)", e.j));
            }
        }
    }
    Ok(())
}

/// All blocking sets, by subset enumeration over `V₁(M)`.
pub fn all_blocking_sets(g: &BipartiteInstance, m: &Matching) -> Result<Vec<BlockingSet>, MatchingError> {
    m.validate(g)?;
    let matched = m.matched_agents();
    if matched.len() > 20 {
        return Err(MatchingError::PreconditionViolated("too many matched agents to enumerate subsets".into()));
    }
    let mut out = Vec::new();
    for mask in 1u32..(1u32 << matched.len()) {
        let b = BlockingSet::new((0..matched.len()).filter(|t| mask >> t & 1 == 1).map(|t| matched[t]));
        if validate_blocking_set(g, m, &b).is_ok() {
            out.push(b);
        }
    }
    out.sort();
    Ok(out)
}

pub fn union_blocking_sets(
    g: &BipartiteInstance,
    m: &Matching,
    b1: &BlockingSet,
    b2: &BlockingSet,
) -> Result<BlockingSet, MatchingError> {
    let u = BlockingSet::new(b1.members.iter().chain(&b2.members).copied());
    validate_blocking_set(g, m, &u).map_err(MatchingError::ValidationFailed)?;
    Ok(u)
}

/// Constructs a blocking set for a Pareto-optimal `m` given an edge
/// `(i, j)` with `w_ij > u_i`.
///
/// Each round builds the auxiliary graph on `V₁(M) ∪ {i}` whose edges are
/// `(i, j)` plus every edge at least as good as the agent's current one,
/// and grows the set `R` of agents reachable from `i` by alternating
/// paths. `R` violates Hall's condition with `N(R) = M(R \ {i})`. If no
/// agent of `R' = R \ {i}` prefers another object of `M(R')`, then `R'`
/// is blocking. Otherwise such a preference is an improving edge inside
/// the subgraph on `R' ∪ M(R')`, where `M` is perfect and still
/// Pareto-optimal; the next round works there with fewer agents.
pub fn find_blocking_set(
    g: &BipartiteInstance,
    m: &Matching,
    i: usize,
    j: usize,
) -> Result<BlockingSet, MatchingError> {
    m.validate(g)?;
    let w_ij = g
        .weight(i, j)
        .ok_or_else(|| MatchingError::PreconditionViolated(format!("({i}, {j}) is not an edge")))?
        .clone();
    if w_ij <= agent_payoff(g, m, i) {
        return Err(MatchingError::PreconditionViolated(format!("edge ({i}, {j}) does not improve agent {i}")));
    }
    if g.n1() <= ENUM_CAP && find_dominating_matching(g, m)?.is_some() {
        return Err(MatchingError::PreconditionViolated("matching is not Pareto-optimal".into()));
    }

    let owner = m.owners(g.n2());
    let mut agents: Vec<bool> = vec![true; g.n1()];
    let mut objects: Vec<bool> = vec![true; g.n2()];
    let (mut i, mut j) = (i, j);
    let mut size = g.n1();
    loop {
        // Alternating DFS from `i`; agents other than `i` keep their partner
        // as the initial matching of the auxiliary graph.
        let own = |k: usize| agent_payoff(g, m, k);
        let mut seen_obj = vec![false; g.n2()];
        let mut reach = vec![false; g.n1()];
        let mut stack = vec![i];
        reach[i] = true;
        while let Some(k) = stack.pop() {
            let mut next = Vec::new();
            if k == i {
                next.push(j);
            } else {
                let wk = own(k);
                next.extend(g.incident(k).filter(|e| objects[e.j] && e.w >= wk).map(|e| e.j));
            }
            for l in next {
                if std::mem::replace(&mut seen_obj[l], true) {
                    continue;
                }
                match owner[l] {
                    Some(h) if h != i && agents[h] => {
                        if !reach[h] {
                            reach[h] = true;
                            stack.push(h);
                        }
                    }
                    // A free object ends an augmenting path: a perfect
                    // auxiliary matching exists and dominates `m`.
                    _ => {
                        return Err(MatchingError::PreconditionViolated(
                            "matching is not Pareto-optimal (augmenting path found)".into(),
                        ))
                    }
                }
            }
        }
        let r_prime: Vec<usize> = (0..g.n1()).filter(|&k| reach[k] && k != i).collect();
        if r_prime.is_empty() {
            return Err(MatchingError::PreconditionViolated("empty Hall violator".into()));
        }
        let in_mr: Vec<bool> = {
            let mut v = vec![false; g.n2()];
            for &k in &r_prime {
                v[m.partner(k).expect("reachable agents are matched")] = true;
            }
            v
        };
        let improving = r_prime.iter().find_map(|&k| {
            let wk = own(k);
            g.incident(k).find(|e| in_mr[e.j] && e.w > wk).map(|e| (k, e.j))
        });
        match improving {
            None => {
                let b = BlockingSet::new(r_prime);
                validate_blocking_set(g, m, &b).map_err(MatchingError::ValidationFailed)?;
                return Ok(b);
            }
            Some((k, l)) => {
                if r_prime.len() >= size {
                    return Err(MatchingError::ValidationFailed("recursion did not shrink".into()));
                }
                size = r_prime.len();
                agents.iter_mut().for_each(|a| *a = false);
                for &h in &r_prime {
                    agents[h] = true;
                }
                objects = in_mr;
                i = k;
                j = l;
            }
        }
    }
}

/// Agents in `order` take their best free edge; ties go to the lower
/// object index. The result is not guaranteed Pareto-optimal when weights
/// tie.
pub fn serial_dictatorship(g: &BipartiteInstance, order: &[usize]) -> Result<Matching, MatchingError> {
    let mut seen = vec![false; g.n1()];
    for &i in order {
        if i >= g.n1() || std::mem::replace(&mut seen[i], true) {
            return Err(MatchingError::InvalidMatching(format!("order is not a permutation (agent {i})")));
        }
    }
    let mut m = Matching::empty(g.n1());
    let mut used = vec![false; g.n2()];
    for &i in order {
        let mut best: Option<&Edge> = None;
        for e in g.incident(i).filter(|e| !used[e.j]) {
            if best.is_none_or(|b| e.w > b.w) {
                best = Some(e);
            }
        }
        if let Some(e) = best {
            used[e.j] = true;
            m.mate[i] = Some(e.j);
        }
    }
    Ok(m)
}

/// Agents with strict preference lists over objects; `required` is the set
/// `Q` of the constrained decision problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AllocationInstance {
    pub agents: usize,
    pub objects: usize,
    pub preferences: Vec<Vec<usize>>,
    pub required: Option<Vec<usize>>,
}

impl AllocationInstance {
    pub fn validate(&self) -> Result<(), MatchingError> {
        if self.preferences.len() != self.agents {
            return Err(MatchingError::InvalidAllocation(format!(
                "{} preference lists for {} agents",
                self.preferences.len(),
                self.agents
            )));
        }
        for (a, list) in self.preferences.iter().enumerate() {
            let mut seen = vec![false; self.objects];
            for &o in list {
                if o >= self.objects {
                    return Err(MatchingError::InvalidAllocation(format!("agent {a} lists unknown object {o}")));
                }
                if std::mem::replace(&mut seen[o], true) {
                    return Err(MatchingError::InvalidAllocation(format!("agent {a} lists object {o} twice")));
                }
            }
        }
        if let Some(q) = &self.required {
            let mut seen = vec![false; self.objects];
            for &o in q {
                if o >= self.objects || std::mem::replace(&mut seen[o], true) {
                    return Err(MatchingError::InvalidAllocation(format!("invalid required object {o}")));
                }
            }
        }
        Ok(())
    }

    /// Weighted graph with `w(a, o) = 1 + #{objects listed below o by a}`.
    /// Edges are ordered by agent, then object.
    pub fn to_graph(&self) -> Result<BipartiteInstance, MatchingError> {
        self.validate()?;
        let mut edges = Vec::new();
        for (a, list) in self.preferences.iter().enumerate() {
            let mut row: Vec<Edge> = list
                .iter()
                .enumerate()
                .map(|(rank, &o)| Edge { i: a, j: o, w: Rational::from(list.len() - rank) })
                .collect();
            row.sort_by_key(|e| e.j);
            edges.extend(row);
        }
        BipartiteInstance::new(self.agents, self.objects, edges)
    }

    pub fn to_json_value(&self) -> Value {
        let mut v = json!({
            "agents": self.agents,
            "objects": self.objects,
            "preferences": self.preferences,
        });
        if let Some(q) = &self.required {
            v["Q"] = json!(q);
        }
        v
    }

    pub fn from_json_value(v: &Value) -> Result<Self, MatchingError> {
        #[derive(serde::Deserialize)]
        struct Raw {
            agents: usize,
            objects: usize,
            preferences: Vec<Vec<usize>>,
            #[serde(rename = "Q", default)]
            q: Option<Vec<usize>>,
        }
        let raw: Raw = serde_json::from_value(v.clone()).map_err(|e| ModelError::Parse(e.to_string()))?;
        let a = AllocationInstance {
            agents: raw.agents,
            objects: raw.objects,
            preferences: raw.preferences,
            required: raw.q,
        };
        a.validate()?;
        Ok(a)
    }

    pub fn from_json_str(s: &str) -> Result<Self, MatchingError> {
        let v: Value = serde_json::from_str(s).map_err(|e| ModelError::Parse(e.to_string()))?;
        Self::from_json_value(&v)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, MatchingError> {
        let s = std::fs::read_to_string(path).map_err(ModelError::Io)?;
        Self::from_json_str(&s)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), MatchingError> {
        let s = serde_json::to_string_pretty(&self.to_json_value()).expect("allocation serializes");
        std::fs::write(path, s).map_err(|e| MatchingError::Model(ModelError::Io(e)))
    }
}

/// Matching-polytope instance of an allocation problem. The objective
/// counts covered objects of `Q` (zero if `Q` is absent), so a
/// Pareto-optimal matching covering `Q` exists iff the optimum is `|Q|`.
pub fn encode_allocation(a: &AllocationInstance) -> Result<MaxParetoInstance, MatchingError> {
    let g = a.to_graph()?;
    let mut in_q = vec![false; a.objects];
    for &o in a.required.iter().flatten() {
        in_q[o] = true;
    }
    let c = g.edges().iter().map(|e| if in_q[e.j] { Rational::ONE } else { Rational::ZERO }).collect();
    matching_polytope(&g, Some(c))
}

/// As [`encode_allocation`], with objective `c_(a,o) = welfare[a][o]`.
pub fn encode_allocation_with_welfare(
    a: &AllocationInstance,
    welfare: &[Vec<Rational>],
) -> Result<MaxParetoInstance, MatchingError> {
    let g = a.to_graph()?;
    if welfare.len() != a.agents || welfare.iter().any(|r| r.len() != a.objects) {
        return Err(MatchingError::InvalidAllocation("welfare matrix must be agents × objects".into()));
    }
    let c = g.edges().iter().map(|e| welfare[e.i][e.j].clone()).collect();
    matching_polytope(&g, Some(c))
}

/// Result of [`max_welfare_po_matching`].
#[derive(Debug, Clone)]
pub struct PoSearchOutcome {
    pub best: Option<(Matching, Rational)>,
    /// `false` when the deadline stopped the search early.
    pub complete: bool,
    pub nodes: u64,
    pub leaves: u64,
}

/// Maximizes `Σ welfare[e]` over Pareto-optimal matchings by branch and
/// bound.
///
/// In a Pareto-optimal matching, some agent with a positive-weight edge
/// left holds an object of maximum remaining weight (otherwise following
/// "my best object is held by" pointers yields an improving chain), and
/// removing it leaves a Pareto-optimal matching of the reduced graph. The
/// search therefore assigns, at every node, a top object to some agent.
/// Each matching is generated once: when agent `a` is chosen, the agents
/// before `a` are forbidden from their current top objects. Once no agent
/// has a positive edge left, the remaining zero-payoff edges are filled
/// in for welfare. Leaves are re-checked for Pareto-optimality.
pub fn max_welfare_po_matching(
    g: &BipartiteInstance,
    welfare: &[Rational],
    deadline: Option<Instant>,
) -> Result<PoSearchOutcome, MatchingError> {
    if welfare.len() != g.edges().len() {
        return Err(MatchingError::InvalidGraph("welfare must have one entry per edge".into()));
    }
    let mut s = PoSearch {
        g,
        welfare,
        deadline,
        mate: Matching::empty(g.n1()),
        used: vec![false; g.n2()],
        active: vec![true; g.n1()],
        forbidden: vec![vec![false; g.n2()]; g.n1()],
        best: None,
        timed_out: false,
        nodes: 0,
        leaves: 0,
    };
    s.search(Rational::ZERO)?;
    Ok(PoSearchOutcome { best: s.best, complete: !s.timed_out, nodes: s.nodes, leaves: s.leaves })
}

struct PoSearch<'a> {
    g: &'a BipartiteInstance,
    welfare: &'a [Rational],
    deadline: Option<Instant>,
    mate: Matching,
    used: Vec<bool>,
    active: Vec<bool>,
    forbidden: Vec<Vec<bool>>,
    best: Option<(Matching, Rational)>,
    timed_out: bool,
    nodes: u64,
    leaves: u64,
}

impl PoSearch<'_> {
    fn top_weight(&self, a: usize) -> Rational {
        self.g.incident(a).filter(|e| !self.used[e.j]).map(|e| e.w.clone()).max().unwrap_or(Rational::ZERO)
    }

    fn bound(&self) -> Rational {
        (0..self.g.n1())
            .filter(|&a| self.active[a])
            .map(|a| {
                self.g.adj[a]
                    .iter()
                    .filter(|&&e| !self.used[self.g.edges[e].j] && !self.forbidden[a][self.g.edges[e].j])
                    .map(|&e| self.welfare[e].clone())
                    .fold(Rational::ZERO, |x, y| Rational::max_of(&x, &y))
            })
            .sum()
    }

    fn beats_best(&self, value: &Rational) -> bool {
        self.best.as_ref().is_none_or(|(_, b)| value > b)
    }

    fn search(&mut self, value: Rational) -> Result<(), MatchingError> {
        self.nodes += 1;
        if self.timed_out {
            return Ok(());
        }
        if self.nodes.is_multiple_of(1024) && self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.timed_out = true;
            return Ok(());
        }
        if !self.beats_best(&(&value + &self.bound())) {
            return Ok(());
        }
        let tops: Vec<(usize, Rational)> = (0..self.g.n1())
            .filter(|&a| self.active[a])
            .map(|a| (a, self.top_weight(a)))
            .filter(|(_, t)| t.is_positive())
            .collect();
        if tops.is_empty() {
            return self.leaf(value);
        }
        let mut branches: Vec<(usize, usize, usize)> = Vec::new();
        for (pos, (a, top)) in tops.iter().enumerate() {
            for &e in &self.g.adj[*a] {
                let edge = &self.g.edges[e];
                if !self.used[edge.j] && edge.w == *top && !self.forbidden[*a][edge.j] {
                    branches.push((pos, *a, e));
                }
            }
        }
        branches.sort_by(|x, y| self.welfare[y.2].cmp(&self.welfare[x.2]).then(x.0.cmp(&y.0)));
        for (pos, a, e) in branches {
            let j = self.g.edges[e].j;
            let mut added: Vec<(usize, usize)> = Vec::new();
            for (b, top) in &tops[..pos] {
                for edge in self.g.incident(*b) {
                    if !self.used[edge.j] && edge.w == *top && !self.forbidden[*b][edge.j] {
                        added.push((*b, edge.j));
                    }
                }
            }
            for &(b, o) in &added {
                self.forbidden[b][o] = true;
            }
            self.used[j] = true;
            self.active[a] = false;
            self.mate.mate[a] = Some(j);
            let v = &value + &self.welfare[e];
            self.search(v)?;
            self.mate.mate[a] = None;
            self.active[a] = true;
            self.used[j] = false;
            for &(b, o) in &added {
                self.forbidden[b][o] = false;
            }
            if self.timed_out {
                break;
            }
        }
        Ok(())
    }

    /// Remaining agents have only zero-weight edges; add the best set of
    /// them for welfare and record the matching if it is Pareto-optimal.
    fn leaf(&mut self, value: Rational) -> Result<(), MatchingError> {
        self.leaves += 1;
        let rest: Vec<usize> = (0..self.g.n1()).filter(|&a| self.active[a]).collect();
        let mut extra = Matching::empty(self.g.n1());
        let mut best_extra = (Matching::empty(self.g.n1()), Rational::ZERO);
        self.fill_zero_edges(&rest, 0, &mut extra, Rational::ZERO, &mut best_extra);
        let mut full = self.mate.clone();
        for (a, j) in best_extra.0.pairs() {
            full.mate[a] = Some(j);
        }
        let total = &value + &best_extra.1;
        if self.beats_best(&total) && find_dominating_matching(self.g, &full)?.is_none() {
            self.best = Some((full, total));
        }
        Ok(())
    }

    fn fill_zero_edges(
        &mut self,
        rest: &[usize],
        t: usize,
        cur: &mut Matching,
        value: Rational,
        best: &mut (Matching, Rational),
    ) {
        if t == rest.len() {
            if value > best.1 {
                *best = (cur.clone(), value);
            }
            return;
        }
        let a = rest[t];
        self.fill_zero_edges(rest, t + 1, cur, value.clone(), best);
        for &e in &self.g.adj[a] {
            let j = self.g.edges[e].j;
            if !self.used[j] && self.welfare[e].is_positive() {
                self.used[j] = true;
                cur.mate[a] = Some(j);
                self.fill_zero_edges(rest, t + 1, cur, &value + &self.welfare[e], best);
                cur.mate[a] = None;
                self.used[j] = false;
            }
        }
    }
}

/// The weighted graph reconstructed for the three-agent worked example:
/// agents `v₁..v₃` are `0..3`, objects `v₄..v₆` are `0..3`.
pub fn example1() -> BipartiteInstance {
    BipartiteInstance::from_triples(3, 3, &[(0, 1, 1), (0, 2, 2), (1, 0, 1), (1, 1, 2), (2, 0, 2), (2, 2, 4)])
        .expect("fixture is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(v: &[i64]) -> PayoffVector {
        PayoffVector(v.iter().map(|&x| Rational::from(x)).collect())
    }

    fn m1(g: &BipartiteInstance) -> Matching {
        Matching::from_pairs(g, &[(1, 1), (2, 2)]).unwrap()
    }

    #[test]
    fn payoff_vectors_of_example() {
        let g = example1();
        assert_eq!(payoff_vector(&g, &m1(&g)).unwrap(), pv(&[0, 2, 4]));
        let m3 = Matching::from_pairs(&g, &[(0, 2), (1, 1), (2, 0)]).unwrap();
        assert_eq!(payoff_vector(&g, &m3).unwrap(), pv(&[2, 2, 2]));
        let g2 = BipartiteInstance::from_triples(2, 2, &[(0, 0, 0), (1, 1, 3)]).unwrap();
        let m = Matching::from_pairs(&g2, &[(0, 0)]).unwrap();
        assert_eq!(payoff_vector(&g2, &m).unwrap(), pv(&[0, 0]));
    }

    #[test]
    fn polytope_json_keeps_matching_structure() {
        let g = example1();
        let inst = matching_polytope(&g, None).unwrap();
        let back = MaxParetoInstance::from_json_value(&inst.to_json_value()).unwrap();
        assert_eq!(back, inst);
        assert_eq!(graph_of_instance(&back), Some(g));
        let mut v = inst.to_json_value();
        v["matching"]["edges"] = serde_json::json!([[0, 1]]);
        assert!(MaxParetoInstance::from_json_value(&v).is_err());
    }

    #[test]
    fn invalid_inputs() {
        let g = example1();
        assert!(matches!(Matching::from_pairs(&g, &[(0, 0)]), Err(MatchingError::InvalidMatching(_))));
        assert!(matches!(Matching::from_pairs(&g, &[(0, 1), (1, 1)]), Err(MatchingError::InvalidMatching(_))));
        assert!(BipartiteInstance::from_triples(1, 1, &[(0, 0, 1), (0, 0, 2)]).is_err());
        assert!(BipartiteInstance::from_triples(1, 1, &[(0, 0, -1)]).is_err());
        assert!(BipartiteInstance::from_triples(1, 1, &[(0, 1, 1)]).is_err());
    }

    #[test]
    fn reduced_graph_example() {
        let g = example1();
        let m2 = Matching::from_pairs(&g, &[(0, 1), (1, 0), (2, 2)]).unwrap();
        let r = reduced_graph(&g, &m2, &[0]).unwrap();
        assert_eq!(r.agents, vec![1, 2]);
        assert_eq!(r.objects, vec![0, 2]);
        let pairs: Vec<(usize, usize)> = r.matching.pairs().map(|(i, j)| (r.agents[i], r.objects[j])).collect();
        assert_eq!(pairs, vec![(1, 0), (2, 2)]);
        let same = reduced_graph(&g, &m2, &[]).unwrap();
        assert_eq!(same.graph, g);
        assert_eq!(same.matching, m2);
        let none = reduced_graph(&g, &m2, &[0, 1, 2]).unwrap();
        assert_eq!(none.graph.n1(), 0);
        assert!(none.matching.is_empty());
    }

    #[test]
    fn po_checks_on_example() {
        let g = example1();
        assert!(is_po_matching(&g, &m1(&g)).unwrap());
        let m = Matching::from_pairs(&g, &[(1, 0), (2, 2)]).unwrap();
        assert!(!is_po_matching(&g, &m).unwrap());
        let dom = find_dominating_matching(&g, &m).unwrap().unwrap();
        assert!(pareto::dominates(&payoff_vector(&g, &dom).unwrap(), &pv(&[0, 1, 4])).unwrap());
        let single = BipartiteInstance::from_triples(1, 1, &[(0, 0, 3)]).unwrap();
        let only = Matching::from_pairs(&single, &[(0, 0)]).unwrap();
        assert!(is_po_matching(&single, &only).unwrap());
    }

    #[test]
    fn fpo_on_example_and_gadget() {
        let g = example1();
        let mode = NumericMode::ExactRational;
        for pairs in [vec![(1, 1), (2, 2)], vec![(0, 1), (1, 0), (2, 2)], vec![(0, 2), (1, 1), (2, 0)]] {
            let m = Matching::from_pairs(&g, &pairs).unwrap();
            assert!(is_fpo_matching(&g, &m, &mode).unwrap());
        }
        // Agents 0, 1; objects x=0, y=1, z=2, t=3. Matchings realize the
        // payoffs (5,1), (1,5) and (2,2).
        let gadget = BipartiteInstance::from_triples(
            2,
            4,
            &[(0, 0, 5), (0, 1, 1), (0, 2, 2), (1, 0, 5), (1, 1, 1), (1, 3, 2)],
        )
        .unwrap();
        let m22 = Matching::from_pairs(&gadget, &[(0, 2), (1, 3)]).unwrap();
        assert_eq!(payoff_vector(&gadget, &m22).unwrap(), pv(&[2, 2]));
        assert!(!is_fpo_matching(&gadget, &m22, &mode).unwrap());
        assert!(!is_po_matching(&gadget, &m22).unwrap());
        let m51 = Matching::from_pairs(&gadget, &[(0, 0), (1, 1)]).unwrap();
        assert!(!is_fpo_matching(&gadget, &m51, &mode).unwrap());
        let m52 = Matching::from_pairs(&gadget, &[(0, 0), (1, 3)]).unwrap();
        assert!(is_fpo_matching(&gadget, &m52, &mode).unwrap());
        assert!(is_po_matching(&gadget, &m52).unwrap());
    }

    #[test]
    fn blocking_sets_of_example() {
        let g = example1();
        let m = m1(&g);
        let all = all_blocking_sets(&g, &m).unwrap();
        assert_eq!(all, vec![BlockingSet::new([1]), BlockingSet::new([1, 2]), BlockingSet::new([2])]);
        let b = find_blocking_set(&g, &m, 0, 1).unwrap();
        assert!(all.contains(&b));
        let u = union_blocking_sets(&g, &m, &BlockingSet::new([1]), &BlockingSet::new([2])).unwrap();
        assert_eq!(u, BlockingSet::new([1, 2]));
        let same = union_blocking_sets(&g, &m, &u, &u).unwrap();
        assert_eq!(same, u);
    }

    #[test]
    fn blocking_set_base_case() {
        // i = 0, i' = 1, j = 0.
        let g = BipartiteInstance::from_triples(2, 1, &[(0, 0, 1), (1, 0, 1)]).unwrap();
        let m = Matching::from_pairs(&g, &[(1, 0)]).unwrap();
        assert_eq!(find_blocking_set(&g, &m, 0, 0).unwrap(), BlockingSet::new([1]));
    }

    #[test]
    fn blocking_set_preconditions() {
        let g = example1();
        let m = m1(&g);
        assert!(matches!(find_blocking_set(&g, &m, 2, 2), Err(MatchingError::PreconditionViolated(_))));
        let dominated = Matching::from_pairs(&g, &[(1, 0), (2, 2)]).unwrap();
        assert!(matches!(find_blocking_set(&g, &dominated, 1, 1), Err(MatchingError::PreconditionViolated(_))));
    }

    #[test]
    fn serial_dictatorship_examples() {
        let g = example1();
        let m = serial_dictatorship(&g, &[2, 1, 0]).unwrap();
        assert_eq!(m, m1(&g));
        let single = BipartiteInstance::from_triples(1, 3, &[(0, 0, 1), (0, 1, 5), (0, 2, 2)]).unwrap();
        assert_eq!(serial_dictatorship(&single, &[0]).unwrap().partner(0), Some(1));
        let triples: Vec<(usize, usize, i64)> = (0..3).flat_map(|i| (0..3).map(move |j| (i, j, 1))).collect();
        let flat = BipartiteInstance::from_triples(3, 3, &triples).unwrap();
        let m = serial_dictatorship(&flat, &[1, 0, 2]).unwrap();
        assert_eq!(m.len(), 3);
        assert!(is_po_matching(&flat, &m).unwrap());
        assert!(serial_dictatorship(&g, &[0, 0, 1]).is_err());
    }

    #[test]
    fn enumeration_counts() {
        // Complete 2×2: empty, four singletons, two perfect.
        let g = BipartiteInstance::from_triples(2, 2, &[(0, 0, 1), (0, 1, 1), (1, 0, 1), (1, 1, 1)]).unwrap();
        assert_eq!(enumerate_matchings(&g).len(), 7);
        let flags = pareto_flags(&[pv(&[1, 1]), pv(&[1, 0]), pv(&[2, 0]), pv(&[1, 1])]);
        assert_eq!(flags, vec![true, false, true, true]);
    }

    #[test]
    fn allocation_encoding() {
        let a = AllocationInstance { agents: 1, objects: 2, preferences: vec![vec![1, 0]], required: None };
        let g = a.to_graph().unwrap();
        assert_eq!(g.weight(0, 1), Some(&Rational::from(2)));
        assert_eq!(g.weight(0, 0), Some(&Rational::from(1)));
        let a = AllocationInstance { agents: 2, objects: 2, preferences: vec![vec![], vec![0]], required: None };
        let g = a.to_graph().unwrap();
        assert_eq!(g.incident(0).count(), 0);
        let inst = encode_allocation(&a).unwrap();
        assert_eq!(inst.k(), 1);
        let bad = AllocationInstance { agents: 1, objects: 2, preferences: vec![vec![1, 1]], required: None };
        assert!(bad.validate().is_err());
        let json = r#"{"agents": 2, "objects": 2, "preferences": [[0, 1], [0, 1]], "Q": [0, 1]}"#;
        let a = AllocationInstance::from_json_str(json).unwrap();
        assert_eq!(a.required, Some(vec![0, 1]));
        assert_eq!(AllocationInstance::from_json_value(&a.to_json_value()).unwrap(), a);
    }

    #[test]
    fn graph_json_round_trip() {
        let g = example1();
        let back = BipartiteInstance::from_json_value(&g.to_json_value()).unwrap();
        assert_eq!(back, g);
        let g = BipartiteInstance::from_json_str(r#"{"n1": 1, "n2": 1, "edges": [[0, 0, [1, 2]]]}"#).unwrap();
        assert_eq!(g.weight(0, 0), Some(&Rational::new(1, 2)));
        assert!(BipartiteInstance::from_json_str(r#"{"n1": 1, "edges": []}"#).is_err());
    }

    #[test]
    fn po_search_on_example() {
        let g = example1();
        let welfare: Vec<Rational> = g.edges().iter().map(|e| e.w.clone()).collect();
        let out = max_welfare_po_matching(&g, &welfare, None).unwrap();
        assert!(out.complete);
        assert_eq!(out.best.unwrap().1, Rational::from(6));
        // Welfare favouring v₁ forces M₃, the only PO matching giving v₁ payoff 2.
        let welfare: Vec<Rational> =
            g.edges().iter().map(|e| Rational::from(if (e.i, e.j) == (0, 2) { 10 } else { 0 })).collect();
        let (m, v) = max_welfare_po_matching(&g, &welfare, None).unwrap().best.unwrap();
        assert_eq!(v, Rational::from(10));
        assert_eq!(payoff_vector(&g, &m).unwrap(), pv(&[2, 2, 2]));
    }
}
