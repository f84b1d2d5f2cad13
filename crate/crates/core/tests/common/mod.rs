//! Random instance generators shared by the integration tests.
#![allow(dead_code)]

use maxpareto::matching::{BipartiteInstance, Edge};
use maxpareto::model::{validate_instance, MaxParetoInstance};
use maxpareto::{NumericMode, Rational};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Graph with `n1, n2 ∈ [2, 6]`, integer weights in `[0, 9]`, each edge
/// present with probability `density`.
pub fn random_graph(rng: &mut ChaCha8Rng, density: f64) -> BipartiteInstance {
    let n1 = rng.gen_range(2..=6);
    let n2 = rng.gen_range(2..=6);
    random_graph_sized(rng, n1, n2, density, 9)
}

pub fn random_graph_sized(rng: &mut ChaCha8Rng, n1: usize, n2: usize, density: f64, max_w: i64) -> BipartiteInstance {
    let mut edges = Vec::new();
    for i in 0..n1 {
        for j in 0..n2 {
            if rng.gen_bool(density) {
                edges.push(Edge { i, j, w: Rational::from(rng.gen_range(0..=max_w)) });
            }
        }
    }
    BipartiteInstance::new(n1, n2, edges).expect("generated graph is valid")
}

/// Bounded, nonempty polyhedron with `k ≤ max_k`, `m ≤ max_m` and `n ≤ max_n`
/// agents. Rows have small integer coefficients and positive right-hand
/// sides, so the origin is feasible; unbounded draws are rejected.
pub fn random_general_instance(rng: &mut ChaCha8Rng, max_k: usize, max_m: usize, max_n: usize) -> MaxParetoInstance {
    loop {
        let k = rng.gen_range(1..=max_k);
        let m = rng.gen_range((k + 1)..=max_m);
        let n = rng.gen_range(1..=max_n);
        let a: Vec<Vec<Rational>> =
            (0..m).map(|_| (0..k).map(|_| Rational::from(rng.gen_range(-3i64..=3))).collect()).collect();
        if a.iter().any(|r| r.iter().all(|v| v.is_zero())) {
            continue;
        }
        let b: Vec<Rational> = (0..m).map(|_| Rational::from(rng.gen_range(1i64..=5))).collect();
        let u: Vec<Vec<Rational>> =
            (0..n).map(|_| (0..k).map(|_| Rational::from(rng.gen_range(-2i64..=3))).collect()).collect();
        let c: Vec<Rational> = (0..k).map(|_| Rational::from(rng.gen_range(-3i64..=3))).collect();
        let inst = MaxParetoInstance::new(a, b, u, c).expect("consistent shapes");
        let v = validate_instance(&inst, &NumericMode::ExactRational).expect("validation runs");
        if v.nonempty && v.bounded {
            return inst;
        }
    }
}

/// Random strict preference lists over random subsets of objects.
pub fn random_preferences(rng: &mut ChaCha8Rng, agents: usize, objects: usize) -> Vec<Vec<usize>> {
    (0..agents)
        .map(|_| {
            let mut list: Vec<usize> = (0..objects).filter(|_| rng.gen_bool(0.6)).collect();
            list.shuffle(rng);
            list
        })
        .collect()
}

/// Solves `a·x = b` by Gauss-Jordan elimination; `None` when singular.
fn gauss(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                for c in col..n {
                    let d = &f * &a[col][c];
                    a[r][c] = &a[r][c] - &d;
                }
                let d = &f * &b[col];
                b[r] = &b[r] - &d;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Every vertex of `{x : a·x ≤ b}` found by trying all square subsystems.
/// Slow but shares no code with the simplex.
pub fn brute_vertices(a: &[Vec<Rational>], b: &[Rational]) -> Vec<Vec<Rational>> {
    let k = a.first().map_or(0, Vec::len);
    let mut out: Vec<Vec<Rational>> = Vec::new();
    let mut pick: Vec<usize> = (0..k).collect();
    if k == 0 || k > a.len() {
        return out;
    }
    loop {
        let sys: Vec<Vec<Rational>> = pick.iter().map(|&r| a[r].clone()).collect();
        let rhs: Vec<Rational> = pick.iter().map(|&r| b[r].clone()).collect();
        if let Some(x) = gauss(sys, rhs) {
            let feasible = a.iter().zip(b).all(|(row, bi)| {
                let lhs: Rational = row.iter().zip(&x).map(|(p, q)| p * q).sum();
                lhs <= *bi
            });
            if feasible && !out.contains(&x) {
                out.push(x);
            }
        }
        // next combination
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if pick[i] < a.len() - k + i {
                pick[i] += 1;
                for t in i + 1..k {
                    pick[t] = pick[t - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Maximum of `c·x` over a bounded nonempty polyhedron, by vertex scan.
pub fn brute_lp_max(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> Option<Rational> {
    brute_vertices(a, b).iter().map(|x| c.iter().zip(x).map(|(p, q)| p * q).sum::<Rational>()).max()
}

/// All matchings as `mate` vectors, built by plain recursion.
pub fn naive_matchings(g: &BipartiteInstance) -> Vec<Vec<Option<usize>>> {
    fn go(g: &BipartiteInstance, i: usize, used: &mut Vec<bool>, cur: &mut Vec<Option<usize>>, out: &mut Vec<Vec<Option<usize>>>) {
        if i == g.n1() {
            out.push(cur.clone());
            return;
        }
        cur.push(None);
        go(g, i + 1, used, cur, out);
        cur.pop();
        for e in g.edges().iter().filter(|e| e.i == i) {
            if !used[e.j] {
                used[e.j] = true;
                cur.push(Some(e.j));
                go(g, i + 1, used, cur, out);
                cur.pop();
                used[e.j] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(g, 0, &mut vec![false; g.n2()], &mut Vec::new(), &mut out);
    out
}

pub fn naive_payoff(g: &BipartiteInstance, mate: &[Option<usize>]) -> Vec<Rational> {
    mate.iter()
        .enumerate()
        .map(|(i, m)| {
            m.map_or(Rational::from(0), |j| g.edges().iter().find(|e| e.i == i && e.j == j).unwrap().w.clone())
        })
        .collect()
}

pub fn naive_dominates(u: &[Rational], v: &[Rational]) -> bool {
    u.iter().zip(v).all(|(a, b)| a >= b) && u.iter().zip(v).any(|(a, b)| a > b)
}

/// Pareto flags by comparing every pair of payoff vectors.
pub fn naive_po_flags(payoffs: &[Vec<Rational>]) -> Vec<bool> {
    payoffs.iter().map(|p| !payoffs.iter().any(|q| naive_dominates(q, p))).collect()
}
