mod common;

use std::time::Duration;

use maxpareto::matching::{self, BipartiteInstance};
use maxpareto::model::unit_box;
use maxpareto::pareto::verify_pareto;
use maxpareto::solver::{self, ExactConfig, HeuristicConfig, SolveReport, SolverError};
use maxpareto::{MaxParetoInstance, NumericMode, Rational};
use rand::Rng;

const EXACT: NumericMode = NumericMode::ExactRational;

fn quick_heuristic(seed: u64) -> HeuristicConfig {
    HeuristicConfig {
        w_cap: Rational::from(8),
        starts: 3,
        local_steps: 2,
        time_limit: Duration::from_secs(30),
        seed,
        ..HeuristicConfig::default()
    }
}

fn assert_verified(inst: &MaxParetoInstance, r: &SolveReport) {
    let x = r.incumbent_x.as_ref().expect("incumbent");
    assert!(r.po_verified);
    assert!(inst.contains(x, &EXACT).unwrap());
    assert!(!verify_pareto(inst, x, &EXACT).unwrap().is_dominated());
    if let Some(cert) = &r.certificate {
        cert.validate(inst, x, &EXACT).unwrap();
    }
}

#[test]
fn heuristic_never_beats_exact() {
    for s in 0..1000u64 {
        let mut rng = common::rng(40_000 + s);
        let inst = common::random_general_instance(&mut rng, 3, 6, 3);
        let h = solver::solve_heuristic(&inst, &quick_heuristic(s)).unwrap();
        let e = solver::solve_exact(&inst, &ExactConfig::default()).unwrap();
        assert_verified(&inst, &h);
        assert_verified(&inst, &e);
        assert!(h.lb.unwrap() <= e.lb.unwrap(), "seed {s}");
    }
}

fn brute_matching_optimum(g: &BipartiteInstance, c: &[Rational]) -> Rational {
    let mates = common::naive_matchings(g);
    let payoffs: Vec<Vec<Rational>> = mates.iter().map(|m| common::naive_payoff(g, m)).collect();
    let flags = common::naive_po_flags(&payoffs);
    mates
        .iter()
        .zip(flags)
        .filter(|(_, po)| *po)
        .map(|(mate, _)| {
            g.edges().iter().zip(c).filter(|(e, _)| mate[e.i] == Some(e.j)).map(|(_, ci)| ci.clone()).sum::<Rational>()
        })
        .max()
        .unwrap()
}

#[test]
fn exact_matches_brute_force_on_matching_instances() {
    for s in 0..300u64 {
        let mut rng = common::rng(41_000 + s);
        let n1 = rng.gen_range(1..=5);
        let n2 = rng.gen_range(1..=5);
        let g = common::random_graph_sized(&mut rng, n1, n2, 0.7, 4);
        if g.edges().is_empty() {
            continue;
        }
        let c: Vec<Rational> = g.edges().iter().map(|_| Rational::from(rng.gen_range(-3i64..=6))).collect();
        let inst = matching::matching_polytope(&g, Some(c.clone())).unwrap();
        let e = solver::solve_exact(&inst, &ExactConfig::default()).unwrap();
        assert_eq!(e.lb.clone().unwrap(), brute_matching_optimum(&g, &c), "seed {s}");
        assert_verified(&inst, &e);
        // same answer without the matching shortcut, when small enough
        if inst.k() <= 8 {
            let mut plain = inst.clone();
            plain.matching = None;
            let v = solver::solve_exact(&plain, &ExactConfig::default()).unwrap();
            assert_eq!(v.lb, e.lb, "seed {s}");
        }
    }
}

#[test]
fn weight_evaluation_is_scale_invariant() {
    for s in 0..100u64 {
        let mut rng = common::rng(42_000 + s);
        let inst = common::random_general_instance(&mut rng, 4, 8, 3);
        let w: Vec<Rational> = (0..inst.n()).map(|_| Rational::new(rng.gen_range(1i64..=30), rng.gen_range(1i64..=5))).collect();
        let base = solver::evaluate_weight(&inst, &w, &EXACT).unwrap();
        for lambda in [Rational::from(2), Rational::new(1, 3), Rational::new(7, 5)] {
            let scaled: Vec<Rational> = w.iter().map(|v| v * &lambda).collect();
            let ev = solver::evaluate_weight(&inst, &scaled, &EXACT).unwrap();
            assert_eq!(ev.x, base.x, "seed {s}");
            assert_eq!(ev.value, base.value, "seed {s}");
        }
    }
}

#[test]
fn heuristic_is_deterministic_in_seed() {
    let mut rng = common::rng(43_000);
    let inst = common::random_general_instance(&mut rng, 4, 8, 3);
    let a = solver::solve_heuristic(&inst, &quick_heuristic(9)).unwrap();
    let b = solver::solve_heuristic(&inst, &quick_heuristic(9)).unwrap();
    assert_eq!(a.incumbent_x, b.incumbent_x);
    assert_eq!(a.lb, b.lb);
}

#[test]
fn exact_respects_caps() {
    let inst = unit_box(13, vec![Rational::from(1); 13]);
    assert!(matches!(solver::solve_exact(&inst, &ExactConfig::default()), Err(SolverError::CapExceeded { .. })));
    let cfg = ExactConfig { cap_k: 13, cap_m: 26, ..ExactConfig::default() };
    assert!(solver::solve_exact(&unit_box(3, vec![Rational::from(1); 3]), &cfg).is_ok());
}

#[test]
fn invalid_heuristic_config_is_rejected() {
    let inst = unit_box(2, vec![Rational::from(1); 2]);
    let cfg = HeuristicConfig { w_cap: Rational::new(1, 2), ..HeuristicConfig::default() };
    assert!(matches!(solver::solve_heuristic(&inst, &cfg), Err(SolverError::InvalidConfig(_))));
    let cfg = HeuristicConfig { starts: 0, ..HeuristicConfig::default() };
    assert!(matches!(solver::solve_heuristic(&inst, &cfg), Err(SolverError::InvalidConfig(_))));
}
