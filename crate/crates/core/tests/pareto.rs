mod common;

use maxpareto::lp::{self, Direction};
use maxpareto::model::payoff;
use maxpareto::pareto::{detect_aligned_interests, find_support_certificate, verify_pareto, Verdict};
use maxpareto::{solver, NumericMode, Rational};
use proptest::prelude::*;
use rand::Rng;

const EXACT: NumericMode = NumericMode::ExactRational;

/// Vertices plus midpoints of random vertex pairs.
fn sample_points(inst: &maxpareto::MaxParetoInstance, rng: &mut impl Rng) -> Vec<Vec<Rational>> {
    let verts = common::brute_vertices(&inst.a, &inst.b);
    let mut pts = verts.clone();
    for _ in 0..verts.len().min(4) {
        let p = &verts[rng.gen_range(0..verts.len())];
        let q = &verts[rng.gen_range(0..verts.len())];
        pts.push(p.iter().zip(q).map(|(a, b)| (a + b) / Rational::from(2)).collect());
    }
    pts
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn certificates_imply_not_dominated(seed in 0u64..1_000_000) {
        let mut rng = common::rng(seed);
        let inst = common::random_general_instance(&mut rng, 4, 8, 3);
        for x in sample_points(&inst, &mut rng) {
            let verdict = verify_pareto(&inst, &x, &EXACT).unwrap();
            if let Some(cert) = find_support_certificate(&inst, &x, None, &EXACT).unwrap() {
                prop_assert!(cert.validate(&inst, &x, &EXACT).is_ok());
                prop_assert!(!verdict.is_dominated());
            }
            let float = NumericMode::default_float();
            if find_support_certificate(&inst, &x, None, &float).unwrap().is_some() {
                prop_assert!(!verify_pareto(&inst, &x, &float).unwrap().is_dominated());
            }
        }
    }

    #[test]
    fn dominance_witnesses_are_genuine(seed in 0u64..1_000_000) {
        let mut rng = common::rng(seed);
        let inst = common::random_general_instance(&mut rng, 4, 8, 3);
        for x in sample_points(&inst, &mut rng) {
            if let Verdict::Dominated { by } = verify_pareto(&inst, &x, &EXACT).unwrap().verdict {
                prop_assert!(inst.contains(&by, &EXACT).unwrap());
                let ux = payoff(&inst, &x).unwrap().0;
                let uy = payoff(&inst, &by).unwrap().0;
                prop_assert!(common::naive_dominates(&uy, &ux));
            }
        }
    }

    #[test]
    fn aligned_objective_gives_pareto_vertex(seed in 0u64..1_000_000) {
        let mut rng = common::rng(seed);
        let base = common::random_general_instance(&mut rng, 4, 8, 3);
        let w: Vec<Rational> = (0..base.n()).map(|_| Rational::new(rng.gen_range(1i64..=12), rng.gen_range(1i64..=4))).collect();
        let c: Vec<Rational> = (0..base.k()).map(|j| base.u.iter().zip(&w).map(|(row, wi)| &row[j] * wi).sum()).collect();
        let inst = base.with_objective(c.clone()).unwrap();
        let found = detect_aligned_interests(&inst, &EXACT).unwrap();
        prop_assert!(found.is_some());
        let region = inst.region_lp(c.clone(), Direction::Max);
        let sol = lp::solve_lexicographic(&region.problem, &c, &EXACT).unwrap();
        prop_assert!(!verify_pareto(&inst, &sol.x, &EXACT).unwrap().is_dominated());
    }
}

#[test]
fn weight_evaluations_are_supported_points() {
    for seed in 0..40u64 {
        let mut rng = common::rng(900 + seed);
        let inst = common::random_general_instance(&mut rng, 4, 8, 3);
        let w: Vec<Rational> = (0..inst.n()).map(|_| Rational::from(rng.gen_range(1i64..=20))).collect();
        let ev = solver::evaluate_weight(&inst, &w, &EXACT).unwrap();
        assert!(ev.certificate.validate(&inst, &ev.x, &EXACT).is_ok());
        assert!(!verify_pareto(&inst, &ev.x, &EXACT).unwrap().is_dominated());
    }
}
