mod common;

use maxpareto::lp::{self, Direction, LpProblem, LpStatus, RowSense};
use maxpareto::{NumericMode, Rational};
use proptest::prelude::*;
use rand::Rng;

const EXACT: NumericMode = NumericMode::ExactRational;

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn ri(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| Rational::from(x)).collect()
}

/// `max c·x, a·x ≤ b, x ≥ 0`.
fn packing(a: Vec<Vec<Rational>>, b: Vec<Rational>, c: Vec<Rational>) -> LpProblem {
    let mut p = LpProblem::new(c.len(), c, Direction::Max);
    for (row, bi) in a.into_iter().zip(b) {
        p.add_row(row, RowSense::Le, bi);
    }
    p
}

/// Same region with the sign rows written out, for the brute-force oracle.
fn with_sign_rows(a: &[Vec<Rational>], b: &[Rational]) -> (Vec<Vec<Rational>>, Vec<Rational>) {
    let k = a[0].len();
    let mut a2 = a.to_vec();
    let mut b2 = b.to_vec();
    for j in 0..k {
        let mut row = vec![Rational::from(0); k];
        row[j] = Rational::from(-1);
        a2.push(row);
        b2.push(Rational::from(0));
    }
    (a2, b2)
}

fn check_certified(p: &LpProblem, a: &[Vec<Rational>], b: &[Rational]) {
    let sol = lp::solve_lp(p, &EXACT).unwrap();
    assert_eq!(sol.status, LpStatus::Optimal);
    for (row, bi) in a.iter().zip(b) {
        let lhs: Rational = row.iter().zip(&sol.x).map(|(p, q)| p * q).sum();
        assert!(lhs <= *bi);
    }
    assert!(sol.x.iter().all(|v| *v >= Rational::from(0)));
    // dual feasibility and zero gap
    assert!(sol.duals.iter().all(|y| *y >= Rational::from(0)));
    for j in 0..p.num_vars() {
        let col: Rational = a.iter().zip(&sol.duals).map(|(row, y)| &row[j] * y).sum();
        assert!(col >= p.objective[j]);
    }
    let dual_obj: Rational = b.iter().zip(&sol.duals).map(|(p, q)| p * q).sum();
    assert_eq!(dual_obj, sol.objective_value);
    let (a2, b2) = with_sign_rows(a, b);
    assert_eq!(Some(sol.objective_value.clone()), common::brute_lp_max(&a2, &b2, &p.objective));
}

#[test]
fn beale_cycling_example() {
    let a = vec![
        vec![r(1, 4), r(-8, 1), r(-1, 1), r(9, 1)],
        vec![r(1, 2), r(-12, 1), r(-1, 2), r(3, 1)],
        vec![r(0, 1), r(0, 1), r(1, 1), r(0, 1)],
    ];
    let b = ri(&[0, 0, 1]);
    let c = vec![r(3, 4), r(-20, 1), r(1, 2), r(-6, 1)];
    let p = packing(a.clone(), b.clone(), c);
    check_certified(&p, &a, &b);
    assert_eq!(lp::solve_lp(&p, &EXACT).unwrap().objective_value, r(5, 4));
}

#[test]
fn kuhn_cycling_example() {
    let a = vec![
        vec![r(-2, 1), r(-9, 1), r(1, 1), r(9, 1)],
        vec![r(1, 3), r(1, 1), r(-1, 3), r(-2, 1)],
        vec![r(2, 1), r(3, 1), r(-1, 1), r(-12, 1)],
    ];
    let b = ri(&[0, 0, 2]);
    let c = ri(&[2, 3, -1, -12]);
    check_certified(&packing(a.clone(), b.clone(), c), &a, &b);
}

#[test]
fn degenerate_assignment_polytope() {
    // 3x3 assignment with all-equal costs: every basis is heavily degenerate.
    let n = 3;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 0..n {
        let mut row = vec![Rational::from(0); n * n];
        let mut col = vec![Rational::from(0); n * n];
        for j in 0..n {
            row[i * n + j] = Rational::from(1);
            col[j * n + i] = Rational::from(1);
        }
        a.push(row);
        a.push(col);
        b.push(Rational::from(1));
        b.push(Rational::from(1));
    }
    let c = vec![Rational::from(1); n * n];
    let p = packing(a.clone(), b.clone(), c);
    let sol = lp::solve_lp(&p, &EXACT).unwrap();
    assert_eq!(sol.objective_value, Rational::from(3));
    let dual_obj: Rational = b.iter().zip(&sol.duals).map(|(p, q)| p * q).sum();
    assert_eq!(dual_obj, Rational::from(3));
}

#[test]
fn many_redundant_rows_through_one_vertex() {
    // Twelve constraints tight at (1,1): a classic stalling pattern.
    let mut a = Vec::new();
    let mut b = Vec::new();
    for t in 1..=12i64 {
        a.push(vec![Rational::from(t), Rational::from(13 - t)]);
        b.push(Rational::from(13));
    }
    let c = ri(&[1, 1]);
    check_certified(&packing(a.clone(), b.clone(), c), &a, &b);
}

fn random_packing(seed: u64) -> (Vec<Vec<Rational>>, Vec<Rational>, Vec<Rational>) {
    let mut rng = common::rng(seed);
    let k = rng.gen_range(1..=4);
    let m = rng.gen_range(1..=6);
    let a: Vec<Vec<Rational>> = (0..m).map(|_| (0..k).map(|_| Rational::from(rng.gen_range(1i64..=6))).collect()).collect();
    let b: Vec<Rational> = (0..m).map(|_| Rational::from(rng.gen_range(1i64..=9))).collect();
    let c: Vec<Rational> = (0..k).map(|_| Rational::from(rng.gen_range(-3i64..=5))).collect();
    (a, b, c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn optimal_results_are_certified(seed in 0u64..1_000_000) {
        let (a, b, c) = random_packing(seed);
        check_certified(&packing(a.clone(), b.clone(), c), &a, &b);
    }

    #[test]
    fn warm_started_exact_matches_pure_rational(seed in 0u64..1_000_000) {
        let (a, b, c) = random_packing(seed);
        let p = packing(a, b, c);
        let warm = lp::solve_lp(&p, &EXACT).unwrap();
        let pure = lp::solve_lp_rational_only(&p).unwrap();
        prop_assert_eq!(warm.objective_value, pure.objective_value);
    }

    #[test]
    fn float_agrees_with_rational(seed in 0u64..1_000_000) {
        let (a, b, c) = random_packing(seed);
        let p = packing(a, b, c);
        let exact = lp::solve_lp(&p, &EXACT).unwrap().objective_value.to_f64();
        let float = lp::solve_lp(&p, &NumericMode::default_float()).unwrap().objective_value.to_f64();
        prop_assert!((exact - float).abs() <= 1e-6 * (1.0 + exact.abs()), "{exact} vs {float}");
    }
}

#[test]
fn infeasible_and_unbounded_are_reported() {
    let mut p = LpProblem::new(1, ri(&[1]), Direction::Max);
    p.add_row(ri(&[1]), RowSense::Le, Rational::from(-1));
    assert_eq!(lp::solve_lp(&p, &EXACT).unwrap().status, LpStatus::Infeasible);
    let mut q = LpProblem::new(2, ri(&[1, 1]), Direction::Max);
    q.add_row(ri(&[1, -1]), RowSense::Le, Rational::from(1));
    assert_eq!(lp::solve_lp(&q, &EXACT).unwrap().status, LpStatus::Unbounded);
}
