mod common;

use maxpareto::model::{self, payoff, MaxParetoInstance};
use maxpareto::Rational;
use proptest::prelude::*;
use rand::Rng;

fn rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=7).prop_map(|(n, d)| Rational::new(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn payoff_is_linear(seed in 0u64..100_000, xs in prop::collection::vec(rational(), 5), ys in prop::collection::vec(rational(), 5)) {
        let mut rng = common::rng(seed);
        let inst = common::random_general_instance(&mut rng, 5, 8, 4);
        let k = inst.k();
        let (x, y) = (&xs[..k], &ys[..k]);
        let sum: Vec<Rational> = x.iter().zip(y).map(|(a, b)| a + b).collect();
        let px = payoff(&inst, x).unwrap().0;
        let py = payoff(&inst, y).unwrap().0;
        let expected: Vec<Rational> = px.iter().zip(&py).map(|(a, b)| a + b).collect();
        prop_assert_eq!(payoff(&inst, &sum).unwrap().0, expected);
    }

    #[test]
    fn file_round_trip(seed in 0u64..100_000) {
        let mut rng = common::rng(seed);
        let mut inst = common::random_general_instance(&mut rng, 4, 7, 3);
        // exercise non-integer entries
        let d = rng.gen_range(2i64..=9);
        inst.b[0] = &inst.b[0] / &Rational::from(d);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.mpj");
        model::save_instance(&inst, &path).unwrap();
        prop_assert_eq!(model::load_instance(&path).unwrap(), inst);
    }
}

#[test]
fn rational_pairs_and_numbers_parse() {
    let text = r#"{"m": 2, "k": 1, "n": 1, "A": [[1], [-1]], "b": [[3, 2], 0], "U": [[0.5]], "c": [1]}"#;
    let inst = MaxParetoInstance::from_json_str(text).unwrap();
    assert_eq!(inst.b[0], Rational::new(3, 2));
    assert_eq!(inst.u[0][0], Rational::new(1, 2));
    let bad = r#"{"m": 2, "k": 1, "n": 1, "A": [[1], [-1]], "b": [[3, 0], 0], "U": [[1]], "c": [1]}"#;
    assert!(MaxParetoInstance::from_json_str(bad).is_err());
    let shape = r#"{"m": 3, "k": 1, "n": 1, "A": [[1], [-1]], "b": [1, 0], "U": [[1]], "c": [1]}"#;
    assert!(MaxParetoInstance::from_json_str(shape).is_err());
}
