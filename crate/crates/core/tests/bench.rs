use std::time::Duration;

use maxpareto::bench::{self, GenSpec, Method, SuiteOptions};

fn csv_bytes(specs: &[GenSpec], workers: usize) -> Vec<u8> {
    let opts = SuiteOptions { time_limit: Duration::from_secs(60), workers, record_time: false, ..SuiteOptions::default() };
    let res = bench::run_suite(specs, &Method::all(), &opts).unwrap();
    let mut out = Vec::new();
    bench::write_csv(&res.rows, &mut out, false).unwrap();
    out
}

#[test]
fn csv_identical_for_any_worker_count() {
    let specs: Vec<GenSpec> = [(4, 1, 3), (4, 2, 4), (6, 1, 5)].iter().map(|&(a, m, s)| GenSpec::new(a, m, s).unwrap()).collect();
    let one = csv_bytes(&specs, 1);
    assert_eq!(one, csv_bytes(&specs, 4));
    assert_eq!(one, csv_bytes(&specs, 1));
    let mut reader = csv::Reader::from_reader(&one[..]);
    let header: Vec<String> = reader.headers().unwrap().iter().map(str::to_string).collect();
    assert_eq!(header.join(","), "agents,items,method,w_cap,lb,ub,ub_valid,status,time_ms,seed");
    assert_eq!(reader.records().count(), specs.len() * Method::all().len());
}

#[test]
fn generated_payoffs_look_uniform() {
    // 5 agents × 5 items × 400 seeds = 10000 draws over 5 values.
    let mut counts = [0f64; 5];
    for seed in 0..400 {
        let g = bench::generate_allocation(&GenSpec::new(5, 1, seed).unwrap());
        for row in g.payoff.iter().chain(&g.welfare) {
            for &p in row {
                counts[(p - 1) as usize] += 1.0;
            }
        }
    }
    let total: f64 = counts.iter().sum();
    let expected = total / 5.0;
    let chi2: f64 = counts.iter().map(|c| (c - expected).powi(2) / expected).sum();
    // 4 degrees of freedom, p = 0.001
    assert!(chi2 < 18.47, "chi-square {chi2} for {counts:?}");
}

#[test]
fn preferences_follow_payoffs() {
    for seed in 0..50 {
        let g = bench::generate_allocation(&GenSpec::new(4, 2, seed).unwrap());
        for (row, prefs) in g.payoff.iter().zip(&g.allocation.preferences) {
            assert_eq!(prefs.len(), row.len());
            for w in prefs.windows(2) {
                let (a, b) = (w[0], w[1]);
                assert!(row[a] > row[b] || (row[a] == row[b] && a < b));
            }
        }
    }
}

#[test]
fn table_marks_best_lower_bound() {
    let spec = GenSpec::new(4, 1, 11).unwrap();
    let opts = SuiteOptions { workers: 1, ..SuiteOptions::default() };
    let res = bench::run_suite(&[spec], &Method::all(), &opts).unwrap();
    let table = bench::format_table(&res.rows);
    assert!(table.contains("*best*"));
    assert_eq!(res.compared_instances, 1);
}

#[test]
fn invalid_specs_are_rejected() {
    assert!(GenSpec::new(4, 3, 0).is_err());
    assert!(GenSpec::new(0, 1, 0).is_err());
    assert!(Method::parse("heuristic:three").is_err());
}
