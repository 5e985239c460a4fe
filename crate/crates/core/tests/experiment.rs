use testinj::citest::ci_test;
use testinj::discovery::{run, Algorithm, DiscoveryConfig};
use testinj::experiment::*;
use testinj::BinaryDataset;

fn coins(columns: &[&str], n: usize, seed: u64) -> BinaryDataset {
    let mut scm = SyntheticScm::new(seed);
    for c in columns {
        scm.add_node(c, &[], vec![0.5]).unwrap();
    }
    sample(&scm, n, seed).unwrap()
}

#[test]
fn independent_coins_are_uncorrelated() {
    let d = coins(&["a", "b"], 10_000, 21);
    let (a, b) = (d.column(0), d.column(1));
    let mean = |v: &[u8]| v.iter().map(|&x| x as f64).sum::<f64>() / v.len() as f64;
    let (ma, mb) = (mean(a), mean(b));
    let cov: f64 = a.iter().zip(b).map(|(&x, &y)| (x as f64 - ma) * (y as f64 - mb)).sum::<f64>() / a.len() as f64;
    let rho = cov / (ma * (1.0 - ma) * mb * (1.0 - mb)).sqrt();
    assert!(rho.abs() < 0.05, "rho = {rho}");
}

// Among mutually independent coins a feature is connected at α roughly when
// one of its three marginal tests rejects, so the rate is bounded by 3α.
#[test]
fn independent_coins_rarely_connect() {
    let grid = [0.01, 0.05, 0.2];
    let mut hits = [0usize; 3];
    let seeds = 200;
    for seed in 0..seeds {
        let d = coins(&["race", "gender", "age", "is_testinj"], 2000, seed);
        let r = alpha_sweep(&d, &grid, &DiscoveryConfig::default(), &scenario_knowledge(&d), &SCENARIO_DEMOGRAPHICS)
            .unwrap();
        for (i, p) in r.points.iter().enumerate() {
            hits[i] += p.connected.values().filter(|&&c| c).count();
        }
    }
    for (i, a) in grid.iter().enumerate() {
        let rate = hits[i] as f64 / (3 * seeds) as f64;
        assert!(rate <= 3.0 * a + 0.03, "α = {a}: rate {rate}");
    }
    assert!(hits[0] < hits[2]);
}

#[test]
fn doubling_scales_every_statistic_exactly() {
    let d = sample(&paper_scenario_generator(5), 3000, 5).unwrap();
    let dd = double_data(&d);
    assert_eq!(dd.n_rows(), 6000);
    for c in 0..d.n_columns() {
        let ones = |ds: &BinaryDataset| ds.column(c).iter().filter(|&&v| v == 1).count();
        assert_eq!(ones(&dd), 2 * ones(&d));
    }
    let names: Vec<&str> = d.names().iter().map(String::as_str).collect();
    for (i, x) in names.iter().enumerate() {
        for y in &names[i + 1..] {
            let z: Vec<&str> = names.iter().filter(|n| *n != x && *n != y).take(2).copied().collect();
            let a = ci_test(&d, x, y, &z, 0.05).unwrap();
            let b = ci_test(&dd, x, y, &z, 0.05).unwrap();
            assert!((b.statistic - 2.0 * a.statistic).abs() <= 1e-9 * a.statistic.max(1.0));
            assert!(b.p_value <= a.p_value);
        }
    }
}

#[test]
fn singleton_sweep_equals_direct_run() {
    let d = sample(&paper_scenario_generator(6), 5000, 6).unwrap();
    let bk = scenario_knowledge(&d);
    let cfg = DiscoveryConfig::new(Algorithm::Fci, 0.05).unwrap();
    let sweep = alpha_sweep(&d, &[0.05], &cfg, &bk, &SCENARIO_DEMOGRAPHICS).unwrap();
    let direct = run(&d, &cfg, &bk).unwrap().graph;
    assert_eq!(sweep.points[0].graph, direct.to_json());
}

#[test]
fn scenario_recovers_strong_edges() {
    let d = sample(&paper_scenario_generator(1), 50_000, 1).unwrap();
    let bk = scenario_knowledge(&d);
    let g = run(&d, &DiscoveryConfig::new(Algorithm::Fci, 0.05).unwrap(), &bk).unwrap().graph;
    for (a, b) in [("race", "stigmatizing"), ("gender", "judgementals"), ("judgementals", "is_testinj")] {
        assert!(g.adjacent_by_name(a, b).unwrap(), "{a}-{b}");
    }
}

#[test]
fn coarse_scenario_has_only_the_merged_demographic() {
    let d = sample(&paper_scenario_generator(2), 20_000, 2).unwrap();
    let c = coarsen(&d, &SCENARIO_DEMOGRAPHICS).unwrap();
    let bk = scenario_knowledge(&c);
    assert!(bk.roots.contains("is_marginalized"));
    let g = run(&c, &DiscoveryConfig::default(), &bk).unwrap().graph;
    assert!(SCENARIO_DEMOGRAPHICS.iter().all(|f| g.index(f).is_err()));
    assert!(g.degree(g.index("is_marginalized").unwrap()) > 0);
}
