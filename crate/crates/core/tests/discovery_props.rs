mod support;

use std::collections::HashMap;

use support::*;
use testinj::discovery::*;
use testinj::experiment::{paper_scenario_generator, sample, scenario_knowledge};
use testinj::graph::{BackgroundKnowledge, EndpointMark};

#[test]
fn fci_without_latents_matches_pag_oracle_and_pc_skeleton() {
    let oracle = PagOracle::new(4);
    let cfg = DiscoveryConfig::default();
    let none = BackgroundKnowledge::default();
    for edges in all_dags(4) {
        let src = DSepOracle::new(to_dag(4, &edges));
        let f = fci(&src, &cfg, &none).unwrap().graph;
        let p = pc(&src, &cfg, &none).unwrap().graph;
        assert_eq!(f, oracle.pag_of_dag(4, &edges), "DAG {edges:?}");
        assert_eq!(f.adjacencies(), p.adjacencies(), "DAG {edges:?}");
    }
}

fn scenario(seed: u64, n: usize) -> testinj::BinaryDataset {
    sample(&paper_scenario_generator(seed), n, seed).unwrap()
}

#[test]
fn runs_are_deterministic() {
    let data = scenario(3, 4000);
    let bk = scenario_knowledge(&data);
    for algorithm in [Algorithm::Pc, Algorithm::Fci] {
        let cfg = DiscoveryConfig::new(algorithm, 0.05).unwrap();
        let a = run(&data, &cfg, &bk).unwrap();
        let b = run(&data, &cfg, &bk).unwrap();
        assert_eq!(a.graph, b.graph);
        assert_eq!(a.sepsets, b.sepsets);
        assert_eq!(a.trace, b.trace);
        assert_eq!(serde_json::to_string(&a.report).unwrap(), serde_json::to_string(&b.report).unwrap());
    }
}

#[test]
fn raising_alpha_never_turns_a_rejection_into_acceptance() {
    let data = scenario(4, 3000);
    let none = BackgroundKnowledge::default();
    let alphas = [0.001, 0.01, 0.05, 0.2, 0.5];
    let traces: Vec<HashMap<(String, String, Vec<String>), TestOutcome>> = alphas
        .iter()
        .map(|&a| {
            let cfg = DiscoveryConfig::new(Algorithm::Fci, a).unwrap();
            run(&data, &cfg, &none).unwrap().trace.into_iter().map(|t| ((t.x, t.y, t.z), t.outcome)).collect()
        })
        .collect();
    for w in traces.windows(2) {
        for (key, lo) in &w[0] {
            if let Some(hi) = w[1].get(key) {
                assert_eq!(lo.p_value, hi.p_value);
                assert!(lo.independent || !hi.independent, "{key:?}");
            }
        }
    }
    // The skeleton's first level is identical across α, so rejections there
    // are nested.
    let level0 = |i: usize| -> Vec<bool> {
        let mut v: Vec<_> = traces[i].iter().filter(|(k, _)| k.2.is_empty()).map(|(k, o)| (k.clone(), o.independent)).collect();
        v.sort();
        v.into_iter().map(|(_, ind)| ind).collect()
    };
    for i in 1..alphas.len() {
        for (a, b) in level0(i - 1).iter().zip(level0(i)) {
            assert!(!(!a && b));
        }
    }
}

#[test]
fn background_knowledge_holds_in_output() {
    for seed in 1..=3 {
        let data = scenario(seed, 5000);
        let bk = BackgroundKnowledge::new(["race", "gender", "age"], ["is_testinj"]).unwrap();
        for algorithm in [Algorithm::Pc, Algorithm::Fci] {
            let cfg = DiscoveryConfig::new(algorithm, 0.2).unwrap();
            let g = run(&data, &cfg, &bk).unwrap().graph;
            let leaf = g.index("is_testinj").unwrap();
            for v in g.neighbors(leaf).collect::<Vec<_>>() {
                assert!(g.is_directed(v, leaf));
            }
            for root in ["race", "gender", "age"] {
                let r = g.index(root).unwrap();
                for v in g.neighbors(r).collect::<Vec<_>>() {
                    if !bk.roots.contains(g.name(v)) {
                        assert_eq!(g.mark(v, r), Some(EndpointMark::Tail), "{root}-{}", g.name(v));
                    }
                }
            }
        }
    }
}

#[test]
fn unknown_background_node_is_rejected() {
    let data = scenario(1, 200);
    let bk = BackgroundKnowledge::new(["nope"], Vec::<String>::new()).unwrap();
    assert!(run(&data, &DiscoveryConfig::default(), &bk).is_err());
}

#[test]
fn trace_csv_has_header_and_rows() {
    let data = scenario(2, 500);
    let r = run(&data, &DiscoveryConfig::default(), &BackgroundKnowledge::default()).unwrap();
    let mut buf = Vec::new();
    write_trace_csv(&r.trace, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("x,y,Z,statistic,dof,p,independent\n"));
    assert_eq!(text.lines().count(), r.trace.len() + 1);
    assert_eq!(r.report.tests_performed, r.trace.len());
    assert!(r.report.wall_time_ms.is_none());
}
