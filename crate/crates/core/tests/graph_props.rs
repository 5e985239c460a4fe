mod support;

use proptest::prelude::*;
use support::*;
use testinj::graph::*;

fn subsets(others: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    (0..1usize << others.len())
        .map(move |mask| others.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect())
}

fn check_dag(n: usize, edges: &[(usize, usize)]) {
    let dag = to_dag(n, edges);
    let m = dag_marks(n, edges);
    for x in 0..n {
        for y in 0..n {
            if x == y {
                continue;
            }
            let others: Vec<usize> = (0..n).filter(|&v| v != x && v != y).collect();
            for z in subsets(&others) {
                let sep = dag.d_separated_idx(x, y, &z);
                assert_eq!(sep, !m_connected(&m, x, y, &z), "{edges:?} {x} {y} {z:?}");
                assert_eq!(sep, dag.d_separated_idx(y, x, &z));
            }
        }
    }
}

#[test]
fn d_separation_exhaustive_up_to_five_nodes() {
    for n in 2..=5 {
        for edges in all_dags(n) {
            check_dag(n, &edges);
        }
    }
}

fn dag6() -> impl Strategy<Value = Vec<(usize, usize)>> {
    (Just((0..6).collect::<Vec<usize>>()).prop_shuffle(), prop::collection::vec(any::<bool>(), 15)).prop_map(|(order, bits)| {
        let mut edges = Vec::new();
        let mut k = 0;
        for i in 0..6 {
            for j in i + 1..6 {
                if bits[k] {
                    edges.push((order[i], order[j]));
                }
                k += 1;
            }
        }
        edges
    })
}

const MARKS: [EndpointMark; 3] = [EndpointMark::Tail, EndpointMark::Arrow, EndpointMark::Circle];

fn mixed_graph() -> impl Strategy<Value = MixedGraph> {
    prop::collection::vec(prop::option::of((0usize..3, 0usize..3)), 10).prop_map(|edges| {
        let mut g = MixedGraph::new(["gender", "age", "x y", "is_testinj", "node"]).unwrap();
        let mut k = 0;
        for a in 0..5 {
            for b in a + 1..5 {
                if let Some((ma, mb)) = edges[k] {
                    g.add_edge(a, b, MARKS[ma], MARKS[mb]);
                }
                k += 1;
            }
        }
        g
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn d_separation_on_six_node_dags(edges in dag6()) {
        check_dag(6, &edges);
    }

    #[test]
    fn dot_round_trip(g in mixed_graph()) {
        prop_assert_eq!(parse_dot(&emit_dot(&g)).unwrap(), g.sorted());
    }

    #[test]
    fn json_round_trip(g in mixed_graph()) {
        prop_assert_eq!(MixedGraph::from_json(&g.to_json()).unwrap(), g);
    }

    #[test]
    fn background_knowledge_is_idempotent(g in mixed_graph()) {
        let bk = BackgroundKnowledge::new(["gender", "age"], ["is_testinj"]).unwrap();
        let once = apply_background_knowledge(&g, &bk).unwrap();
        prop_assert_eq!(apply_background_knowledge(&once, &bk).unwrap(), once.clone());
        let i = once.index("is_testinj").unwrap();
        for v in once.neighbors(i).collect::<Vec<_>>() {
            prop_assert!(once.is_directed(v, i));
        }
    }
}
