use ergm_core::oracle::{
    naive_count_at_edge, naive_count_at_edge_pair, naive_count_global, naive_count_induced, naive_hamiltonian,
};
use ergm_core::pattern::all_graphs_on;
use ergm_core::{
    all_edges, complete_graph_count, complete_graph_count_at_edge, count_at_edge, count_at_edge_pair,
    count_global, count_induced_global, hamiltonian, EdgeId, GraphState, ModelSpec, SubgraphPattern,
};
use proptest::prelude::*;

/// Every labeled pattern on 2..=4 vertices with at least one edge.
fn small_patterns() -> Vec<SubgraphPattern> {
    let mut out = Vec::new();
    for l in 2..=4 {
        for g in all_graphs_on(l).unwrap() {
            if g.edge_count() > 0 {
                out.push(g);
            }
        }
    }
    out
}

fn arb_case() -> impl Strategy<Value = (GraphState, usize, usize, usize)> {
    (4usize..=8, 0.05f64..0.95, any::<u64>(), any::<usize>(), any::<usize>(), any::<usize>()).prop_map(
        |(n, p, seed, gi, ei, fi)| {
            let x = GraphState::erdos_renyi(n, p, &mut ergm_core::seeded_rng(seed));
            (x, gi, ei, fi)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn optimized_counts_match_enumeration((x, gi, ei, fi) in arb_case()) {
        let patterns = small_patterns();
        let g = &patterns[gi % patterns.len()];
        let n = x.n();
        let pairs = n * (n - 1) / 2;
        let e = EdgeId::from_index(n, ei % pairs).unwrap();
        let mut f = EdgeId::from_index(n, fi % pairs).unwrap();
        if f == e {
            f = EdgeId::from_index(n, (fi + 1) % pairs).unwrap();
        }
        prop_assert_eq!(count_global(&x, g).unwrap(), naive_count_global(&x, g).unwrap());
        prop_assert_eq!(count_induced_global(&x, g).unwrap(), naive_count_induced(&x, g).unwrap());
        prop_assert_eq!(count_at_edge(&x, g, e).unwrap(), naive_count_at_edge(&x, g, e).unwrap());
        prop_assert_eq!(
            count_at_edge_pair(&x, g, e, f).unwrap(),
            naive_count_at_edge_pair(&x, g, e, f).unwrap()
        );
    }

    #[test]
    fn per_edge_count_is_the_global_jump((x, gi, ei, _f) in arb_case()) {
        let patterns = small_patterns();
        let g = &patterns[gi % patterns.len()];
        let n = x.n();
        let e = EdgeId::from_index(n, ei % (n * (n - 1) / 2)).unwrap();
        let up = count_global(&x.with_edge(e), g).unwrap();
        let down = count_global(&x.without_edge(e), g).unwrap();
        prop_assert_eq!(count_at_edge(&x, g, e).unwrap(), up - down);
    }

    #[test]
    fn edge_sum_identity((x, gi, ei, _f) in arb_case()) {
        let patterns = [SubgraphPattern::triangle(), SubgraphPattern::two_star(), SubgraphPattern::cycle(4).unwrap()];
        let g = &patterns[gi % patterns.len()];
        let n = x.n();
        let e = EdgeId::from_index(n, ei % (n * (n - 1) / 2)).unwrap();
        let lhs: u64 = all_edges(n)
            .into_iter()
            .filter(|&f| f != e)
            .map(|f| count_at_edge_pair(&x, g, e, f).unwrap())
            .sum();
        let rhs: u64 = (0..g.edge_count())
            .map(|a| count_at_edge(&x, &g.without_edge(a).unwrap(), e).unwrap())
            .sum();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn hamiltonian_matches_naive((x, _g, _e, _f) in arb_case(), b1 in -2.0f64..2.0, b2 in 0.0f64..2.0, b3 in 0.0f64..2.0) {
        let m = ModelSpec::new(
            vec![SubgraphPattern::edge(), SubgraphPattern::triangle(), SubgraphPattern::two_star()],
            vec![b1, b2, b3],
        ).unwrap();
        let fast = hamiltonian(&x, &m).unwrap();
        let slow = naive_hamiltonian(&x, &m).unwrap();
        prop_assert!((fast - slow).abs() <= 1e-12 * slow.abs().max(1.0));
    }
}

#[test]
fn closed_forms_match_enumeration() {
    for g in small_patterns() {
        for n in 4..=7 {
            let k = GraphState::complete(n);
            assert_eq!(complete_graph_count(n, &g).unwrap(), naive_count_global(&k, &g).unwrap());
            for e in all_edges(n) {
                assert_eq!(
                    complete_graph_count_at_edge(n, &g).unwrap(),
                    naive_count_at_edge(&k, &g, e).unwrap(),
                    "{} n={n}",
                    g.name()
                );
            }
        }
    }
}

#[test]
fn reference_values() {
    let k5 = GraphState::complete(5);
    assert_eq!(naive_count_global(&k5, &SubgraphPattern::triangle()).unwrap(), 60);
    let k4 = GraphState::complete(4);
    let e = EdgeId::new(4, 1, 2).unwrap();
    assert_eq!(count_at_edge(&k4, &SubgraphPattern::two_star(), e).unwrap(), 8);
    assert_eq!(count_at_edge(&k4, &SubgraphPattern::triangle(), e).unwrap(), 12);
}
