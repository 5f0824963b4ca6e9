//! Property tests for structural invariants that should hold for arbitrary
//! well-formed inputs, not just the named fixtures.

use proptest::prelude::*;

use cts_core::graph::{cayley_graph, Graph};
use cts_core::group::{product_group, FiniteGroup, GroupElement};
use cts_core::spectra::zigzag_function;
use cts_core::walk::SplitMix64;

fn arb_multigraph() -> impl Strategy<Value = (usize, Vec<(u32, u32)>)> {
    (2usize..12).prop_flat_map(|n| {
        let edge = (0..n as u32, 0..n as u32);
        proptest::collection::vec(edge, 0..40).prop_map(move |edges| (n, edges))
    })
}

proptest! {
    #[test]
    fn edge_list_round_trips((n, edges) in arb_multigraph()) {
        let g = Graph::from_edges(n, &edges).unwrap();
        let text = g.to_edge_list();
        let back = Graph::from_edge_list(&text).unwrap();
        prop_assert_eq!(back.vertex_count(), g.vertex_count());
        for u in 0..n as u32 {
            prop_assert_eq!(back.neighbors(u), g.neighbors(u));
        }
        // symmetry holds after construction
        for u in 0..n as u32 {
            for v in 0..n as u32 {
                if u != v {
                    prop_assert_eq!(g.multiplicity(u, v), g.multiplicity(v, u));
                }
            }
        }
    }

    #[test]
    fn cayley_graphs_are_regular(n in 3usize..40, gens in proptest::collection::vec(1usize..40, 1..6)) {
        let group = FiniteGroup::cyclic(n).unwrap();
        // close the multiset under inverse
        let mut multiset: Vec<GroupElement> = Vec::new();
        for g in gens {
            let e = GroupElement(g % n);
            multiset.push(e);
            multiset.push(group.inv_unchecked(e));
        }
        let cay = cayley_graph(&group, &multiset).unwrap();
        prop_assert_eq!(cay.check_regular().unwrap(), multiset.len());
    }

    #[test]
    fn zigzag_function_is_bounded_and_monotone(
        a in 0.0f64..=1.0,
        b in 0.0f64..=1.0,
        da in 0.0f64..=0.2,
    ) {
        let f = zigzag_function(a, b).unwrap();
        prop_assert!(f >= 0.0);
        prop_assert!(f <= a + b + 1e-12);
        prop_assert!(f <= 1.0 + 1e-12);
        let a2 = (a + da).min(1.0);
        prop_assert!(zigzag_function(a2, b).unwrap() + 1e-12 >= f);
        let b2 = (b + da).min(1.0);
        prop_assert!(zigzag_function(a, b2).unwrap() + 1e-12 >= f);
    }

    #[test]
    fn product_group_axioms_hold(orders in proptest::collection::vec(2usize..6, 1..4), samples in proptest::collection::vec((0usize..1000, 0usize..1000, 0usize..1000), 20)) {
        let factors: Vec<FiniteGroup> = orders.iter().map(|&n| FiniteGroup::cyclic(n).unwrap()).collect();
        let g = product_group(factors).unwrap();
        let e = g.identity();
        let n = g.order();
        for (a, b, c) in samples {
            let (a, b, c) = (GroupElement(a % n), GroupElement(b % n), GroupElement(c % n));
            prop_assert_eq!(g.mul_unchecked(a, e), a);
            prop_assert_eq!(g.mul_unchecked(g.inv_unchecked(a), a), e);
            let ab_c = g.mul_unchecked(g.mul_unchecked(a, b), c);
            let a_bc = g.mul_unchecked(a, g.mul_unchecked(b, c));
            prop_assert_eq!(ab_c, a_bc);
        }
    }

    #[test]
    fn rejection_sampling_is_in_range(seed in any::<u64>(), k in 1u64..100) {
        let mut rng = SplitMix64::new(seed);
        for _ in 0..50 {
            prop_assert!(rng.next_below(k) < k);
        }
    }
}
