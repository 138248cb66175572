//! Property-based invariants over randomly generated small graphs.

use proptest::prelude::*;

use lowdeg::graph::{LabeledGraph, Permutation};
use lowdeg::iso;
use lowdeg::poly;
use lowdeg::trunc::{self, PhiParams};

const HOST: u32 = 8;

fn arb_graph() -> impl Strategy<Value = LabeledGraph> {
    prop::collection::vec((1..=HOST, 1..=HOST), 0..14).prop_map(|pairs| {
        LabeledGraph::from_edges(
            pairs
                .into_iter()
                .filter(|(u, v)| u != v)
                .map(|(u, v)| (u.min(v), u.max(v))),
        )
        .expect("u < v by construction")
    })
}

fn arb_permutation() -> impl Strategy<Value = Permutation> {
    Just((1..=HOST).collect::<Vec<u32>>())
        .prop_shuffle()
        .prop_map(|image| Permutation::from_image(image).expect("shuffle is a bijection"))
}

proptest! {
    #[test]
    fn union_and_intersection_respect_the_count_laws(s in arb_graph(), t in arb_graph()) {
        let u = s.union(&t);
        let i = s.intersection(&t);
        prop_assert!(u.vertex_count() + i.vertex_count() <= s.vertex_count() + t.vertex_count());
        prop_assert_eq!(u.edge_count() + i.edge_count(), s.edge_count() + t.edge_count());
        prop_assert!(i.is_subgraph_of(&s) && i.is_subgraph_of(&t));
        prop_assert!(s.is_subgraph_of(&u) && t.is_subgraph_of(&u));
    }

    #[test]
    fn log_weight_is_submodular(s in arb_graph(), t in arb_graph(), aw in 0.0f64..3.0, bw in -2.0f64..2.0) {
        let pp = PhiParams::with_log_weights(12, 4, aw, bw).unwrap();
        let lhs = trunc::log_phi(&s.union(&t), &pp) + trunc::log_phi(&s.intersection(&t), &pp);
        let rhs = trunc::log_phi(&s, &pp) + trunc::log_phi(&t, &pp);
        prop_assert!(lhs <= rhs + 1e-9);
    }

    #[test]
    fn canonical_form_is_a_relabeling_invariant(s in arb_graph(), pi in arb_permutation()) {
        let relabeled = s.relabel(&pi).unwrap();
        prop_assert_eq!(iso::canonical_form(&s), iso::canonical_form(&relabeled));
        let canon_s = iso::canonical_labeling(&s);
        let canon_r = iso::canonical_labeling(&relabeled);
        prop_assert_eq!(canon_s.edges(), canon_r.edges());
    }

    #[test]
    fn basis_elements_multiply_over_disjoint_edge_sets(
        s in arb_graph(),
        t in arb_graph(),
        x in arb_graph(),
        q in 0.05f64..0.95,
    ) {
        let t = t.difference(&s);
        let product = poly::psi_eval(&s, &x, q) * poly::psi_eval(&t, &x, q);
        let joint = poly::psi_eval(&s.union(&t), &x, q);
        prop_assert!((product - joint).abs() <= 1e-9 * (1.0 + product.abs()));
    }

    #[test]
    fn copy_counts_split_the_falling_factorial(s in arb_graph(), n in 1u64..=9) {
        let c = iso::canonical_form(&s);
        let copies = iso::labeled_copy_count(&c, n);
        let mut falling = num::BigUint::from(1u32);
        for i in 0..c.v_count() as u64 {
            falling *= num::BigUint::from(n.saturating_sub(i));
        }
        prop_assert_eq!(copies * c.aut(), falling);
    }

    #[test]
    fn admissibility_is_closed_under_edge_subgraphs(s in arb_graph(), aw in 0.0f64..2.0, bw in -2.0f64..1.0) {
        let pp = PhiParams::with_log_weights(12, 4, aw, bw).unwrap();
        if s.edge_count() <= 10 && trunc::is_admissible(&s, &pp).unwrap() {
            let edges = s.edges();
            for mask in 0u64..(1 << edges.len()) {
                let sub = LabeledGraph::from_edges(
                    edges
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, &e)| e),
                )
                .unwrap();
                prop_assert!(trunc::is_admissible(&sub, &pp).unwrap());
            }
        }
    }
}
