use std::sync::Arc;

use invariant_entropy::hypergraphon::{
    hypergraphon_from_json, hypergraphon_to_json, make_er, make_half_half, make_triangle, random_coherent,
};
use invariant_entropy::sampler::{sample, sample_restriction_consistency, sample_types};
use invariant_entropy::types::{Signature, TypeSpace};
use proptest::prelude::*;

fn space(k: usize) -> TypeSpace {
    TypeSpace::new(Arc::new(Signature::hypergraph(k)), k).unwrap()
}

#[test]
fn examples_are_coherent() {
    let er = make_er(Arc::new(Signature::hypergraph(2)), 2).unwrap();
    assert!(er.validate().is_empty());
    assert_eq!(er.integral_entropy(), 1.0);
    let tri = make_triangle().unwrap();
    assert!(tri.validate().is_empty());
    assert!(!tri.induces_borel());
    assert_eq!(tri.integral_entropy(), 0.0);
    let hh = make_half_half(Arc::new(Signature::hypergraph(2)), 2).unwrap();
    assert!(!hh.induces_borel());
}

#[test]
fn json_round_trip() {
    let tri = make_triangle().unwrap();
    let back = hypergraphon_from_json(&hypergraphon_to_json(&tri)).unwrap();
    assert_eq!(back.table(), tri.table());
    assert!(back.is_coherent());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_tables_are_coherent(k in 1usize..=3, m in 1usize..=3, orbits in 1usize..=3, seed in any::<u64>()) {
        let s = space(k);
        let w = random_coherent(&s, m, orbits, seed).unwrap();
        prop_assert!(w.validate().is_empty());
        for idx in 0..w.table().len().min(200) {
            let cells = w.cells_of(idx);
            for r in 0..s.permutations().len() {
                let moved = w.act_on_cells(r, &cells);
                prop_assert_eq!(
                    w.evaluate(&moved).unwrap(),
                    &w.evaluate(&cells).unwrap().act_by_rank(&s, r)
                );
            }
        }
    }

    #[test]
    fn samples_are_projective(m in 1usize..=3, seed in any::<u64>(), n in 3usize..8) {
        let w = random_coherent(&space(2), m, 2, seed).unwrap();
        prop_assert!(sample_restriction_consistency(&w, n, seed ^ 1).unwrap());
        prop_assert_eq!(sample_types(&w, n, seed).unwrap(), sample_types(&w, n, seed).unwrap());
        prop_assert!(sample(&w, n, seed).unwrap().is_non_redundant());
    }
}
