use std::sync::Arc;

use invariant_entropy::types::subsets::{
    compose, image, inverse, is_permutation, lex_rank, permutation_rank, permutations, restricted_growth_strings,
    shortlex_cmp, subsets_of_size,
};
use invariant_entropy::types::{shortlex, tau, FiniteStructure, Signature, SubsetIndex, TypeSpace};
use num_integer::binomial;
use proptest::prelude::*;

fn perm(k: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..k).collect::<Vec<usize>>()).prop_shuffle()
}

#[test]
fn shortlex_counts() {
    for n in 0..7 {
        for k in 0..=n.min(4) {
            let (below, exactly, up_to) = shortlex(n, k);
            let expect: u64 = (0..k).map(|r| binomial(n as u64, r as u64)).sum();
            assert_eq!(below.len() as u64, expect);
            assert_eq!(exactly.len() as u64, binomial(n as u64, k as u64));
            assert_eq!(up_to.len(), below.len() + exactly.len());
            assert!(up_to.windows(2).all(|w| shortlex_cmp(&w[0], &w[1]).is_lt()));
        }
    }
}

#[test]
fn bell_and_factorials() {
    let bell: Vec<usize> = (1..=6).map(|k| restricted_growth_strings(k).len()).collect();
    assert_eq!(bell, vec![1, 2, 5, 15, 52, 203]);
    for k in 1..=5 {
        let ps = permutations(k);
        assert_eq!(ps.len(), (1..=k).product::<usize>());
        for (r, p) in ps.iter().enumerate() {
            assert_eq!(permutation_rank(p), r);
        }
    }
}

#[test]
fn five_choose_two_shortlex_positions() {
    let idx = SubsetIndex::new(5, 2);
    assert_eq!(idx.position(&[]), Some(0));
    assert_eq!(idx.position(&[4]), Some(5));
    assert_eq!(idx.position(&[0, 1]), Some(6));
    assert_eq!(idx.position(&[3, 4]), Some(15));
}

proptest! {
    #[test]
    fn lex_rank_is_a_bijection(n in 1usize..9, r in 0usize..4) {
        let r = r.min(n);
        for (i, s) in subsets_of_size(n, r).iter().enumerate() {
            prop_assert_eq!(lex_rank(n, s), i);
        }
    }

    #[test]
    fn permutation_group_laws(a in perm(5), b in perm(5)) {
        prop_assert!(is_permutation(&compose(&a, &b)));
        let id: Vec<usize> = (0..5).collect();
        prop_assert_eq!(compose(&a, &inverse(&a)), id.clone());
        prop_assert_eq!(compose(&inverse(&b), &b), id);
        prop_assert_eq!(inverse(&compose(&a, &b)), compose(&inverse(&b), &inverse(&a)));
    }

    #[test]
    fn tau_sorts(set in proptest::collection::btree_set(0usize..20, 1..5)) {
        let mut v: Vec<usize> = set.iter().copied().collect();
        v.reverse();
        let t = tau(&v).unwrap();
        prop_assert_eq!(t, set.into_iter().collect::<Vec<_>>());
    }

    #[test]
    fn type_action_is_a_left_action(a in perm(3), b in perm(3), t in 0u64..64) {
        let space = TypeSpace::new(Arc::new(Signature::hypergraph(3)), 3).unwrap();
        let t = invariant_entropy::types::QfType::from_index(t);
        let ab = space.act(&compose(&a, &b), t).unwrap();
        let a_b = space.act(&a, space.act(&b, t).unwrap()).unwrap();
        prop_assert_eq!(ab, a_b);
    }

    /// Relabelling a structure moves the type of `J` to the type of `σ(J)`,
    /// re-indexed by how `σ` reorders the elements of `J`.
    #[test]
    fn qf_types_follow_the_logic_action(
        sigma in perm(5),
        edges in proptest::collection::btree_set((0usize..5, 0usize..5), 0..15),
        set in proptest::collection::btree_set(0usize..5, 2..=2),
    ) {
        let sig = Arc::new(Signature::hypergraph(2));
        let space = TypeSpace::new(sig.clone(), 2).unwrap();
        let mut m = FiniteStructure::empty(sig, 5).unwrap();
        for (a, b) in edges {
            if a != b {
                m.insert(0, vec![a, b]).unwrap();
            }
        }
        let j: Vec<usize> = set.into_iter().collect();
        let moved = m.logic_act(&sigma).unwrap();
        let j2 = image(&sigma, &j);
        let pi: Vec<usize> = j.iter().map(|&x| j2.iter().position(|&y| y == sigma[x]).unwrap()).collect();
        let before = m.qf_type_of(&space, &j).unwrap();
        prop_assert_eq!(moved.qf_type_of(&space, &j2).unwrap(), space.act(&pi, before).unwrap());
        prop_assert_eq!(moved.logic_act(&inverse(&sigma)).unwrap(), m);
    }

    #[test]
    fn type_vectors_round_trip(edges in proptest::collection::btree_set((0usize..4, 0usize..4, 0usize..4), 0..30)) {
        let sig = Arc::new(Signature::relational(&[("R", 3), ("S", 3)]).unwrap());
        let space = TypeSpace::new(sig.clone(), 3).unwrap();
        let mut m = FiniteStructure::empty(sig, 4).unwrap();
        for (i, (a, b, c)) in edges.into_iter().enumerate() {
            if a != b && b != c && a != c {
                m.insert(i % 2, vec![a, b, c]).unwrap();
            }
        }
        let v = m.type_vector(&space).unwrap();
        prop_assert_eq!(FiniteStructure::from_type_vector(&space, 4, &v).unwrap(), m);
    }
}
