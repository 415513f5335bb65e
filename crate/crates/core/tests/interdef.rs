use std::sync::Arc;

use invariant_entropy::entropy::FiniteMeasure;
use invariant_entropy::interdef::{
    entropy_preserved, pushforward, FunctionElimination, Interdefinition, RedundancyElimination,
};
use invariant_entropy::types::{FiniteStructure, RedundantStructure, Signature, Symbol};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn mixed() -> Arc<Signature> {
    Arc::new(Signature::new(vec![Symbol::new("R", 2), Symbol::new("P", 1)], vec![Symbol::new("f", 2), Symbol::new("g", 3)]).unwrap())
}

fn relational() -> Arc<Signature> {
    Arc::new(Signature::relational(&[("R", 3), ("S", 2)]).unwrap())
}

/// A structure over `mixed()` whose functions are selectors picked by `choice`.
fn selector_structure(n: usize, tuples: &[(usize, usize)], choice: &[u8]) -> FiniteStructure {
    let mut m = FiniteStructure::empty(mixed(), n).unwrap();
    for &(a, b) in tuples {
        if a % n != b % n {
            m.insert(0, vec![a % n, b % n]).unwrap();
        }
        m.insert(1, vec![a % n]).unwrap();
    }
    let mut c = choice.iter().cycle();
    for (f, arity) in [(0, 2usize), (1, 3)] {
        for idx in 0..n.pow(arity as u32) {
            let args: Vec<usize> = (0..arity).rev().map(|p| idx / n.pow(p as u32) % n).collect();
            let pick = *c.next().unwrap() as usize % arity;
            m.set_function(f, &args, args[pick]).unwrap();
        }
    }
    m
}

fn redundant_structure(n: usize, tuples: &[(usize, usize, usize)]) -> RedundantStructure {
    let mut m = RedundantStructure::empty(relational(), n).unwrap();
    for (i, &(a, b, c)) in tuples.iter().enumerate() {
        if i % 2 == 0 {
            m.insert(0, vec![a % n, b % n, c % n]).unwrap();
        } else {
            m.insert(1, vec![a % n, c % n]).unwrap();
        }
    }
    m
}

fn masses(weights: &[u32]) -> Vec<BigRational> {
    let total: u32 = weights.iter().sum();
    weights.iter().map(|&w| BigRational::new(BigInt::from(w), BigInt::from(total))).collect()
}

#[test]
fn arities_are_kept() {
    let f = FunctionElimination::new(mixed()).unwrap();
    assert_eq!(f.target().max_arity(), 3);
    assert_eq!(f.target().relations().len(), 2 + 2 + 3);
    let r = RedundancyElimination::new(relational()).unwrap();
    assert_eq!(r.target().max_arity(), 3);
    assert_eq!(r.target().relations().len(), 5 + 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn function_elimination_round_trips(
        n in 1usize..=4,
        tuples in proptest::collection::vec((0usize..4, 0usize..4), 0..10),
        choice in proptest::collection::vec(any::<u8>(), 1..20),
    ) {
        let m = selector_structure(n, &tuples, &choice);
        let e = FunctionElimination::new(mixed()).unwrap();
        let out = e.forward(&m).unwrap();
        prop_assert_eq!(e.backward(&out).unwrap(), m);
        prop_assert_eq!(e.forward(&e.backward(&out).unwrap()).unwrap(), out);
    }

    #[test]
    fn redundancy_elimination_round_trips(
        n in 1usize..=6,
        tuples in proptest::collection::vec((0usize..6, 0usize..6, 0usize..6), 0..20),
    ) {
        let m = redundant_structure(n, &tuples);
        let e = RedundancyElimination::new(relational()).unwrap();
        let out = e.forward(&m).unwrap();
        prop_assert!(out.is_non_redundant());
        prop_assert_eq!(e.backward(&out).unwrap(), m);
        prop_assert_eq!(e.forward(&e.backward(&out).unwrap()).unwrap(), out);
    }

    #[test]
    fn measures_keep_their_entropy(
        n in 1usize..=4,
        atoms in proptest::collection::vec((proptest::collection::vec((0usize..4, 0usize..4, 0usize..4), 0..8), 1u32..10), 1..6),
    ) {
        let e = RedundancyElimination::new(relational()).unwrap();
        let ws: Vec<u32> = atoms.iter().map(|a| a.1).collect();
        let mu = FiniteMeasure::new(atoms.iter().zip(masses(&ws)).map(|((t, _), p)| (redundant_structure(n, t), p))).unwrap();
        prop_assert!(entropy_preserved(&mu, &e).unwrap());
        prop_assert!((pushforward(&mu, &e).unwrap().entropy_bits() - mu.entropy_bits()).abs() < 1e-12);
    }
}

#[test]
fn outside_the_source_class() {
    let sig = Arc::new(Signature::new(vec![], vec![Symbol::new("f", 1)]).unwrap());
    let mut m = FiniteStructure::empty(sig.clone(), 2).unwrap();
    m.set_function(0, &[0], 1).unwrap();
    let mu = FiniteMeasure::point(m);
    let e = FunctionElimination::new(sig).unwrap();
    assert!(matches!(pushforward(&mu, &e), Err(invariant_entropy::Error::InvalidMeasure(_))));
}
