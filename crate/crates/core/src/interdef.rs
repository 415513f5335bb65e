//! Quantifier-free interdefinitions at the level of finite structures.
//!
//! [`FunctionElimination`] replaces each `a`-ary selector function `f` by
//! relations `f#0, …, f#(a-1)`, where `f#i(x̄)` says that `f(x̄) = x_i` and `i`
//! is the least such index. [`RedundancyElimination`] splits each relation
//! `R` by the equality pattern of its tuples: for an equivalence relation `E`
//! on the argument places, `R#e` (with `e` the restricted growth string of
//! `E`) holds of the distinct entries of every `R`-tuple with pattern `E`.
//!
//! Both maps are bijections between their source and target classes, so
//! they carry finitely supported measures to measures of equal entropy.

use std::sync::Arc;

use num_rational::BigRational;

use crate::entropy::FiniteMeasure;
use crate::error::{invalid, Error, Result};
use crate::types::subsets::restricted_growth_strings;
use crate::types::{index_tuple, tuple_index, FiniteStructure, RedundantStructure, Signature, Symbol};

/// A partition of `[k]`, stored as its restricted growth string: entry `i`
/// is the class of `i`, classes numbered by first appearance.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EquivalenceRelation {
    classes: Vec<usize>,
}

impl EquivalenceRelation {
    pub fn from_rgs(classes: Vec<usize>) -> Result<Self> {
        let mut next = 0;
        for &c in &classes {
            if c > next {
                return invalid(format!("{classes:?} is not a restricted growth string"));
            }
            if c == next {
                next += 1;
            }
        }
        Ok(EquivalenceRelation { classes })
    }

    /// The equality pattern of a tuple.
    pub fn of_tuple(tuple: &[usize]) -> Self {
        let mut seen: Vec<usize> = Vec::new();
        let classes = tuple
            .iter()
            .map(|x| match seen.iter().position(|y| y == x) {
                Some(c) => c,
                None => {
                    seen.push(*x);
                    seen.len() - 1
                }
            })
            .collect();
        EquivalenceRelation { classes }
    }

    pub fn k(&self) -> usize {
        self.classes.len()
    }

    pub fn rgs(&self) -> &[usize] {
        &self.classes
    }

    pub fn class_count(&self) -> usize {
        self.classes.iter().max().map_or(0, |&c| c + 1)
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.class_count()];
        for (i, &c) in self.classes.iter().enumerate() {
            blocks[c].push(i);
        }
        blocks
    }

    /// The least element of the class of `i`.
    pub fn least(&self, i: usize) -> usize {
        self.classes.iter().position(|&c| c == self.classes[i]).expect("i is in its own class")
    }

    /// Least elements of the classes in increasing order.
    pub fn representatives(&self) -> Vec<usize> {
        self.blocks().iter().map(|b| b[0]).collect()
    }

    /// The `k`-tuple with the pattern of `self` built from distinct entries.
    pub fn expand(&self, distinct: &[usize]) -> Vec<usize> {
        self.classes.iter().map(|&c| distinct[c]).collect()
    }

    /// Distinct entries of a tuple in order of first appearance.
    pub fn collapse(tuple: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for &x in tuple {
            if !out.contains(&x) {
                out.push(x);
            }
        }
        out
    }

    fn suffix(&self) -> String {
        self.classes.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
    }
}

/// All partitions of `[k]` in lexicographic order of restricted growth
/// strings; there are Bell(k) of them.
pub fn enumerate_eq_rels(k: usize) -> Result<Vec<EquivalenceRelation>> {
    if k == 0 {
        return invalid("k must be positive");
    }
    Ok(restricted_growth_strings(k)
        .into_iter()
        .map(|classes| EquivalenceRelation { classes })
        .collect())
}

/// Forward and backward structure maps of an interdefinition.
pub trait Interdefinition {
    type Source: Ord + Clone;
    type Target: Ord + Clone;
    fn source(&self) -> &Arc<Signature>;
    fn target(&self) -> &Arc<Signature>;
    fn forward(&self, m: &Self::Source) -> Result<Self::Target>;
    fn backward(&self, m: &Self::Target) -> Result<Self::Source>;
}

fn split_name(name: &str) -> Option<(&str, &str)> {
    name.rsplit_once('#')
}

fn check_signature(expected: &Signature, got: &Signature) -> Result<()> {
    if expected != got {
        return invalid("structure signature does not match the interdefinition");
    }
    Ok(())
}

/// Selector functions to relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionElimination {
    source: Arc<Signature>,
    target: Arc<Signature>,
}

impl FunctionElimination {
    pub fn new(source: Arc<Signature>) -> Result<Self> {
        if let Some(c) = source.functions().iter().find(|f| f.arity == 0) {
            return Err(Error::PreconditionViolation(format!(
                "`{}` is a constant, and no constant is a selector",
                c.name
            )));
        }
        let mut relations = source.relations().to_vec();
        for f in source.functions() {
            relations.extend((0..f.arity).map(|i| Symbol::new(format!("{}#{i}", f.name), f.arity)));
        }
        let target = Arc::new(Signature::new(relations, Vec::new())?);
        let built = FunctionElimination { source, target };
        if FunctionElimination::recover_source(&built.target).ok().as_ref() != Some(&*built.source) {
            return invalid("symbol names are ambiguous after adding `#i` suffixes");
        }
        Ok(built)
    }

    /// Rebuilds the elimination from its target signature: every relation
    /// named `f#i` with an integer `i` belongs to a function `f`.
    pub fn from_target(target: &Signature) -> Result<Self> {
        FunctionElimination::new(Arc::new(FunctionElimination::recover_source(target)?))
    }

    fn recover_source(target: &Signature) -> Result<Signature> {
        let mut relations = Vec::new();
        let mut functions: Vec<(String, usize, usize)> = Vec::new();
        for r in target.relations() {
            match split_name(&r.name).and_then(|(base, i)| Some((base, i.parse::<usize>().ok()?))) {
                Some((base, i)) => match functions.iter_mut().find(|(b, _, _)| b == base) {
                    Some((_, arity, count)) if *arity == r.arity && *count == i => *count += 1,
                    Some(_) => return Err(Error::Format(format!("relation `{}` is out of place", r.name))),
                    None if i == 0 => functions.push((base.to_string(), r.arity, 1)),
                    None => return Err(Error::Format(format!("relation `{}` is out of place", r.name))),
                },
                None => relations.push(r.clone()),
            }
        }
        if let Some((f, a, c)) = functions.iter().find(|(_, a, c)| a != c) {
            return Err(Error::Format(format!("function `{f}` of arity {a} has {c} relations")));
        }
        Signature::new(relations, functions.into_iter().map(|(f, a, _)| Symbol::new(f, a)).collect())
    }
}

impl Interdefinition for FunctionElimination {
    type Source = FiniteStructure;
    type Target = RedundantStructure;

    fn source(&self) -> &Arc<Signature> {
        &self.source
    }

    fn target(&self) -> &Arc<Signature> {
        &self.target
    }

    /// Fails with a precondition violation if some function is not a
    /// selector, naming the witness tuple.
    fn forward(&self, m: &FiniteStructure) -> Result<RedundantStructure> {
        check_signature(&self.source, m.signature())?;
        let n = m.n();
        let mut out = RedundantStructure::empty(self.target.clone(), n)?;
        for r in 0..self.source.relations().len() {
            for t in m.relation(r) {
                out.insert(r, t.clone())?;
            }
        }
        let mut next = self.source.relations().len();
        for (f, sym) in self.source.functions().iter().enumerate() {
            for (idx, &value) in m.function_table(f).iter().enumerate() {
                let args = index_tuple(idx, n, sym.arity);
                let i = args.iter().position(|&x| x == value).ok_or_else(|| {
                    Error::PreconditionViolation(format!(
                        "`{}` is not a selector: {}{args:?} = {value}",
                        sym.name, sym.name
                    ))
                })?;
                out.insert(next + i, args)?;
            }
            next += sym.arity;
        }
        Ok(out)
    }

    /// Fails with an invalid structure unless every tuple satisfies
    /// exactly one `f#i`, with `i` least among the places holding `x_i`.
    fn backward(&self, m: &RedundantStructure) -> Result<FiniteStructure> {
        check_signature(&self.target, m.signature())?;
        let n = m.n();
        let base = self.source.relations().len();
        let relations: Vec<Vec<Vec<usize>>> = (0..base).map(|r| m.relation(r).iter().cloned().collect()).collect();
        let mut functions = Vec::new();
        let mut next = base;
        for sym in self.source.functions() {
            let len = n.pow(sym.arity as u32);
            let mut table = vec![usize::MAX; len];
            for i in 0..sym.arity {
                for args in m.relation(next + i) {
                    let slot = &mut table[tuple_index(args, n)];
                    if *slot != usize::MAX {
                        return Err(Error::InvalidStructure(format!(
                            "more than one `{}#i` holds of {args:?}",
                            sym.name
                        )));
                    }
                    if args[..i].contains(&args[i]) {
                        return Err(Error::InvalidStructure(format!(
                            "`{}#{i}` holds of {args:?} but an earlier place has the same entry",
                            sym.name
                        )));
                    }
                    *slot = args[i];
                }
            }
            if let Some(idx) = table.iter().position(|&v| v == usize::MAX) {
                return Err(Error::InvalidStructure(format!(
                    "no `{}#i` holds of {:?}",
                    sym.name,
                    index_tuple(idx, n, sym.arity)
                )));
            }
            functions.push(table);
            next += sym.arity;
        }
        FiniteStructure::new(self.source.clone(), n, relations, functions)
    }
}

/// Relations with repeated entries to non-redundant relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RedundancyElimination {
    source: Arc<Signature>,
    target: Arc<Signature>,
    // source relation and pattern of each target relation
    plan: Vec<(usize, EquivalenceRelation)>,
}

impl RedundancyElimination {
    pub fn new(source: Arc<Signature>) -> Result<Self> {
        if !source.is_relational() {
            return invalid("redundancy elimination needs a relational signature");
        }
        let mut plan = Vec::new();
        let mut symbols = Vec::new();
        for (r, sym) in source.relations().iter().enumerate() {
            for e in enumerate_eq_rels(sym.arity)? {
                symbols.push(Symbol::new(format!("{}#{}", sym.name, e.suffix()), e.class_count()));
                plan.push((r, e));
            }
        }
        let target = Arc::new(Signature::new(symbols, Vec::new())?);
        Ok(RedundancyElimination { source, target, plan })
    }

    /// Rebuilds the elimination from its target signature, whose relations
    /// must be exactly the `R#e` for every pattern `e` of every `R`.
    pub fn from_target(target: &Signature) -> Result<Self> {
        let mut relations: Vec<Symbol> = Vec::new();
        for r in target.relations() {
            let (base, suffix) =
                split_name(&r.name).ok_or_else(|| Error::Format(format!("relation `{}` has no pattern", r.name)))?;
            let arity = suffix.split(',').count();
            if relations.last().is_none_or(|s| s.name != base) {
                relations.push(Symbol::new(base, arity));
            }
        }
        let built = RedundancyElimination::new(Arc::new(Signature::new(relations, Vec::new())?))?;
        if *built.target != *target {
            return Err(Error::Format("target signature is not a full set of patterns".into()));
        }
        Ok(built)
    }

    /// The source relation and pattern behind each target relation.
    pub fn plan(&self) -> &[(usize, EquivalenceRelation)] {
        &self.plan
    }
}

impl Interdefinition for RedundancyElimination {
    type Source = RedundantStructure;
    type Target = FiniteStructure;

    fn source(&self) -> &Arc<Signature> {
        &self.source
    }

    fn target(&self) -> &Arc<Signature> {
        &self.target
    }

    fn forward(&self, m: &RedundantStructure) -> Result<FiniteStructure> {
        check_signature(&self.source, m.signature())?;
        let mut out = FiniteStructure::empty(self.target.clone(), m.n())?;
        for (r, _) in self.source.relations().iter().enumerate() {
            let first = self.plan.iter().position(|(s, _)| *s == r).expect("every relation has patterns");
            for t in m.relation(r) {
                let pattern = EquivalenceRelation::of_tuple(t);
                let offset = self.plan[first..]
                    .iter()
                    .position(|(_, e)| *e == pattern)
                    .expect("all patterns listed");
                out.insert(first + offset, EquivalenceRelation::collapse(t))?;
            }
        }
        Ok(out)
    }

    fn backward(&self, m: &FiniteStructure) -> Result<RedundantStructure> {
        check_signature(&self.target, m.signature())?;
        let mut out = RedundantStructure::empty(self.source.clone(), m.n())?;
        for (i, (r, e)) in self.plan.iter().enumerate() {
            for z in m.relation(i) {
                out.insert(*r, e.expand(z))?;
            }
        }
        Ok(out)
    }
}

/// The image of `mu` under the forward map. A structure the map rejects
/// makes the measure invalid for this interdefinition.
pub fn pushforward<I: Interdefinition>(mu: &FiniteMeasure<I::Source>, map: &I) -> Result<FiniteMeasure<I::Target>> {
    mu.pushforward(|s| {
        map.forward(s)
            .map_err(|e| Error::InvalidMeasure(format!("atom outside the source class: {e}")))
    })
}

/// Whether the pushforward keeps every atom's mass, inverts on the
/// support, and has the same entropy. Masses are compared exactly.
pub fn entropy_preserved<I: Interdefinition>(mu: &FiniteMeasure<I::Source>, map: &I) -> Result<bool> {
    let nu = pushforward(mu, map)?;
    if nu.support_len() != mu.support_len() {
        return Ok(false);
    }
    for (s, p) in mu.atoms() {
        let image = map.forward(s)?;
        if nu.mass(&image) != *p || map.backward(&image)? != *s {
            return Ok(false);
        }
    }
    // equal multisets of masses give equal entropy, independent of the
    // order in which floating-point sums are taken
    let sorted = |m: Vec<BigRational>| {
        let mut m = m;
        m.sort();
        m
    };
    Ok(sorted(nu.atoms().map(|(_, p)| p.clone()).collect()) == sorted(mu.atoms().map(|(_, p)| p.clone()).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Signature;

    fn digraph() -> Arc<Signature> {
        Arc::new(Signature::relational(&[("R", 2)]).unwrap())
    }

    #[test]
    fn bell_numbers() {
        let counts: Vec<usize> = (1..=5).map(|k| enumerate_eq_rels(k).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 2, 5, 15, 52]);
        let e = EquivalenceRelation::from_rgs(vec![0, 1, 0]).unwrap();
        assert_eq!(e.blocks(), vec![vec![0, 2], vec![1]]);
        assert_eq!(e.least(2), 0);
        assert_eq!(e.representatives(), vec![0, 1]);
        assert!(EquivalenceRelation::from_rgs(vec![0, 2]).is_err());
    }

    #[test]
    fn min_is_a_selector() {
        let sig = Arc::new(Signature::new(vec![], vec![Symbol::new("f", 2)]).unwrap());
        let mut m = FiniteStructure::empty(sig.clone(), 2).unwrap();
        m.set_function(0, &[1, 0], 0).unwrap();
        let elim = FunctionElimination::new(sig).unwrap();
        let out = elim.forward(&m).unwrap();
        let f0: Vec<_> = out.relation_named("f#0").unwrap().iter().cloned().collect();
        let f1: Vec<_> = out.relation_named("f#1").unwrap().iter().cloned().collect();
        assert_eq!(f0, vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(f1, vec![vec![1, 0]]);
        assert_eq!(elim.backward(&out).unwrap(), m);
        assert_eq!(FunctionElimination::from_target(elim.target()).unwrap(), elim);
    }

    #[test]
    fn non_selectors_and_constants() {
        let sig = Arc::new(Signature::new(vec![], vec![Symbol::new("g", 1)]).unwrap());
        let mut m = FiniteStructure::empty(sig.clone(), 3).unwrap();
        m.set_function(0, &[2], 0).unwrap();
        let err = FunctionElimination::new(sig).unwrap().forward(&m).unwrap_err();
        assert!(matches!(err, Error::PreconditionViolation(ref s) if s.contains("[2]")));
        let c = Arc::new(Signature::new(vec![], vec![Symbol::new("c", 0)]).unwrap());
        assert!(matches!(FunctionElimination::new(c), Err(Error::PreconditionViolation(_))));
    }

    #[test]
    fn broken_selector_axioms() {
        let sig = Arc::new(Signature::new(vec![], vec![Symbol::new("f", 2)]).unwrap());
        let elim = FunctionElimination::new(sig).unwrap();
        let good = elim.forward(&FiniteStructure::empty(elim.source().clone(), 2).unwrap()).unwrap();
        let mut both = good.clone();
        both.insert(1, vec![0, 0]).unwrap();
        assert!(matches!(elim.backward(&both), Err(Error::InvalidStructure(_))));
        let mut none = RedundantStructure::empty(elim.target().clone(), 2).unwrap();
        none.insert(0, vec![0, 0]).unwrap();
        assert!(matches!(elim.backward(&none), Err(Error::InvalidStructure(_))));
    }

    #[test]
    fn loops_split_off() {
        let elim = RedundancyElimination::new(digraph()).unwrap();
        let names: Vec<&str> = elim.target().relations().iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, vec!["R#0,0", "R#0,1"]);
        let mut m = RedundantStructure::empty(digraph(), 2).unwrap();
        m.insert(0, vec![0, 0]).unwrap();
        let out = elim.forward(&m).unwrap();
        assert!(out.holds(0, &[0]) && out.relation(1).is_empty());
        let mut m2 = RedundantStructure::empty(digraph(), 2).unwrap();
        m2.insert(0, vec![0, 1]).unwrap();
        let out2 = elim.forward(&m2).unwrap();
        assert!(out2.relation(0).is_empty() && out2.holds(1, &[0, 1]));
        assert_eq!(elim.backward(&out).unwrap(), m);
        assert_eq!(RedundancyElimination::from_target(elim.target()).unwrap(), elim);
    }

    #[test]
    fn all_digraphs_with_loops() {
        let elim = RedundancyElimination::new(digraph()).unwrap();
        let pairs = [[0, 0], [0, 1], [1, 0], [1, 1]];
        let all: Vec<RedundantStructure> = (0..16u32)
            .map(|mask| {
                let mut m = RedundantStructure::empty(digraph(), 2).unwrap();
                for (i, p) in pairs.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        m.insert(0, p.to_vec()).unwrap();
                    }
                }
                m
            })
            .collect();
        let mu = FiniteMeasure::uniform(all).unwrap();
        let nu = pushforward(&mu, &elim).unwrap();
        assert_eq!(nu.entropy_bits(), 4.0);
        assert!(entropy_preserved(&mu, &elim).unwrap());
        let point = FiniteMeasure::point(RedundantStructure::empty(digraph(), 3).unwrap());
        assert!(entropy_preserved(&point, &elim).unwrap());
    }
}
