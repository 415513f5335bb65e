use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A named relation or function symbol.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

impl Symbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Symbol {
            name: name.into(),
            arity,
        }
    }
}

/// A finite language: relation symbols of positive arity plus function
/// symbols. Names are unique across both lists.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Signature {
    relations: Vec<Symbol>,
    functions: Vec<Symbol>,
}

impl Signature {
    pub fn new(relations: Vec<Symbol>, functions: Vec<Symbol>) -> Result<Self> {
        let mut seen = HashSet::new();
        for s in relations.iter().chain(&functions) {
            if s.name.is_empty() {
                return invalid("symbol names must be non-empty");
            }
            if !seen.insert(s.name.as_str()) {
                return invalid(format!("duplicate symbol name `{}`", s.name));
            }
        }
        if let Some(r) = relations.iter().find(|r| r.arity == 0) {
            return invalid(format!("relation `{}` must have positive arity", r.name));
        }
        Ok(Signature {
            relations,
            functions,
        })
    }

    /// Relational signature from `(name, arity)` pairs.
    pub fn relational(symbols: &[(&str, usize)]) -> Result<Self> {
        Signature::new(
            symbols.iter().map(|&(n, a)| Symbol::new(n, a)).collect(),
            Vec::new(),
        )
    }

    /// The language of k-uniform hypergraphs: one k-ary symbol `E`.
    pub fn hypergraph(k: usize) -> Self {
        Signature::relational(&[("E", k)]).expect("valid hypergraph signature")
    }

    pub fn relations(&self) -> &[Symbol] {
        &self.relations
    }

    pub fn functions(&self) -> &[Symbol] {
        &self.functions
    }

    pub fn is_relational(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|s| s.name == name)
    }

    pub fn function_index(&self, name: &str) -> Option<usize> {
        self.functions.iter().position(|s| s.name == name)
    }

    /// `Some(k)` when there is at least one relation, every relation has
    /// arity `k`, and there are no function symbols.
    pub fn uniform_arity(&self) -> Option<usize> {
        let k = self.relations.first()?.arity;
        (self.functions.is_empty() && self.relations.iter().all(|r| r.arity == k)).then_some(k)
    }

    /// Largest arity of any symbol, functions included.
    pub fn max_arity(&self) -> usize {
        self.relations
            .iter()
            .chain(&self.functions)
            .map(|s| s.arity)
            .max()
            .unwrap_or(0)
    }

    pub fn arity_profile(&self) -> ArityProfile {
        let mut counts = BTreeMap::new();
        for r in &self.relations {
            *counts.entry(r.arity).or_insert(0u64) += 1;
        }
        ArityProfile { counts }
    }
}

/// Number of relation symbols of each arity, `r -> a_L(r)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ArityProfile {
    counts: BTreeMap<usize, u64>,
}

impl ArityProfile {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, u64)>) -> Self {
        let mut counts = BTreeMap::new();
        for (r, c) in pairs {
            if c > 0 {
                *counts.entry(r).or_insert(0) += c;
            }
        }
        ArityProfile { counts }
    }

    pub fn count(&self, arity: usize) -> u64 {
        self.counts.get(&arity).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts.iter().map(|(&r, &c)| (r, c))
    }

    /// A relational signature realizing this profile, with symbols named
    /// `R{arity}_{i}`.
    pub fn signature(&self) -> Signature {
        let mut rels = Vec::new();
        for (r, c) in self.iter() {
            for i in 0..c {
                rels.push(Symbol::new(format!("R{r}_{i}"), r));
            }
        }
        Signature::new(rels, Vec::new()).expect("generated names are unique")
    }
}

/// Parses `"2:1"` or `"1:2,2:1"` (arity:count pairs).
impl FromStr for ArityProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (r, c) = part
                .split_once(':')
                .ok_or_else(|| Error::Format(format!("profile entry `{part}` is not arity:count")))?;
            let r: usize = r
                .trim()
                .parse()
                .map_err(|_| Error::Format(format!("bad arity in `{part}`")))?;
            let c: u64 = c
                .trim()
                .parse()
                .map_err(|_| Error::Format(format!("bad count in `{part}`")))?;
            pairs.push((r, c));
        }
        Ok(ArityProfile::from_pairs(pairs))
    }
}

impl fmt::Display for ArityProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(r, c)| format!("{r}:{c}")).collect();
        f.write_str(&parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_nullary_relations() {
        assert!(Signature::relational(&[("E", 2), ("E", 3)]).is_err());
        assert!(Signature::relational(&[("P", 0)]).is_err());
        assert!(Signature::new(vec![Symbol::new("f", 2)], vec![Symbol::new("f", 1)]).is_err());
    }

    #[test]
    fn uniform_arity() {
        assert_eq!(Signature::relational(&[("R", 2), ("S", 2)]).unwrap().uniform_arity(), Some(2));
        assert_eq!(Signature::relational(&[("R", 2), ("S", 1)]).unwrap().uniform_arity(), None);
        let with_fn = Signature::new(vec![Symbol::new("E", 2)], vec![Symbol::new("f", 2)]).unwrap();
        assert_eq!(with_fn.uniform_arity(), None);
        assert_eq!(with_fn.max_arity(), 2);
    }

    #[test]
    fn profile_parse_and_signature() {
        let p: ArityProfile = "1:2, 2:1".parse().unwrap();
        assert_eq!(p.count(1), 2);
        assert_eq!(p.count(2), 1);
        assert_eq!(p.count(3), 0);
        assert_eq!(p.to_string(), "1:2,2:1");
        assert_eq!(p.signature().arity_profile(), p);
        assert!("2".parse::<ArityProfile>().is_err());
    }
}
