use std::fmt;
use std::sync::Arc;

use super::subsets::{compose, permutation_rank, permutations, is_permutation};
use super::Signature;
use crate::error::{invalid, Error, Result};

/// Largest number of type bits we support; keeps the type count in a `u64`.
pub const MAX_TYPE_BITS: usize = 63;

/// Largest type space [`TypeSpace::enumerate`] will materialize.
const MAX_ENUMERATED_BITS: usize = 24;

/// A complete non-redundant quantifier-free `k`-type.
///
/// Bit `r * k! + p` is set when relation `r` holds of
/// `(x_{π(0)}, …, x_{π(k-1)})`, where `π` is the `p`-th permutation of
/// `[k]` in lexicographic order. The numeric value of the mask doubles as
/// the canonical type index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QfType(u64);

impl QfType {
    pub fn from_index(index: u64) -> Self {
        QfType(index)
    }

    pub fn index(self) -> u64 {
        self.0
    }

    pub fn bit(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }
}

/// The space of quantifier-free `k`-types over a signature whose relations
/// all have arity `k`.
#[derive(Debug, Clone)]
pub struct TypeSpace {
    signature: Arc<Signature>,
    k: usize,
    perms: Vec<Vec<usize>>,
    // compose_rank[s][p] = rank of perms[s] ∘ perms[p]
    compose_rank: Vec<Vec<usize>>,
}

impl PartialEq for TypeSpace {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k && self.signature == other.signature
    }
}

impl Eq for TypeSpace {}

impl TypeSpace {
    pub fn new(signature: Arc<Signature>, k: usize) -> Result<Self> {
        if signature.uniform_arity() != Some(k) {
            return Err(Error::UnsupportedSignature(format!(
                "expected a purely relational signature with every arity equal to {k}"
            )));
        }
        let fact: usize = (1..=k).product();
        let bits = signature.relations().len().saturating_mul(fact);
        if bits > MAX_TYPE_BITS {
            return Err(Error::UnsupportedSignature(format!(
                "{} relations of arity {k} need {bits} type bits, at most {MAX_TYPE_BITS} are supported",
                signature.relations().len()
            )));
        }
        let perms = permutations(k);
        let compose_rank = perms
            .iter()
            .map(|s| perms.iter().map(|p| permutation_rank(&compose(s, p))).collect())
            .collect();
        Ok(TypeSpace {
            signature,
            k,
            perms,
            compose_rank,
        })
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Permutations of `[k]` in lexicographic order.
    pub fn permutations(&self) -> &[Vec<usize>] {
        &self.perms
    }

    pub fn relation_count(&self) -> usize {
        self.signature.relations().len()
    }

    /// Number of type bits, `|L| · k!`.
    pub fn bits(&self) -> usize {
        self.relation_count() * self.perms.len()
    }

    /// Number of types, `2^(|L| · k!)`.
    pub fn count(&self) -> u64 {
        1u64 << self.bits()
    }

    pub fn bit_index(&self, relation: usize, perm_rank: usize) -> usize {
        relation * self.perms.len() + perm_rank
    }

    pub fn contains(&self, t: QfType) -> bool {
        t.0 < self.count()
    }

    /// The all-false type.
    pub fn bottom(&self) -> QfType {
        QfType(0)
    }

    /// The type in which every relation holds in every order.
    pub fn top(&self) -> QfType {
        QfType(self.count() - 1)
    }

    /// All types in canonical index order.
    pub fn enumerate(&self) -> Result<Vec<QfType>> {
        if self.bits() > MAX_ENUMERATED_BITS {
            return Err(Error::ResourceLimit {
                what: "type enumeration".into(),
                required: format!("2^{}", self.bits()),
                limit: 1 << MAX_ENUMERATED_BITS,
            });
        }
        Ok((0..self.count()).map(QfType).collect())
    }

    /// Action of the `s`-th permutation (lexicographic rank) on a type.
    pub fn act_by_rank(&self, s: usize, t: QfType) -> QfType {
        let fact = self.perms.len();
        let mut out = 0u64;
        let mut bits = t.0;
        while bits != 0 {
            let b = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let (r, p) = (b / fact, b % fact);
            out |= 1 << (r * fact + self.compose_rank[s][p]);
        }
        QfType(out)
    }

    /// `σ · t`: the formula with variables `x_{π(i)}` is in `t` iff the one
    /// with variables `x_{σ(π(i))}` is in the result.
    pub fn act(&self, sigma: &[usize], t: QfType) -> Result<QfType> {
        if sigma.len() != self.k || !is_permutation(sigma) {
            return invalid(format!("{sigma:?} is not a permutation of [{}]", self.k));
        }
        Ok(self.act_by_rank(permutation_rank(sigma), t))
    }

    /// Readable list of the atomic formulas in a type.
    pub fn describe(&self, t: QfType) -> String {
        let fact = self.perms.len();
        let mut parts = Vec::new();
        for (r, rel) in self.signature.relations().iter().enumerate() {
            for (p, perm) in self.perms.iter().enumerate() {
                if t.bit(r * fact + p) {
                    let vars: Vec<String> = perm.iter().map(|i| format!("x{i}")).collect();
                    parts.push(format!("{}({})", rel.name, vars.join(",")));
                }
            }
        }
        format!("{{{}}}", parts.join(", "))
    }
}

impl fmt::Display for QfType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Convenience: every type of `signature` at arity `k`.
pub fn enumerate_qf_types(signature: &Arc<Signature>, k: usize) -> Result<Vec<QfType>> {
    TypeSpace::new(signature.clone(), k)?.enumerate()
}

/// Convenience wrapper for [`TypeSpace::act`].
pub fn sym_act_type(space: &TypeSpace, sigma: &[usize], t: QfType) -> Result<QfType> {
    space.act(sigma, t)
}
