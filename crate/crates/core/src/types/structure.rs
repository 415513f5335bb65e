use std::collections::BTreeSet;
use std::ops::Deref;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use super::subsets::{inverse, is_permutation, subsets_of_size};
use super::{QfType, Signature, Symbol, TypeSpace};
use crate::error::{invalid, Error, Result};

/// Universe, relations and function tables shared by both structure kinds.
///
/// Function tables are flat, indexed by the argument tuple read as a base-`n`
/// number (lexicographic order of argument tuples).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StructureBody {
    signature: Arc<Signature>,
    n: usize,
    relations: Vec<BTreeSet<Vec<usize>>>,
    functions: Vec<Vec<usize>>,
}

impl StructureBody {
    fn empty(signature: Arc<Signature>, n: usize) -> Result<Self> {
        let mut functions = Vec::with_capacity(signature.functions().len());
        for f in signature.functions() {
            if f.arity == 0 && n == 0 {
                return invalid(format!("constant `{}` needs a non-empty universe", f.name));
            }
            let len = table_len(n, f.arity)?;
            // default to the projection onto the first argument
            let table = (0..len)
                .map(|i| if f.arity == 0 { 0 } else { first_arg(i, n, f.arity) })
                .collect();
            functions.push(table);
        }
        Ok(StructureBody {
            relations: vec![BTreeSet::new(); signature.relations().len()],
            functions,
            signature,
            n,
        })
    }

    fn from_parts(
        signature: Arc<Signature>,
        n: usize,
        relations: Vec<Vec<Vec<usize>>>,
        functions: Vec<Vec<usize>>,
        distinct: bool,
    ) -> Result<Self> {
        if relations.len() != signature.relations().len() {
            return Err(Error::InvalidStructure(format!(
                "{} relation lists for {} relation symbols",
                relations.len(),
                signature.relations().len()
            )));
        }
        if functions.len() != signature.functions().len() {
            return Err(Error::InvalidStructure(format!(
                "{} function tables for {} function symbols",
                functions.len(),
                signature.functions().len()
            )));
        }
        let mut body = StructureBody::empty(signature, n)?;
        for (r, tuples) in relations.into_iter().enumerate() {
            for t in tuples {
                body.insert(r, t, distinct)?;
            }
        }
        for (f, table) in functions.into_iter().enumerate() {
            let sym = &body.signature.functions()[f];
            if table.len() != body.functions[f].len() {
                return Err(Error::InvalidStructure(format!(
                    "function `{}` needs {} values, got {}",
                    sym.name,
                    body.functions[f].len(),
                    table.len()
                )));
            }
            if let Some(v) = table.iter().find(|&&v| v >= n) {
                return Err(Error::InvalidStructure(format!(
                    "function `{}` takes value {v} outside [{n}]",
                    sym.name
                )));
            }
            body.functions[f] = table;
        }
        Ok(body)
    }

    fn insert(&mut self, relation: usize, tuple: Vec<usize>, distinct: bool) -> Result<bool> {
        let sym = self
            .signature
            .relations()
            .get(relation)
            .ok_or_else(|| Error::InvalidStructure(format!("no relation #{relation}")))?;
        if tuple.len() != sym.arity {
            return Err(Error::InvalidStructure(format!(
                "tuple {tuple:?} has length {}, `{}` has arity {}",
                tuple.len(),
                sym.name,
                sym.arity
            )));
        }
        if let Some(x) = tuple.iter().find(|&&x| x >= self.n) {
            return Err(Error::InvalidStructure(format!(
                "element {x} of {tuple:?} is outside [{}]",
                self.n
            )));
        }
        if distinct && has_repeat(&tuple) {
            return Err(Error::InvalidStructure(format!(
                "tuple {tuple:?} of `{}` repeats an element",
                sym.name
            )));
        }
        Ok(self.relations[relation].insert(tuple))
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Tuples of the `r`-th relation, in lexicographic order.
    pub fn relation(&self, r: usize) -> &BTreeSet<Vec<usize>> {
        &self.relations[r]
    }

    pub fn relation_named(&self, name: &str) -> Option<&BTreeSet<Vec<usize>>> {
        self.signature.relation_index(name).map(|r| &self.relations[r])
    }

    pub fn holds(&self, r: usize, tuple: &[usize]) -> bool {
        self.relations[r].contains(tuple)
    }

    /// Flat value table of the `f`-th function.
    pub fn function_table(&self, f: usize) -> &[usize] {
        &self.functions[f]
    }

    pub fn apply(&self, f: usize, args: &[usize]) -> usize {
        self.functions[f][tuple_index(args, self.n)]
    }

    /// True when no relation holds of a tuple with a repeated entry.
    pub fn is_non_redundant(&self) -> bool {
        self.relations.iter().flatten().all(|t| !has_repeat(t))
    }

    fn logic_act(&self, sigma: &[usize]) -> Result<Self> {
        if sigma.len() != self.n || !is_permutation(sigma) {
            return invalid(format!("{sigma:?} is not a permutation of [{}]", self.n));
        }
        let relations = self
            .relations
            .iter()
            .map(|rel| rel.iter().map(|t| t.iter().map(|&x| sigma[x]).collect()).collect())
            .collect();
        let inv = inverse(sigma);
        let functions = self
            .signature
            .functions()
            .iter()
            .zip(&self.functions)
            .map(|(sym, table)| {
                (0..table.len())
                    .map(|i| {
                        let args = index_tuple(i, self.n, sym.arity);
                        let pre: Vec<usize> = args.iter().map(|&x| inv[x]).collect();
                        sigma[table[tuple_index(&pre, self.n)]]
                    })
                    .collect()
            })
            .collect();
        Ok(StructureBody {
            signature: self.signature.clone(),
            n: self.n,
            relations,
            functions,
        })
    }

    fn restrict(&self, m: usize) -> Result<Self> {
        if m > self.n {
            return invalid(format!("cannot restrict a structure on [{}] to [{m}]", self.n));
        }
        let relations = self
            .relations
            .iter()
            .map(|rel| rel.iter().filter(|t| t.iter().all(|&x| x < m)).cloned().collect())
            .collect();
        let mut functions = Vec::with_capacity(self.functions.len());
        for (sym, table) in self.signature.functions().iter().zip(&self.functions) {
            let len = table_len(m, sym.arity)?;
            let mut out = Vec::with_capacity(len);
            for i in 0..len {
                let args = index_tuple(i, m, sym.arity);
                let v = table[tuple_index(&args, self.n)];
                if v >= m {
                    return invalid(format!(
                        "[{m}] is not closed under `{}`: {}{args:?} = {v}",
                        sym.name, sym.name
                    ));
                }
                out.push(v);
            }
            functions.push(out);
        }
        Ok(StructureBody {
            signature: self.signature.clone(),
            n: m,
            relations,
            functions,
        })
    }

    fn to_json(&self) -> Value {
        let mut relations = Map::new();
        for (sym, rel) in self.signature.relations().iter().zip(&self.relations) {
            relations.insert(sym.name.clone(), json!(rel.iter().collect::<Vec<_>>()));
        }
        let mut functions = Map::new();
        for (sym, table) in self.signature.functions().iter().zip(&self.functions) {
            functions.insert(sym.name.clone(), json!(table));
        }
        json!({
            "functions": functions,
            "n": self.n,
            "relations": relations,
            "signature": signature_to_json(&self.signature),
        })
    }

    fn from_json(value: &Value, distinct: bool) -> Result<Self> {
        let signature = Arc::new(signature_from_json(
            value.get("signature").ok_or_else(|| fmt_err("missing `signature`"))?,
        )?);
        let n = value
            .get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| fmt_err("missing or non-integer `n`"))? as usize;
        let empty = Map::new();
        let rel_map = match value.get("relations") {
            None => &empty,
            Some(v) => v.as_object().ok_or_else(|| fmt_err("`relations` must be an object"))?,
        };
        for name in rel_map.keys() {
            if signature.relation_index(name).is_none() {
                return Err(fmt_err(format!("unknown relation `{name}`")));
            }
        }
        let mut relations = Vec::new();
        for sym in signature.relations() {
            let mut tuples = Vec::new();
            if let Some(list) = rel_map.get(&sym.name) {
                let list = list
                    .as_array()
                    .ok_or_else(|| fmt_err(format!("relation `{}` must be a list", sym.name)))?;
                for t in list {
                    tuples.push(usize_list(t)?);
                }
            }
            relations.push(tuples);
        }
        let fn_map = match value.get("functions") {
            None => &empty,
            Some(v) => v.as_object().ok_or_else(|| fmt_err("`functions` must be an object"))?,
        };
        for name in fn_map.keys() {
            if signature.function_index(name).is_none() {
                return Err(fmt_err(format!("unknown function `{name}`")));
            }
        }
        let mut functions = Vec::new();
        for sym in signature.functions() {
            let table = fn_map
                .get(&sym.name)
                .ok_or_else(|| fmt_err(format!("missing table for function `{}`", sym.name)))?;
            functions.push(usize_list(table)?);
        }
        StructureBody::from_parts(signature, n, relations, functions, distinct)
    }
}

/// An `L`-structure on `[n]` whose relations hold only of tuples with
/// distinct entries.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiniteStructure(StructureBody);

/// An `L`-structure on `[n]` whose relation tuples may repeat entries.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RedundantStructure(StructureBody);

impl Deref for FiniteStructure {
    type Target = StructureBody;
    fn deref(&self) -> &StructureBody {
        &self.0
    }
}

impl Deref for RedundantStructure {
    type Target = StructureBody;
    fn deref(&self) -> &StructureBody {
        &self.0
    }
}

impl FiniteStructure {
    /// No relation holds; every function projects onto its first argument.
    pub fn empty(signature: Arc<Signature>, n: usize) -> Result<Self> {
        StructureBody::empty(signature, n).map(FiniteStructure)
    }

    pub fn new(
        signature: Arc<Signature>,
        n: usize,
        relations: Vec<Vec<Vec<usize>>>,
        functions: Vec<Vec<usize>>,
    ) -> Result<Self> {
        StructureBody::from_parts(signature, n, relations, functions, true).map(FiniteStructure)
    }

    /// Adds a tuple to relation `r`; returns whether it was new.
    pub fn insert(&mut self, r: usize, tuple: Vec<usize>) -> Result<bool> {
        self.0.insert(r, tuple, true)
    }

    pub fn set_function(&mut self, f: usize, args: &[usize], value: usize) -> Result<()> {
        set_function(&mut self.0, f, args, value)
    }

    /// The logic action: `R^{σ·M}(σ(ā))` iff `R^M(ā)`.
    pub fn logic_act(&self, sigma: &[usize]) -> Result<Self> {
        self.0.logic_act(sigma).map(FiniteStructure)
    }

    /// Induced substructure on `[m]`; fails if `[m]` is not closed under
    /// the functions.
    pub fn restrict(&self, m: usize) -> Result<Self> {
        self.0.restrict(m).map(FiniteStructure)
    }

    /// The type of the increasing enumeration of `set`.
    pub fn qf_type_of(&self, space: &TypeSpace, set: &[usize]) -> Result<QfType> {
        if **space.signature() != *self.signature {
            return invalid("type space signature differs from the structure's");
        }
        if set.len() != space.k() {
            return invalid(format!("set {set:?} does not have {} elements", space.k()));
        }
        let tau = super::tau(set)?;
        if tau.iter().any(|&x| x >= self.n) {
            return invalid(format!("set {set:?} is not contained in [{}]", self.n));
        }
        let mut mask = 0u64;
        let mut tuple = vec![0; space.k()];
        for r in 0..space.relation_count() {
            for (p, perm) in space.permutations().iter().enumerate() {
                for (slot, &i) in tuple.iter_mut().zip(perm) {
                    *slot = tau[i];
                }
                if self.holds(r, &tuple) {
                    mask |= 1 << space.bit_index(r, p);
                }
            }
        }
        Ok(QfType::from_index(mask))
    }

    /// Types of every `k`-subset of `[n]` in lexicographic order.
    pub fn type_vector(&self, space: &TypeSpace) -> Result<Vec<QfType>> {
        self.check_relational_k(space)?;
        subsets_of_size(self.n, space.k())
            .iter()
            .map(|j| self.qf_type_of(space, j))
            .collect()
    }

    /// Rebuilds the structure whose `k`-subsets (lexicographic order) carry
    /// the given types.
    pub fn from_type_vector(space: &TypeSpace, n: usize, types: &[QfType]) -> Result<Self> {
        let sets = subsets_of_size(n, space.k());
        if sets.len() != types.len() {
            return invalid(format!("{} types for {} subsets", types.len(), sets.len()));
        }
        let mut body = StructureBody::empty(space.signature().clone(), n)?;
        for (set, &t) in sets.iter().zip(types) {
            if !space.contains(t) {
                return invalid(format!("type index {} out of range", t.index()));
            }
            for r in 0..space.relation_count() {
                for (p, perm) in space.permutations().iter().enumerate() {
                    if t.bit(space.bit_index(r, p)) {
                        body.relations[r].insert(perm.iter().map(|&i| set[i]).collect());
                    }
                }
            }
        }
        Ok(FiniteStructure(body))
    }

    fn check_relational_k(&self, space: &TypeSpace) -> Result<()> {
        if **space.signature() != *self.signature {
            return invalid("type space signature differs from the structure's");
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        self.0.to_json()
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        StructureBody::from_json(value, true).map(FiniteStructure)
    }

    pub fn into_redundant(self) -> RedundantStructure {
        RedundantStructure(self.0)
    }
}

impl RedundantStructure {
    pub fn empty(signature: Arc<Signature>, n: usize) -> Result<Self> {
        StructureBody::empty(signature, n).map(RedundantStructure)
    }

    pub fn new(
        signature: Arc<Signature>,
        n: usize,
        relations: Vec<Vec<Vec<usize>>>,
        functions: Vec<Vec<usize>>,
    ) -> Result<Self> {
        StructureBody::from_parts(signature, n, relations, functions, false).map(RedundantStructure)
    }

    pub fn insert(&mut self, r: usize, tuple: Vec<usize>) -> Result<bool> {
        self.0.insert(r, tuple, false)
    }

    pub fn set_function(&mut self, f: usize, args: &[usize], value: usize) -> Result<()> {
        set_function(&mut self.0, f, args, value)
    }

    pub fn logic_act(&self, sigma: &[usize]) -> Result<Self> {
        self.0.logic_act(sigma).map(RedundantStructure)
    }

    pub fn restrict(&self, m: usize) -> Result<Self> {
        self.0.restrict(m).map(RedundantStructure)
    }

    /// The same structure as a [`FiniteStructure`], if it is non-redundant.
    pub fn into_non_redundant(self) -> Result<FiniteStructure> {
        if !self.is_non_redundant() {
            return Err(Error::InvalidStructure("a relation holds of a tuple with a repeated entry".into()));
        }
        Ok(FiniteStructure(self.0))
    }

    pub fn to_json(&self) -> Value {
        self.0.to_json()
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        StructureBody::from_json(value, false).map(RedundantStructure)
    }
}

impl From<FiniteStructure> for RedundantStructure {
    fn from(m: FiniteStructure) -> Self {
        m.into_redundant()
    }
}

fn set_function(body: &mut StructureBody, f: usize, args: &[usize], value: usize) -> Result<()> {
    let sym = body
        .signature
        .functions()
        .get(f)
        .ok_or_else(|| Error::InvalidStructure(format!("no function #{f}")))?;
    if args.len() != sym.arity || args.iter().chain([&value]).any(|&x| x >= body.n) {
        return Err(Error::InvalidStructure(format!(
            "bad assignment {}{args:?} = {value} on [{}]",
            sym.name, body.n
        )));
    }
    let i = tuple_index(args, body.n);
    body.functions[f][i] = value;
    Ok(())
}

fn has_repeat(t: &[usize]) -> bool {
    (0..t.len()).any(|i| t[i + 1..].contains(&t[i]))
}

fn table_len(n: usize, arity: usize) -> Result<usize> {
    u32::try_from(arity)
        .ok()
        .and_then(|a| n.checked_pow(a))
        .ok_or_else(|| Error::InvalidArgument(format!("function table of size {n}^{arity} is too large")))
}

fn first_arg(index: usize, n: usize, arity: usize) -> usize {
    index / n.pow(arity as u32 - 1)
}

/// Position of an argument tuple in lexicographic order of `[n]^a`.
pub(crate) fn tuple_index(args: &[usize], n: usize) -> usize {
    args.iter().fold(0, |acc, &x| acc * n + x)
}

/// Inverse of [`tuple_index`].
pub(crate) fn index_tuple(mut index: usize, n: usize, arity: usize) -> Vec<usize> {
    let mut out = vec![0; arity];
    for slot in out.iter_mut().rev() {
        *slot = index % n;
        index /= n;
    }
    out
}

pub(crate) fn signature_to_json(sig: &Signature) -> Value {
    let mut out: Vec<Value> = sig
        .relations()
        .iter()
        .map(|s| json!({"arity": s.arity, "name": s.name}))
        .collect();
    out.extend(
        sig.functions()
            .iter()
            .map(|s| json!({"arity": s.arity, "kind": "function", "name": s.name})),
    );
    Value::Array(out)
}

pub(crate) fn signature_from_json(value: &Value) -> Result<Signature> {
    let list = value
        .as_array()
        .ok_or_else(|| fmt_err("`signature` must be a list of symbols"))?;
    let mut relations = Vec::new();
    let mut functions = Vec::new();
    for entry in list {
        let name = entry
            .get("name")
            .and_then(Value::as_str)
            .ok_or_else(|| fmt_err("symbol without a string `name`"))?;
        let arity = entry
            .get("arity")
            .and_then(Value::as_u64)
            .ok_or_else(|| fmt_err(format!("symbol `{name}` without an integer `arity`")))?
            as usize;
        match entry.get("kind").and_then(Value::as_str).unwrap_or("relation") {
            "relation" => relations.push(Symbol::new(name, arity)),
            "function" => functions.push(Symbol::new(name, arity)),
            other => return Err(fmt_err(format!("unknown symbol kind `{other}`"))),
        }
    }
    Signature::new(relations, functions)
}

fn usize_list(v: &Value) -> Result<Vec<usize>> {
    v.as_array()
        .ok_or_else(|| fmt_err(format!("expected a list of integers, got {v}")))?
        .iter()
        .map(|x| {
            x.as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| fmt_err(format!("expected a non-negative integer, got {x}")))
        })
        .collect()
}

fn fmt_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}
