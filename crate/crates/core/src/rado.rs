//! The Rado `k`-hypergraph built generation by generation.
//!
//! `A_0` is a single vertex and `V_ℓ = V_{ℓ-1} ∪ A_ℓ`. Generation `ℓ ≥ 1` has
//! one vertex `a_X` for every set `X` of `(k-1)`-subsets of `V_{ℓ-1}`, and
//! `a_X ∪ d` is an edge exactly when `d ∈ X`.
//!
//! Vertices of the first few generations are explicit: the index of `a_X`
//! within its generation is the bitmask of `X` over the `(k-1)`-subsets of
//! `V_{ℓ-1}` in lexicographic order, and the global id of a vertex is
//! `|V_{ℓ-1}|` plus its index. Later generations are far too large to list,
//! so their vertices are identified by a uniformly drawn index and the
//! membership `d ∈ X` is a keyed fair coin of the vertex and `d`.

use num_bigint::BigUint;
use num_integer::binomial;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::prf::{domain, Keyed};
use crate::types::subsets::{lex_rank, subsets_of_size};

/// Generations whose index has more bits than this are not stored exactly.
pub const EXACT_BITS_CAP: u64 = 1 << 16;

/// Explicit generations may have at most this many index bits.
pub const MAX_EXPLICIT_BITS: u64 = 24;

/// Bits of the fingerprint standing in for an index too large to store.
pub const FINGERPRINT_BITS: u64 = 256;

/// `|A_ℓ|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenerationSize {
    Exact(BigUint),
    /// `2^e` with the exponent known exactly.
    PowerOfTwo(BigUint),
    /// Too large to describe with an exact exponent.
    Unrepresentable,
}

/// `C(n, r)` for a big `n` and small `r`.
fn big_binomial(n: &BigUint, r: usize) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..r {
        if *n < BigUint::from(i + 1) {
            return BigUint::zero();
        }
        acc *= n - BigUint::from(i);
        acc /= BigUint::from(i + 1);
    }
    acc
}

/// Index bits `C(|V_{ℓ-1}|, k-1)` and cumulative sizes `|V_ℓ|` while they
/// remain exact.
fn walk(k: usize, generation: usize) -> (Option<BigUint>, Option<BigUint>) {
    // (bits of A_ℓ, |V_ℓ|)
    let mut bits = Some(BigUint::zero());
    let mut total = Some(BigUint::one());
    for _ in 1..=generation {
        match &total {
            Some(v) => {
                let b = big_binomial(v, k - 1);
                total = (b <= BigUint::from(EXACT_BITS_CAP)).then(|| v + (BigUint::one() << b.to_u64().expect("capped")));
                bits = Some(b);
            }
            None => {
                bits = None;
            }
        }
    }
    (bits, total)
}

/// `|A_ℓ|` for the Rado `k`-hypergraph.
pub fn generation_size(k: usize, generation: usize) -> Result<GenerationSize> {
    if k == 0 {
        return invalid("k must be positive");
    }
    let (bits, _) = walk(k, generation);
    Ok(match bits {
        Some(b) if b <= BigUint::from(EXACT_BITS_CAP) => {
            GenerationSize::Exact(BigUint::one() << b.to_u64().expect("capped"))
        }
        Some(b) => GenerationSize::PowerOfTwo(b),
        None => GenerationSize::Unrepresentable,
    })
}

/// `|V_ℓ|`, when it can be written down.
pub fn cumulative_size(k: usize, generation: usize) -> Result<Option<BigUint>> {
    if k == 0 {
        return invalid("k must be positive");
    }
    Ok(walk(k, generation).1)
}

/// A vertex: its generation and its index within `A_ℓ` (or a fingerprint
/// for generations too large to index exactly).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId {
    pub generation: usize,
    pub index: BigUint,
}

impl VertexId {
    fn encode(&self, out: &mut Vec<u64>) {
        let digits = self.index.to_u64_digits();
        out.push(self.generation as u64);
        out.push(digits.len() as u64);
        out.extend(digits);
    }
}

#[derive(Debug, Clone)]
pub struct RadoHypergraph {
    k: usize,
    explicit_gens: usize,
    // per explicit generation: index bits and |V_{ℓ-1}|
    bits: Vec<u64>,
    offsets: Vec<u64>,
}

impl RadoHypergraph {
    pub fn new(k: usize, explicit_gens: usize) -> Result<Self> {
        if k == 0 {
            return invalid("k must be positive");
        }
        let mut bits = vec![0u64];
        let mut offsets = vec![0u64];
        let mut total = 1u64;
        for gen in 1..=explicit_gens {
            let b = binomial(total, k as u64 - 1);
            if b > MAX_EXPLICIT_BITS {
                return invalid(format!(
                    "generation {gen} of the Rado {k}-hypergraph has 2^{b} vertices, too many to list"
                ));
            }
            bits.push(b);
            offsets.push(total);
            total += 1 << b;
        }
        Ok(RadoHypergraph {
            k,
            explicit_gens,
            bits,
            offsets,
        })
    }

    /// Two explicit generations for `k ≤ 2`, three for `k = 3`, and as
    /// many as stay small otherwise.
    pub fn with_default_generations(k: usize) -> Result<Self> {
        let gens = match k {
            0 => return invalid("k must be positive"),
            1 | 2 => 2,
            3 => 3,
            _ => (1..=8)
                .take_while(|&g| RadoHypergraph::new(k, g).is_ok_and(|r| r.bits[g] <= 12))
                .last()
                .unwrap_or(0),
        };
        RadoHypergraph::new(k, gens)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn explicit_gens(&self) -> usize {
        self.explicit_gens
    }

    pub fn is_explicit(&self, generation: usize) -> bool {
        generation <= self.explicit_gens
    }

    /// `|V_ℓ|` for an explicit generation.
    pub fn explicit_total(&self, generation: usize) -> Option<u64> {
        self.is_explicit(generation)
            .then(|| self.offsets[generation] + (1 << self.bits[generation]))
    }

    /// `|A_ℓ|` for an explicit generation.
    pub fn explicit_size(&self, generation: usize) -> Option<u64> {
        self.is_explicit(generation).then(|| 1 << self.bits[generation])
    }

    pub fn vertex(&self, generation: usize, index: impl Into<BigUint>) -> Result<VertexId> {
        let index = index.into();
        if let GenerationSize::Exact(size) = generation_size(self.k, generation)? {
            if index >= size {
                return invalid(format!("index {index} out of range for generation {generation}"));
            }
        }
        Ok(VertexId { generation, index })
    }

    /// Global id `|V_{ℓ-1}| + index` of an explicit vertex.
    pub fn global_id(&self, v: &VertexId) -> Option<u64> {
        if !self.is_explicit(v.generation) {
            return None;
        }
        Some(self.offsets[v.generation] + v.index.to_u64()?)
    }

    pub fn from_global(&self, id: u64) -> Option<VertexId> {
        let g = (0..=self.explicit_gens).rev().find(|&g| self.offsets[g] <= id)?;
        (id < self.offsets[g] + (1 << self.bits[g])).then(|| VertexId {
            generation: g,
            index: BigUint::from(id - self.offsets[g]),
        })
    }

    /// `X` for an explicit vertex, as `(k-1)`-sets of global ids.
    pub fn x_set(&self, v: &VertexId) -> Result<Vec<Vec<u64>>> {
        if !self.is_explicit(v.generation) {
            return invalid(format!("generation {} is not explicit", v.generation));
        }
        let earlier = self.offsets[v.generation] as usize;
        let index = v.index.to_u64().unwrap_or(0);
        Ok(subsets_of_size(earlier, self.k - 1)
            .into_iter()
            .enumerate()
            .filter(|(i, _)| index >> i & 1 == 1)
            .map(|(_, d)| d.into_iter().map(|x| x as u64).collect())
            .collect())
    }

    /// A uniform vertex of `A_ℓ`, drawn from the keyed stream at `key`.
    pub fn random_vertex(&self, generation: usize, stream: &Keyed, key: &[u64]) -> Result<VertexId> {
        let bits = match generation_size(self.k, generation)? {
            GenerationSize::Exact(size) => size.bits() - 1,
            _ => FINGERPRINT_BITS,
        };
        let words = bits.div_ceil(64) as usize;
        let mut buf = key.to_vec();
        buf.push(0);
        let mut digits = Vec::with_capacity(words);
        for w in 0..words {
            *buf.last_mut().expect("counter slot") = w as u64;
            digits.push(stream.word(&buf));
        }
        let mut index = BigUint::from_slice(
            &digits.iter().flat_map(|d| [*d as u32, (*d >> 32) as u32]).collect::<Vec<u32>>(),
        );
        if bits % 64 != 0 || bits == 0 {
            index &= (BigUint::one() << bits) - BigUint::one();
        }
        Ok(VertexId { generation, index })
    }

    /// Whether the `k` given vertices form an edge. Only a set with a
    /// unique vertex of maximal generation can be an edge.
    pub fn has_edge(&self, vertices: &[VertexId], seed: u64) -> Result<bool> {
        if vertices.len() != self.k {
            return invalid(format!("expected {} vertices, got {}", self.k, vertices.len()));
        }
        for (i, v) in vertices.iter().enumerate() {
            if vertices[i + 1..].contains(v) {
                return invalid(format!("vertex {v:?} is repeated"));
            }
        }
        let top_gen = vertices.iter().map(|v| v.generation).max().expect("k ≥ 1");
        let mut tops = vertices.iter().filter(|v| v.generation == top_gen);
        let top = tops.next().expect("maximum exists");
        if tops.next().is_some() || top_gen == 0 {
            return Ok(false);
        }
        let mut rest: Vec<&VertexId> = vertices.iter().filter(|v| *v != top).collect();
        rest.sort();
        if self.is_explicit(top_gen) {
            let mut ids: Vec<usize> = rest
                .iter()
                .map(|v| self.global_id(v).map(|g| g as usize))
                .collect::<Option<_>>()
                .ok_or_else(|| Error::InvalidArgument("vertex index out of range".into()))?;
            ids.sort_unstable();
            let bit = lex_rank(self.offsets[top_gen] as usize, &ids);
            return Ok(top.index.bit(bit as u64));
        }
        let mut key = Vec::new();
        top.encode(&mut key);
        for v in rest {
            v.encode(&mut key);
        }
        Ok(Keyed::new(seed, domain::EDGE_COIN).word(&key) & 1 == 1)
    }

    /// Confirms that every pattern over every subset `D ⊆ V_ℓ` is realized
    /// by some vertex of `A_{ℓ+1}`.
    pub fn check_alice(&self, generation: usize, budget: u64) -> Result<bool> {
        if generation + 1 > self.explicit_gens {
            return invalid(format!(
                "generation {} is not explicit (explicit up to {})",
                generation + 1,
                self.explicit_gens
            ));
        }
        let v = self.explicit_total(generation).expect("explicit") as usize;
        let next = 1u64 << self.bits[generation + 1];
        let cost = (1u128 << v.min(127)) * next as u128 * self.bits[generation + 1].max(1) as u128;
        if v >= 64 || cost > budget as u128 {
            return Err(Error::ResourceLimit {
                what: format!("Alice's restaurant check at generation {generation}"),
                required: cost.to_string(),
                limit: budget,
            });
        }
        let faces = subsets_of_size(v, self.k - 1);
        for d in 0u64..1 << v {
            // faces inside D, as bit positions in an A_{ℓ+1} index
            let inside: Vec<usize> = faces
                .iter()
                .enumerate()
                .filter(|(_, f)| f.iter().all(|&x| d >> x & 1 == 1))
                .map(|(i, _)| i)
                .collect();
            let mut seen = std::collections::HashSet::new();
            for a in 0..next {
                let pattern: u64 = inside
                    .iter()
                    .enumerate()
                    .map(|(j, &bit)| (a >> bit & 1) << j)
                    .sum();
                seen.insert(pattern);
            }
            if seen.len() as u64 != 1 << inside.len() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Explicit generations with each vertex's `X`, plus all edges among
    /// explicit vertices.
    pub fn to_json(&self) -> Value {
        let mut generations = Vec::new();
        for g in 0..=self.explicit_gens {
            let vertices: Vec<Value> = (0..self.explicit_size(g).expect("explicit"))
                .map(|i| {
                    let v = VertexId {
                        generation: g,
                        index: BigUint::from(i),
                    };
                    json!({
                        "id": self.global_id(&v),
                        "index": i,
                        "x": self.x_set(&v).expect("explicit"),
                    })
                })
                .collect();
            generations.push(json!({"generation": g, "size": vertices.len(), "vertices": vertices}));
        }
        let mut edges = Vec::new();
        for g in 1..=self.explicit_gens {
            for i in 0..self.explicit_size(g).expect("explicit") {
                let v = VertexId {
                    generation: g,
                    index: BigUint::from(i),
                };
                let id = self.global_id(&v).expect("explicit");
                for mut d in self.x_set(&v).expect("explicit") {
                    d.push(id);
                    edges.push(d);
                }
            }
        }
        edges.sort();
        json!({
            "edges": edges,
            "explicit_generations": self.explicit_gens,
            "generations": generations,
            "k": self.k,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(k: usize, g: usize) -> u64 {
        match generation_size(k, g).unwrap() {
            GenerationSize::Exact(s) => s.to_u64().unwrap(),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn generation_sizes() {
        assert_eq!([exact(2, 0), exact(2, 1), exact(2, 2), exact(2, 3)], [1, 2, 8, 2048]);
        assert_eq!(cumulative_size(2, 2).unwrap(), Some(BigUint::from(11u32)));
        assert_eq!([exact(3, 1), exact(3, 2), exact(3, 3)], [1, 2, 64]);
        assert_eq!(cumulative_size(3, 2).unwrap(), Some(BigUint::from(4u32)));
        assert_eq!(exact(5, 0), 1);
        assert!(matches!(generation_size(2, 4).unwrap(), GenerationSize::Exact(_)));
        assert!(matches!(generation_size(2, 5).unwrap(), GenerationSize::PowerOfTwo(_)));
        assert_eq!(generation_size(2, 6).unwrap(), GenerationSize::Unrepresentable);
    }

    #[test]
    fn explicit_edges() {
        let r = RadoHypergraph::new(2, 2).unwrap();
        let v0 = r.vertex(0, 0u32).unwrap();
        let empty = r.vertex(1, 0u32).unwrap();
        let full = r.vertex(1, 1u32).unwrap();
        assert!(r.has_edge(&[full.clone(), v0.clone()], 0).unwrap());
        assert!(!r.has_edge(&[empty.clone(), v0.clone()], 0).unwrap());
        assert!(!r.has_edge(&[empty.clone(), full.clone()], 0).unwrap());
        assert!(r.has_edge(&[v0.clone(), v0], 0).is_err());
        assert!(r.vertex(1, 2u32).is_err());
        assert_eq!(r.x_set(&full).unwrap(), vec![vec![0]]);
    }

    #[test]
    fn all_pairs_of_v2_match_x_membership() {
        let r = RadoHypergraph::new(2, 2).unwrap();
        let mut classified = 0;
        for a in 0..11u64 {
            for b in a + 1..11 {
                let (va, vb) = (r.from_global(a).unwrap(), r.from_global(b).unwrap());
                let direct = if va.generation < vb.generation {
                    r.x_set(&vb).unwrap().contains(&vec![a])
                } else {
                    false
                };
                assert_eq!(r.has_edge(&[va, vb], 3).unwrap(), direct);
                classified += 1;
            }
        }
        assert_eq!(classified, 55);
    }

    #[test]
    fn lazy_coins_are_stable() {
        let r = RadoHypergraph::new(2, 2).unwrap();
        let s = Keyed::new(1, domain::VERTEX_INDEX);
        let a = r.random_vertex(7, &s, &[0]).unwrap();
        let b = r.random_vertex(3, &s, &[1]).unwrap();
        let e1 = r.has_edge(&[a.clone(), b.clone()], 9).unwrap();
        let e2 = r.has_edge(&[b, a], 9).unwrap();
        assert_eq!(e1, e2);
        let big = r.random_vertex(4, &s, &[2]).unwrap();
        assert!(big.index.bits() <= 2059);
    }

    #[test]
    fn alice() {
        assert!(RadoHypergraph::new(2, 2).unwrap().check_alice(0, 1 << 20).unwrap());
        assert!(RadoHypergraph::new(2, 2).unwrap().check_alice(1, 1 << 20).unwrap());
        let r3 = RadoHypergraph::new(3, 3).unwrap();
        assert!(r3.check_alice(1, 1 << 20).unwrap());
        assert!(r3.check_alice(2, 1 << 20).unwrap());
        assert!(r3.check_alice(3, 1 << 20).is_err());
        assert!(matches!(r3.check_alice(2, 10), Err(Error::ResourceLimit { .. })));
    }
}
