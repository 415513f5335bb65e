//! Exact `μ_n` for step hypergraphons.
//!
//! Cell assignments `P_{<k}(n) → [m]` are enumerated in parallel. For each
//! assignment the `k`-sets are conditionally independent, so the product of
//! their type distributions is expanded depth first. All masses are integer
//! numerators over the common denominator `D_g^{|P_{<k}(n)|} · D_t^{C(n,k)}`
//! where `D_g` and `D_t` are the least common denominators of the grid and
//! table weights.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use rayon::prelude::*;

use super::{quotient_to_f64, FiniteMeasure};
use crate::error::{invalid, Error, Result};
use crate::hypergraphon::StepHypergraphon;
use crate::types::{FiniteStructure, QfType, SubsetIndex, TypeSpace};

/// Default limit on elementary operations for exact enumeration.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// `μ_n` as integer numerators over a common denominator, keyed by the
/// types of the `k`-subsets of `[n]` in lexicographic order.
#[derive(Debug, Clone)]
pub struct ExactDistribution {
    space: TypeSpace,
    n: usize,
    denominator: BigUint,
    atoms: Vec<(Vec<QfType>, BigUint)>,
}

impl ExactDistribution {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn denominator(&self) -> &BigUint {
        &self.denominator
    }

    /// Atoms sorted by type vector, with their numerators.
    pub fn atoms(&self) -> &[(Vec<QfType>, BigUint)] {
        &self.atoms
    }

    pub fn support_len(&self) -> usize {
        self.atoms.len()
    }

    pub fn probability(&self, types: &[QfType]) -> BigRational {
        let num = self
            .atoms
            .binary_search_by(|(t, _)| t.as_slice().cmp(types))
            .map(|i| self.atoms[i].1.clone())
            .unwrap_or_default();
        BigRational::new(BigInt::from(num), BigInt::from(self.denominator.clone()))
    }

    pub fn entropy_bits(&self) -> f64 {
        super::entropy_of_probabilities(self.atoms.iter().map(|(_, num)| quotient_to_f64(num, &self.denominator)))
    }

    /// The measure on structures.
    pub fn to_measure(&self) -> Result<FiniteMeasure<FiniteStructure>> {
        let den = BigInt::from(self.denominator.clone());
        let atoms = self
            .atoms
            .iter()
            .map(|(types, num)| {
                let m = FiniteStructure::from_type_vector(&self.space, self.n, types)?;
                Ok((m, BigRational::new(BigInt::from(num.clone()), den.clone())))
            })
            .collect::<Result<Vec<_>>>()?;
        FiniteMeasure::new(atoms)
    }
}

/// Operations needed by the exact enumeration:
/// `m^{|P_{<k}(n)|} · s^{C(n,k)} · C(n,k)` with `s` the largest support.
pub fn exact_budget(w: &StepHypergraphon, n: usize) -> BigUint {
    let index = SubsetIndex::new(n, w.k());
    let below = index.below().len() as u32;
    let ksets = index.exactly().len() as u32;
    BigUint::from(w.grid().m()).pow(below) * BigUint::from(w.max_support()).pow(ksets) * BigUint::from(ksets.max(1))
}

fn check_budget(w: &StepHypergraphon, n: usize, budget: u64) -> Result<()> {
    let required = exact_budget(w, n);
    if required > BigUint::from(budget) {
        return Err(Error::ResourceLimit {
            what: format!("exact enumeration of mu_{n}"),
            required: required.to_string(),
            limit: budget,
        });
    }
    Ok(())
}

/// Packs a type vector into words, `bits` bits per type.
struct Packer {
    bits: usize,
}

impl Packer {
    fn words(&self, count: usize) -> usize {
        (count * self.bits).div_ceil(64).max(1)
    }

    fn set(&self, key: &mut [u64], slot: usize, t: QfType) {
        if self.bits == 0 {
            return;
        }
        let start = slot * self.bits;
        let mask = if self.bits == 64 { u64::MAX } else { (1u64 << self.bits) - 1 };
        let (w, off) = (start / 64, start % 64);
        key[w] &= !(mask << off);
        key[w] |= (t.index() & mask) << off;
        if off + self.bits > 64 {
            let spill = off + self.bits - 64;
            key[w + 1] &= !((1u64 << spill) - 1);
            key[w + 1] |= t.index() >> (self.bits - spill);
        }
    }

    fn get(&self, key: &[u64], slot: usize) -> QfType {
        if self.bits == 0 {
            return QfType::from_index(0);
        }
        let start = slot * self.bits;
        let mask = if self.bits == 64 { u64::MAX } else { (1u64 << self.bits) - 1 };
        let (w, off) = (start / 64, start % 64);
        let mut v = key[w] >> off;
        if off + self.bits > 64 {
            v |= key[w + 1] << (64 - off);
        }
        QfType::from_index(v & mask)
    }
}

struct Plan<'a> {
    w: &'a StepHypergraphon,
    below: usize,
    // for each k-set, positions in P_{<k}(n) of its coordinate images
    coord_pos: Vec<Vec<usize>>,
    grid_num: Vec<BigUint>,
    table_num: Vec<Vec<(QfType, BigUint)>>,
    packer: Packer,
}

impl Plan<'_> {
    fn accumulate(&self, assignment: u64, acc: &mut HashMap<Vec<u64>, BigUint>) {
        let m = self.w.grid().m() as u64;
        let mut cells = vec![0usize; self.below];
        let mut rest = assignment;
        for c in cells.iter_mut().rev() {
            *c = (rest % m) as usize;
            rest /= m;
        }
        let weight: BigUint = cells.iter().map(|&c| &self.grid_num[c]).product();
        let entries: Vec<usize> = self
            .coord_pos
            .iter()
            .map(|pos| pos.iter().fold(0, |acc, &p| acc * m as usize + cells[p]))
            .collect();
        let mut key = vec![0u64; self.packer.words(entries.len())];
        self.expand(&entries, 0, weight, &mut key, acc);
    }

    fn expand(&self, entries: &[usize], slot: usize, weight: BigUint, key: &mut Vec<u64>, acc: &mut HashMap<Vec<u64>, BigUint>) {
        if slot == entries.len() {
            match acc.get_mut(key.as_slice()) {
                Some(v) => *v += weight,
                None => {
                    acc.insert(key.clone(), weight);
                }
            }
            return;
        }
        let atoms = &self.table_num[entries[slot]];
        if let [(t, num)] = atoms.as_slice() {
            self.packer.set(key, slot, *t);
            self.expand(entries, slot + 1, weight * num, key, acc);
            return;
        }
        for (t, num) in atoms {
            self.packer.set(key, slot, *t);
            self.expand(entries, slot + 1, &weight * num, key, acc);
        }
    }
}

fn merge(mut a: HashMap<Vec<u64>, BigUint>, mut b: HashMap<Vec<u64>, BigUint>) -> HashMap<Vec<u64>, BigUint> {
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    for (k, v) in b {
        *a.entry(k).or_default() += v;
    }
    a
}

/// Exact `μ_n` under an explicit operation budget.
pub fn exact_distribution(w: &StepHypergraphon, n: usize, budget: u64) -> Result<ExactDistribution> {
    w.require_coherent()?;
    let k = w.k();
    if n < k {
        return invalid(format!("n = {n} is smaller than k = {k}"));
    }
    check_budget(w, n, budget)?;
    let index = SubsetIndex::new(n, k);
    let coord_pos: Vec<Vec<usize>> = index
        .exactly()
        .iter()
        .map(|j| {
            w.coordinates()
                .iter()
                .map(|f| {
                    let image: Vec<usize> = f.iter().map(|&i| j[i]).collect();
                    index.position_below(&image).expect("proper subset of J")
                })
                .collect()
        })
        .collect();
    let dg = w.grid().common_denominator();
    let dt = w.table_denominator();
    let to_num = |r: &BigRational, d: &BigUint| -> BigUint {
        let scaled = r * BigRational::from_integer(BigInt::from(d.clone()));
        scaled.to_integer().to_biguint().expect("weights are non-negative")
    };
    let grid_num = w.grid().weights().iter().map(|r| to_num(r, &dg)).collect();
    let table_num = w
        .table()
        .iter()
        .map(|d| d.atoms().iter().map(|(t, p)| (*t, to_num(p, &dt))).collect())
        .collect();
    let plan = Plan {
        w,
        below: index.below().len(),
        coord_pos,
        grid_num,
        table_num,
        packer: Packer {
            bits: w.space().bits(),
        },
    };
    let assignments = (w.grid().m() as u64)
        .checked_pow(plan.below as u32)
        .ok_or_else(|| Error::ResourceLimit {
            what: format!("exact enumeration of mu_{n}"),
            required: format!("{}^{}", w.grid().m(), plan.below),
            limit: budget,
        })?;
    let acc = (0..assignments)
        .into_par_iter()
        .fold(HashMap::new, |mut acc, a| {
            plan.accumulate(a, &mut acc);
            acc
        })
        .reduce(HashMap::new, merge);
    let ksets = index.exactly().len();
    let mut atoms: Vec<(Vec<QfType>, BigUint)> = acc
        .into_iter()
        .map(|(key, num)| ((0..ksets).map(|s| plan.packer.get(&key, s)).collect(), num))
        .collect();
    atoms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    let denominator = dg.pow(plan.below as u32) * dt.pow(ksets as u32);
    debug_assert_eq!(atoms.iter().map(|(_, v)| v).sum::<BigUint>(), denominator);
    Ok(ExactDistribution {
        space: w.space().clone(),
        n,
        denominator,
        atoms,
    })
}

/// `μ_n` as a measure on structures, under the default budget.
pub fn exact_mu_n(w: &StepHypergraphon, n: usize) -> Result<FiniteMeasure<FiniteStructure>> {
    exact_mu_n_with_budget(w, n, DEFAULT_BUDGET)
}

pub fn exact_mu_n_with_budget(w: &StepHypergraphon, n: usize, budget: u64) -> Result<FiniteMeasure<FiniteStructure>> {
    exact_distribution(w, n, budget)?.to_measure()
}

/// `h(μ_n)` in bits, under the default budget.
pub fn exact_entropy(w: &StepHypergraphon, n: usize) -> Result<f64> {
    exact_entropy_with_budget(w, n, DEFAULT_BUDGET)
}

pub fn exact_entropy_with_budget(w: &StepHypergraphon, n: usize, budget: u64) -> Result<f64> {
    Ok(exact_distribution(w, n, budget)?.entropy_bits())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraphon::{make_constant, make_er, make_triangle, TypeDistribution};
    use crate::types::Signature;
    use num_traits::Zero;
    use std::sync::Arc;

    fn er(k: usize) -> StepHypergraphon {
        make_er(Arc::new(Signature::hypergraph(k)), k).unwrap()
    }

    #[test]
    fn packer_round_trip() {
        for bits in [0usize, 1, 2, 6, 7, 24] {
            let p = Packer { bits };
            let count = 23;
            let mut key = vec![0u64; p.words(count)];
            let vals: Vec<u64> = (0..count as u64).map(|i| if bits == 0 { 0 } else { (i * 2654435761) % (1 << bits) }).collect();
            for (s, &v) in vals.iter().enumerate() {
                p.set(&mut key, s, QfType::from_index(v));
            }
            for (s, &v) in vals.iter().enumerate() {
                assert_eq!(p.get(&key, s).index(), v, "bits {bits} slot {s}");
            }
        }
    }

    #[test]
    fn er_three_vertices() {
        let w = er(2);
        let d = exact_distribution(&w, 3, DEFAULT_BUDGET).unwrap();
        assert_eq!(d.support_len(), 8);
        let eighth = BigRational::new(1.into(), 8.into());
        let (top, bot) = (w.space().top(), w.space().bottom());
        assert_eq!(d.probability(&[top, bot, top]), eighth);
        assert!(d.probability(&[QfType::from_index(1), bot, bot]).is_zero());
        assert_eq!(d.entropy_bits(), 3.0);
        assert_eq!(exact_entropy(&w, 4).unwrap(), 6.0);
    }

    #[test]
    fn triangle_three_vertices() {
        let w = make_triangle().unwrap();
        let d = exact_distribution(&w, 3, DEFAULT_BUDGET).unwrap();
        assert_eq!(d.probability(&[w.space().top()]), BigRational::new(1.into(), 8.into()));
        assert!((d.entropy_bits() - 0.5436).abs() < 1e-4);
    }

    #[test]
    fn point_mass_and_budget() {
        let w = er(2);
        let space = w.space().clone();
        let top = make_constant(space.clone(), TypeDistribution::point(space.top())).unwrap();
        let mu = exact_mu_n(&top, 4).unwrap();
        assert_eq!(mu.support_len(), 1);
        assert_eq!(mu.atoms().next().unwrap().0.relation(0).len(), 12);
        let err = exact_entropy_with_budget(&w, 6, 1000).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit { .. }));
        assert!(err.to_string().contains("491520"), "{err}");
    }
}
