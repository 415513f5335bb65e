//! Sampling `G(n, W)` for step hypergraphons.
//!
//! Every set `D` of size at most `k` gets a uniform `ζ_D` computed by a
//! keyed hash of `D` alone, so the sample on `[n]` restricted to `[n-1]` is
//! exactly the sample on `[n-1]` with the same seed.

use crate::error::{invalid, Result};
use crate::hypergraphon::StepHypergraphon;
use crate::prf::{domain, encode_set, Keyed, Unit53};
use crate::types::subsets::subsets_of_size;
use crate::types::{FiniteStructure, QfType, SubsetIndex};

/// The uniforms and cells of one draw on `[n]`, with the cells of
/// `P_{<k}(n)` materialized up front.
#[derive(Debug, Clone)]
pub struct SampleContext<'a> {
    w: &'a StepHypergraphon,
    zeta: Keyed,
    index: SubsetIndex,
    cells: Vec<usize>,
}

impl<'a> SampleContext<'a> {
    pub fn new(w: &'a StepHypergraphon, n: usize, seed: u64) -> Result<Self> {
        w.require_coherent()?;
        if n < w.k() {
            return invalid(format!("n = {n} is smaller than k = {}", w.k()));
        }
        let zeta = Keyed::new(seed, domain::ZETA);
        let index = SubsetIndex::new(n, w.k());
        let cells = index
            .below()
            .iter()
            .map(|d| w.grid().cell_of(zeta.unit(&encode_set(d))))
            .collect();
        Ok(SampleContext { w, zeta, index, cells })
    }

    pub fn n(&self) -> usize {
        self.index.n()
    }

    /// `ζ_D` for a sorted set `D`.
    pub fn zeta(&self, set: &[usize]) -> Unit53 {
        self.zeta.unit(&encode_set(set))
    }

    /// Cells of `P_{<k}(n)` in shortlex order.
    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    /// The cell vector `ĉ_J` for a sorted `k`-set `J`.
    pub fn cell_vector(&self, set: &[usize]) -> Vec<usize> {
        self.w
            .coordinates()
            .iter()
            .map(|f| {
                let image: Vec<usize> = f.iter().map(|&i| set[i]).collect();
                self.cells[self.index.position_below(&image).expect("proper subset of J")]
            })
            .collect()
    }

    pub fn type_of(&self, set: &[usize]) -> QfType {
        let cells = self.cell_vector(set);
        let m = self.w.grid().m();
        let idx = cells.iter().fold(0, |acc, &c| acc * m + c);
        self.w.randomize_unit(idx, self.zeta(set))
    }

    /// Types of all `k`-sets in lexicographic order.
    pub fn types(&self) -> Vec<QfType> {
        subsets_of_size(self.n(), self.w.k())
            .iter()
            .map(|j| self.type_of(j))
            .collect()
    }
}

/// Types of all `k`-subsets of a sample of `G(n, W)`.
pub fn sample_types(w: &StepHypergraphon, n: usize, seed: u64) -> Result<Vec<QfType>> {
    Ok(SampleContext::new(w, n, seed)?.types())
}

/// A sample of `G(n, W)`, deterministic in `(W, n, seed)`.
pub fn sample(w: &StepHypergraphon, n: usize, seed: u64) -> Result<FiniteStructure> {
    let types = sample_types(w, n, seed)?;
    FiniteStructure::from_type_vector(w.space(), n, &types)
}

/// Whether the sample on `[n]` restricts to the sample on `[n-1]`.
pub fn sample_restriction_consistency(w: &StepHypergraphon, n: usize, seed: u64) -> Result<bool> {
    if n < w.k() + 1 {
        return invalid(format!("n = {n} must exceed k = {}", w.k()));
    }
    let big = sample(w, n, seed)?;
    let small = sample(w, n - 1, seed)?;
    Ok(big.restrict(n - 1)? == small)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraphon::{make_constant, make_er, make_triangle, TypeDistribution};
    use crate::types::{Signature, TypeSpace};
    use std::sync::Arc;

    fn er(k: usize) -> StepHypergraphon {
        make_er(Arc::new(Signature::hypergraph(k)), k).unwrap()
    }

    #[test]
    fn point_masses_give_fixed_structures() {
        let space = TypeSpace::new(Arc::new(Signature::hypergraph(2)), 2).unwrap();
        let bot = make_constant(space.clone(), TypeDistribution::point(space.bottom())).unwrap();
        let m = sample(&bot, 5, 3).unwrap();
        assert!(m.relation(0).is_empty());
        let top = make_constant(space.clone(), TypeDistribution::point(space.top())).unwrap();
        let m = sample(&top, 4, 3).unwrap();
        assert_eq!(m.relation(0).len(), 12);
        assert!(m.is_non_redundant());
    }

    #[test]
    fn deterministic_and_projective() {
        let w = er(2);
        assert_eq!(sample(&w, 7, 1).unwrap(), sample(&w, 7, 1).unwrap());
        assert!(sample_restriction_consistency(&w, 6, 42).unwrap());
        assert!(sample_restriction_consistency(&make_triangle().unwrap(), 5, 7).unwrap());
        assert!(sample(&w, 1, 0).is_err());
    }

    #[test]
    fn er_edge_frequency() {
        let w = er(2);
        let seeds = 10_000u64;
        let hits = (0..seeds)
            .filter(|&s| SampleContext::new(&w, 100, s).unwrap().type_of(&[0, 1]) == w.space().top())
            .count();
        let p = hits as f64 / seeds as f64;
        assert!((p - 0.5).abs() <= 3.0 * 0.005, "frequency {p}");
    }
}
