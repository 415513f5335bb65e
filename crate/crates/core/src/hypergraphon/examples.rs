use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{Grid, StepHypergraphon, TypeDistribution};
use crate::error::{Error, Result};
use crate::types::{Signature, TypeSpace};

fn single_relation_space(signature: Arc<Signature>, k: usize) -> Result<TypeSpace> {
    if signature.relations().len() != 1 || signature.uniform_arity() != Some(k) {
        return Err(Error::UnsupportedSignature(format!(
            "expected exactly one relation of arity {k} and no functions"
        )));
    }
    TypeSpace::new(signature, k)
}

fn constant_table(space: &TypeSpace, grid: &Grid, d: &TypeDistribution) -> Vec<TypeDistribution> {
    let len = grid.m().pow((1u32 << space.k()) - 1);
    vec![d.clone(); len]
}

/// The Erdős–Rényi hypergraphon: every `k`-set is an edge with probability
/// one half, independently.
pub fn make_er(signature: Arc<Signature>, k: usize) -> Result<StepHypergraphon> {
    let space = single_relation_space(signature, k)?;
    let d = TypeDistribution::uniform(&[space.bottom(), space.top()])?;
    make_constant(space, d)
}

/// A hypergraphon whose output does not depend on its arguments.
pub fn make_constant(space: TypeSpace, d: TypeDistribution) -> Result<StepHypergraphon> {
    let grid = Grid::uniform(1)?;
    let table = constant_table(&space, &grid, &d);
    StepHypergraphon::new(space, grid, table)
}

/// The 3-uniform hypergraphon that makes a triple an edge iff all three of
/// its pairs fall in the lower half of the unit interval.
pub fn make_triangle() -> Result<StepHypergraphon> {
    let space = TypeSpace::new(Arc::new(Signature::hypergraph(3)), 3)?;
    let grid = Grid::uniform(2)?;
    let coords = crate::types::SubsetIndex::new(3, 3).below().to_vec();
    let len = 2usize.pow(coords.len() as u32);
    let table = (0..len)
        .map(|idx| {
            let all_low = coords
                .iter()
                .enumerate()
                .filter(|(_, f)| f.len() == 2)
                .all(|(i, _)| idx >> (coords.len() - 1 - i) & 1 == 0);
            TypeDistribution::point(if all_low { space.top() } else { space.bottom() })
        })
        .collect();
    StepHypergraphon::new(space, grid, table)
}

/// Complete structure when the empty-set coordinate is below one half,
/// empty structure otherwise.
pub fn make_half_half(signature: Arc<Signature>, k: usize) -> Result<StepHypergraphon> {
    let space = single_relation_space(signature, k)?;
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let grid = Grid::new(vec![half.clone(), half])?;
    let coords = (1usize << k) - 1;
    let len = 2usize.pow(coords as u32);
    let table = (0..len)
        .map(|idx| {
            // the empty set is the most significant coordinate
            let low = idx >> (coords - 1) & 1 == 0;
            TypeDistribution::point(if low { space.top() } else { space.bottom() })
        })
        .collect();
    StepHypergraphon::new(space, grid, table)
}
