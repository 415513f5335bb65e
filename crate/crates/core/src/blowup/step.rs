use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::BlowupSchedule;
use crate::error::{invalid, Result};
use crate::hypergraphon::{Grid, StepHypergraphon, TypeDistribution};
use crate::rado::RadoHypergraph;
use crate::types::{Signature, SubsetIndex, TypeSpace};

/// At most this many explicit vertices get their own cell.
const MAX_CELLS: u64 = 16;

/// The blow-up restricted to the explicit vertices `V_{gen_cap}` as a step
/// hypergraphon. Cell `v` is the interval of the vertex with global id `v`;
/// one extra cell collects the rest of `[0, 1]` and is isolated.
pub fn truncated_step_form(sched: &BlowupSchedule, rado: &RadoHypergraph, gen_cap: usize) -> Result<StepHypergraphon> {
    let k = sched.k();
    if rado.k() != k {
        return invalid(format!("schedule has k = {k} but the Rado hypergraph has k = {}", rado.k()));
    }
    if !rado.is_explicit(gen_cap) || gen_cap as u64 >= sched.generations() {
        return invalid(format!(
            "generation {gen_cap} is not explicit (explicit up to {})",
            rado.explicit_gens()
        ));
    }
    let total = rado.explicit_total(gen_cap).expect("explicit");
    if total > MAX_CELLS {
        return invalid(format!("{total} explicit vertices exceed the limit of {MAX_CELLS}"));
    }
    let vertices: Vec<_> = (0..total).map(|id| rado.from_global(id).expect("explicit id")).collect();
    let mut weights = Vec::with_capacity(total as usize + 1);
    for v in &vertices {
        let size = rado.explicit_size(v.generation).expect("explicit");
        weights.push(sched.effective_alpha(v.generation as u64) / BigRational::from_integer(size.into()));
    }
    let used: BigRational = weights.iter().sum();
    weights.push(BigRational::one() - used);
    debug_assert!(weights.last().is_some_and(|w| *w > BigRational::zero()));
    let grid = Grid::new(weights)?;
    let m = grid.m();
    let space = TypeSpace::new(Arc::new(Signature::hypergraph(k)), k)?;
    let bottom = TypeDistribution::point(space.bottom());
    let top = TypeDistribution::point(space.top());
    let coordinates = SubsetIndex::new(k, k).below().to_vec();
    // positions of the singleton coordinates {0}, …, {k-1}
    let singles: Vec<usize> = (0..coordinates.len()).filter(|&i| coordinates[i].len() == 1).collect();
    let len = m.pow(coordinates.len() as u32);
    let mut table = Vec::with_capacity(len);
    for idx in 0..len {
        // first coordinate is the most significant digit
        let digit = |pos: usize| idx / m.pow((coordinates.len() - 1 - pos) as u32) % m;
        let chosen: Vec<usize> = singles.iter().map(|&i| digit(i)).collect();
        let isolated = chosen.iter().any(|&c| c as u64 == total)
            || chosen.iter().enumerate().any(|(i, c)| chosen[i + 1..].contains(c));
        let edge = !isolated && {
            let images: Vec<_> = chosen.iter().map(|&c| vertices[c].clone()).collect();
            rado.has_edge(&images, 0)?
        };
        table.push(if edge { top.clone() } else { bottom.clone() });
    }
    StepHypergraphon::new(space, grid, table)
}
