use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Grid, StepHypergraphon, TypeDistribution};
use crate::error::{invalid, Result};
use crate::prf::{domain, Keyed};
use crate::types::{QfType, TypeSpace};

/// A random coherent step hypergraphon on `m` cells.
///
/// For every `Sym(k)`-orbit of cell vectors a representative `c` receives a
/// distribution that is a mixture of at most `max_orbits` orbits of types
/// under the stabilizer of `c`, each spread uniformly; the rest of the orbit
/// is filled in by the action. Weights are small integers, so the table has
/// small denominators.
pub fn random_coherent(space: &TypeSpace, m: usize, max_orbits: usize, seed: u64) -> Result<StepHypergraphon> {
    if max_orbits == 0 {
        return invalid("max_orbits must be positive");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(Keyed::new(seed, domain::RANDOM_W).word(&[m as u64]));
    let grid = if m == 1 {
        Grid::uniform(1)?
    } else {
        let raw: Vec<u64> = (0..m).map(|_| rng.random_range(1..=4)).collect();
        let total: u64 = raw.iter().sum();
        Grid::new(raw.iter().map(|&r| ratio(r, total)).collect())?
    };
    let types = space.enumerate()?;
    let nperms = space.permutations().len();
    // a shell with a placeholder table gives the coordinate action
    let placeholder = TypeDistribution::point(space.bottom());
    let shell = StepHypergraphon::unvalidated(
        space.clone(),
        grid.clone(),
        vec![placeholder; m.pow((1u32 << space.k()) - 1)],
    )?;
    let len = shell.table().len();
    let mut table: Vec<Option<TypeDistribution>> = vec![None; len];
    for idx in 0..len {
        if table[idx].is_some() {
            continue;
        }
        let cells = shell.cells_of(idx);
        let stabilizer: Vec<usize> = (0..nperms)
            .filter(|&s| shell.act_on_cells(s, &cells) == cells)
            .collect();
        let orbits = type_orbits(space, &types, &stabilizer);
        let count = rng.random_range(1..=max_orbits.min(orbits.len()));
        let chosen = sample(&mut rng, orbits.len(), count);
        let weights: Vec<u64> = (0..count).map(|_| rng.random_range(1..=3)).collect();
        let total: u64 = weights.iter().sum();
        let mut atoms = Vec::new();
        for (o, w) in chosen.iter().zip(&weights) {
            let orbit = &orbits[o];
            for &t in orbit {
                atoms.push((t, ratio(*w, total * orbit.len() as u64)));
            }
        }
        let d = TypeDistribution::new(atoms)?;
        for s in 0..nperms {
            let moved = shell.act_on_cells(s, &cells);
            let target = shell.cell_index(&moved)?;
            if table[target].is_none() {
                table[target] = Some(d.act_by_rank(space, s));
            }
        }
    }
    let table = table.into_iter().map(|d| d.expect("every orbit is filled")).collect();
    StepHypergraphon::new(space.clone(), grid, table)
}

fn type_orbits(space: &TypeSpace, types: &[QfType], group: &[usize]) -> Vec<Vec<QfType>> {
    let mut seen = vec![false; types.len()];
    let mut out = Vec::new();
    for &t in types {
        if seen[t.index() as usize] {
            continue;
        }
        let mut orbit: Vec<QfType> = group.iter().map(|&s| space.act_by_rank(s, t)).collect();
        orbit.sort();
        orbit.dedup();
        for u in &orbit {
            seen[u.index() as usize] = true;
        }
        out.push(orbit);
    }
    out
}

fn ratio(a: u64, b: u64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}
