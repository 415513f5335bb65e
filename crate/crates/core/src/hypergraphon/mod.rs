//! Step-function extended hypergraphons.
//!
//! A [`StepHypergraphon`] partitions `[0, 1)` into `m` cells with rational
//! masses and assigns a distribution over quantifier-free `k`-types to every
//! vector of cells indexed by `P_{<k}(k)` (shortlex order).

mod examples;
mod json;
mod random;

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{invalid, Error, Result};
use crate::prf::{Unit53, UNIT_BITS};
use crate::types::subsets::{image, SubsetIndex};
use crate::types::{QfType, TypeSpace};

pub use examples::{make_constant, make_er, make_half_half, make_triangle};
pub use random::random_coherent;

/// Smallest `t` with `x < t/2^53` for every `x` with `x ≤ value`, i.e.
/// `ceil(value · 2^53)`. A raw 53-bit uniform `u` satisfies
/// `u / 2^53 < value` exactly when `u < threshold(value)`.
pub(crate) fn unit_threshold(value: &BigRational) -> u64 {
    let scaled = value * BigRational::from_integer(BigInt::one() << UNIT_BITS);
    let t = scaled.ceil().to_integer();
    t.to_u64().unwrap_or(u64::MAX)
}

fn cumulative_thresholds<'a>(weights: impl Iterator<Item = &'a BigRational>) -> Vec<u64> {
    let mut acc = BigRational::zero();
    let mut out = Vec::new();
    for w in weights {
        acc += w;
        out.push(unit_threshold(&acc));
    }
    out
}

/// Index of the first threshold exceeding `u`.
fn lookup(thresholds: &[u64], u: Unit53) -> usize {
    thresholds.partition_point(|&t| t <= u.raw()).min(thresholds.len() - 1)
}

/// Index of the first cumulative weight exceeding `u`, compared exactly.
fn lookup_exact<'a>(weights: impl Iterator<Item = &'a BigRational>, u: f64) -> Result<usize> {
    let u = BigRational::from_float(u)
        .filter(|u| !u.is_negative() && *u < BigRational::one())
        .ok_or_else(|| Error::InvalidArgument(format!("{u} is not in [0, 1)")))?;
    let mut acc = BigRational::zero();
    let mut last = 0;
    for (i, w) in weights.enumerate() {
        acc += w;
        last = i;
        if acc > u {
            return Ok(i);
        }
    }
    Ok(last)
}

/// A partition of `[0, 1)` into consecutive intervals of rational mass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    weights: Vec<BigRational>,
    thresholds: Vec<u64>,
}

impl Grid {
    pub fn new(weights: Vec<BigRational>) -> Result<Self> {
        if weights.is_empty() {
            return invalid("a grid needs at least one cell");
        }
        if let Some(w) = weights.iter().find(|w| !w.is_positive()) {
            return invalid(format!("grid weight {w} is not positive"));
        }
        let total: BigRational = weights.iter().sum();
        if !total.is_one() {
            return invalid(format!("grid weights sum to {total}, not 1"));
        }
        let thresholds = cumulative_thresholds(weights.iter());
        Ok(Grid { weights, thresholds })
    }

    /// `m` cells of mass `1/m` each.
    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 {
            return invalid("a grid needs at least one cell");
        }
        let w = BigRational::new(BigInt::one(), BigInt::from(m));
        Grid::new(vec![w; m])
    }

    pub fn m(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    /// The cell containing `u`.
    pub fn cell_of(&self, u: Unit53) -> usize {
        lookup(&self.thresholds, u)
    }

    /// Least common denominator of the weights.
    pub fn common_denominator(&self) -> BigUint {
        common_denominator(self.weights.iter())
    }
}

pub(crate) fn common_denominator<'a>(values: impl Iterator<Item = &'a BigRational>) -> BigUint {
    values
        .map(|w| w.denom().magnitude().clone())
        .fold(BigUint::one(), |acc, d| acc.lcm(&d))
}

/// A probability distribution over quantifier-free types with rational
/// weights. Atoms are sorted by type index and have positive weight.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypeDistribution {
    atoms: Vec<(QfType, BigRational)>,
}

impl TypeDistribution {
    /// Merges repeated types and drops zero weights.
    pub fn new(atoms: impl IntoIterator<Item = (QfType, BigRational)>) -> Result<Self> {
        let mut atoms: Vec<(QfType, BigRational)> = atoms.into_iter().collect();
        if let Some((t, w)) = atoms.iter().find(|(_, w)| w.is_negative()) {
            return invalid(format!("negative weight {w} on type {t}"));
        }
        atoms.sort_by_key(|(t, _)| *t);
        let mut merged: Vec<(QfType, BigRational)> = Vec::with_capacity(atoms.len());
        for (t, w) in atoms {
            match merged.last_mut() {
                Some((last, acc)) if *last == t => *acc += w,
                _ => merged.push((t, w)),
            }
        }
        merged.retain(|(_, w)| !w.is_zero());
        let total: BigRational = merged.iter().map(|(_, w)| w).sum();
        if !total.is_one() {
            return invalid(format!("type weights sum to {total}, not 1"));
        }
        Ok(TypeDistribution { atoms: merged })
    }

    pub fn point(t: QfType) -> Self {
        TypeDistribution {
            atoms: vec![(t, BigRational::one())],
        }
    }

    pub fn uniform(types: &[QfType]) -> Result<Self> {
        if types.is_empty() {
            return invalid("uniform distribution over no types");
        }
        let w = BigRational::new(BigInt::one(), BigInt::from(types.len()));
        TypeDistribution::new(types.iter().map(|&t| (t, w.clone())))
    }

    pub fn atoms(&self) -> &[(QfType, BigRational)] {
        &self.atoms
    }

    pub fn weight(&self, t: QfType) -> BigRational {
        self.atoms
            .binary_search_by_key(&t, |(u, _)| *u)
            .map(|i| self.atoms[i].1.clone())
            .unwrap_or_else(|_| BigRational::zero())
    }

    pub fn support_len(&self) -> usize {
        self.atoms.len()
    }

    pub fn point_mass(&self) -> Option<QfType> {
        (self.atoms.len() == 1).then(|| self.atoms[0].0)
    }

    /// Pushforward along the action of the `s`-th permutation.
    pub fn act_by_rank(&self, space: &TypeSpace, s: usize) -> Self {
        let mut atoms: Vec<_> = self
            .atoms
            .iter()
            .map(|(t, w)| (space.act_by_rank(s, *t), w.clone()))
            .collect();
        atoms.sort_by_key(|(t, _)| *t);
        TypeDistribution { atoms }
    }

    /// Shannon entropy in bits.
    pub fn entropy_bits(&self) -> f64 {
        crate::entropy::entropy_of_probabilities(self.atoms.iter().map(|(_, w)| w.to_f64().unwrap_or(0.0)))
    }
}

/// A cell vector at which the coherence identity fails for a permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub sigma: Vec<usize>,
    pub cells: Vec<usize>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sigma={:?} cells={:?}", self.sigma, self.cells)
    }
}

/// A piecewise-constant extended hypergraphon.
#[derive(Debug, Clone)]
pub struct StepHypergraphon {
    space: TypeSpace,
    grid: Grid,
    coords: Vec<Vec<usize>>,
    // coord_perm[s][i]: position of σ_s(F_i) among the coordinates
    coord_perm: Vec<Vec<usize>>,
    table: Vec<TypeDistribution>,
    type_thresholds: Vec<Vec<u64>>,
    coherent: bool,
}

/// Largest table we are willing to materialize.
pub const MAX_TABLE_LEN: usize = 1 << 22;

impl StepHypergraphon {
    /// Builds a hypergraphon and rejects it if it is not coherent.
    pub fn new(space: TypeSpace, grid: Grid, table: Vec<TypeDistribution>) -> Result<Self> {
        let w = StepHypergraphon::unvalidated(space, grid, table)?;
        let violations = w.validate();
        if !violations.is_empty() {
            return Err(Error::Incoherent(violations));
        }
        Ok(w)
    }

    /// Builds a hypergraphon checking only shape, not coherence.
    pub fn unvalidated(space: TypeSpace, grid: Grid, table: Vec<TypeDistribution>) -> Result<Self> {
        let k = space.k();
        let coords = SubsetIndex::new(k, k).below().to_vec();
        let expected = table_len(grid.m(), coords.len())?;
        if table.len() != expected {
            return Err(Error::IncompleteTable(format!(
                "{} entries for {expected} cell vectors",
                table.len()
            )));
        }
        for d in &table {
            if let Some((t, _)) = d.atoms().iter().find(|(t, _)| !space.contains(*t)) {
                return invalid(format!("type index {} out of range", t.index()));
            }
        }
        let index = SubsetIndex::new(k, k);
        let coord_perm = space
            .permutations()
            .iter()
            .map(|sigma| {
                coords
                    .iter()
                    .map(|f| index.position(&image(sigma, f)).expect("image of a small set is small"))
                    .collect()
            })
            .collect();
        let type_thresholds = table
            .iter()
            .map(|d| cumulative_thresholds(d.atoms().iter().map(|(_, w)| w)))
            .collect();
        let mut w = StepHypergraphon {
            space,
            grid,
            coords,
            coord_perm,
            table,
            type_thresholds,
            coherent: false,
        };
        w.coherent = w.validate_limited(1).is_empty();
        Ok(w)
    }

    pub fn space(&self) -> &TypeSpace {
        &self.space
    }

    pub fn k(&self) -> usize {
        self.space.k()
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `P_{<k}(k)` in shortlex order; the coordinates of a cell vector.
    pub fn coordinates(&self) -> &[Vec<usize>] {
        &self.coords
    }

    pub fn table(&self) -> &[TypeDistribution] {
        &self.table
    }

    pub fn is_coherent(&self) -> bool {
        self.coherent
    }

    pub(crate) fn require_coherent(&self) -> Result<()> {
        if self.coherent {
            Ok(())
        } else {
            Err(Error::Incoherent(self.validate()))
        }
    }

    /// Mixed-radix index of a cell vector, first coordinate most
    /// significant.
    pub fn cell_index(&self, cells: &[usize]) -> Result<usize> {
        if cells.len() != self.coords.len() {
            return invalid(format!(
                "cell vector has {} coordinates, expected {}",
                cells.len(),
                self.coords.len()
            ));
        }
        let m = self.grid.m();
        if let Some(c) = cells.iter().find(|&&c| c >= m) {
            return invalid(format!("cell {c} out of range for m = {m}"));
        }
        Ok(cells.iter().fold(0, |acc, &c| acc * m + c))
    }

    pub fn cells_of(&self, mut index: usize) -> Vec<usize> {
        let m = self.grid.m();
        let mut out = vec![0; self.coords.len()];
        for slot in out.iter_mut().rev() {
            *slot = index % m;
            index /= m;
        }
        out
    }

    /// `σ · c`, with `(σ · c)[σ(F)] = c[F]`.
    pub fn act_on_cells(&self, sigma_rank: usize, cells: &[usize]) -> Vec<usize> {
        let mut out = vec![0; cells.len()];
        for (i, &c) in cells.iter().enumerate() {
            out[self.coord_perm[sigma_rank][i]] = c;
        }
        out
    }

    /// Every `(σ, c)` at which `W(σ · c) ≠ σ · W(c)`.
    pub fn validate(&self) -> Vec<Violation> {
        self.validate_limited(usize::MAX)
    }

    fn validate_limited(&self, limit: usize) -> Vec<Violation> {
        let mut out = Vec::new();
        for idx in 0..self.table.len() {
            let cells = self.cells_of(idx);
            for (s, sigma) in self.space.permutations().iter().enumerate() {
                let moved = self.act_on_cells(s, &cells);
                let target = moved.iter().fold(0, |acc, &c| acc * self.grid.m() + c);
                if self.table[target] != self.table[idx].act_by_rank(&self.space, s) {
                    out.push(Violation {
                        sigma: sigma.clone(),
                        cells: cells.clone(),
                    });
                    if out.len() >= limit {
                        return out;
                    }
                }
            }
        }
        out
    }

    pub fn evaluate(&self, cells: &[usize]) -> Result<&TypeDistribution> {
        Ok(&self.table[self.cell_index(cells)?])
    }

    #[cfg(test)]
    pub(crate) fn entry(&self, index: usize) -> &TypeDistribution {
        &self.table[index]
    }

    /// Inverse-CDF draw: the first type whose cumulative weight exceeds `u`.
    pub fn randomize(&self, cells: &[usize], u: f64) -> Result<QfType> {
        let d = self.evaluate(cells)?;
        let i = lookup_exact(d.atoms().iter().map(|(_, w)| w), u)?;
        Ok(d.atoms()[i].0)
    }

    /// [`randomize`](Self::randomize) for a 53-bit uniform and a table index.
    pub(crate) fn randomize_unit(&self, index: usize, u: Unit53) -> QfType {
        self.table[index].atoms()[lookup(&self.type_thresholds[index], u)].0
    }

    /// `∫ h(W) dλ` in bits.
    pub fn integral_entropy(&self) -> f64 {
        let w: Vec<f64> = self.grid.weights().iter().map(|w| w.to_f64().unwrap_or(0.0)).collect();
        (0..self.table.len())
            .map(|idx| {
                let mass: f64 = self.cells_of(idx).iter().map(|&c| w[c]).product();
                mass * self.table[idx].entropy_bits()
            })
            .sum()
    }

    /// True iff every output is a point mass and the table depends only on
    /// the singleton coordinates.
    pub fn induces_borel(&self) -> bool {
        if self.table.iter().any(|d| d.point_mass().is_none()) {
            return false;
        }
        (0..self.table.len()).all(|idx| {
            let mut cells = self.cells_of(idx);
            for (c, f) in cells.iter_mut().zip(&self.coords) {
                if f.len() != 1 {
                    *c = 0;
                }
            }
            let base = cells.iter().fold(0, |acc, &c| acc * self.grid.m() + c);
            self.table[base] == self.table[idx]
        })
    }

    /// Least common denominator of every table weight.
    pub fn table_denominator(&self) -> BigUint {
        common_denominator(self.table.iter().flat_map(|d| d.atoms().iter().map(|(_, w)| w)))
    }

    /// Largest support of any table entry.
    pub fn max_support(&self) -> usize {
        self.table.iter().map(TypeDistribution::support_len).max().unwrap_or(0)
    }
}

fn table_len(m: usize, coords: usize) -> Result<usize> {
    u32::try_from(coords)
        .ok()
        .and_then(|d| m.checked_pow(d))
        .filter(|&len| len <= MAX_TABLE_LEN)
        .ok_or_else(|| Error::ResourceLimit {
            what: "hypergraphon table".into(),
            required: format!("{m}^{coords}"),
            limit: MAX_TABLE_LEN as u64,
        })
}

pub use json::{hypergraphon_from_json, hypergraphon_to_json};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Signature;
    use std::sync::Arc;

    fn ratio(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(vec![ratio(1, 2), ratio(1, 3)]).is_err());
        assert!(Grid::new(vec![ratio(1, 1), ratio(0, 1)]).is_err());
        let g = Grid::new(vec![ratio(1, 3), ratio(2, 3)]).unwrap();
        assert_eq!(g.cell_of(Unit53::from_raw(0)), 0);
        assert_eq!(g.cell_of(Unit53::from_raw((1 << 53) - 1)), 1);
        assert_eq!(g.common_denominator(), BigUint::from(3u32));
    }

    #[test]
    fn thresholds_match_exact_comparison() {
        let w = [ratio(1, 3), ratio(1, 6), ratio(1, 2)];
        let th = cumulative_thresholds(w.iter());
        for raw in [0u64, 1, 3_002_399_751_580_330, 3_002_399_751_580_331, 4_503_599_627_370_495, 4_503_599_627_370_496, (1 << 53) - 1] {
            let u = Unit53::from_raw(raw);
            assert_eq!(lookup(&th, u), lookup_exact(w.iter(), u.to_f64()).unwrap(), "raw {raw}");
        }
    }

    #[test]
    fn incoherent_swap_pair_is_reported() {
        let space = TypeSpace::new(Arc::new(Signature::hypergraph(2)), 2).unwrap();
        let grid = Grid::uniform(2).unwrap();
        let (top, bot) = (space.top(), space.bottom());
        // coordinates (∅, {0}, {1}); cells (0,0,1) and (0,1,0) are swap images
        let mut table = vec![TypeDistribution::point(bot); 8];
        table[1] = TypeDistribution::point(top);
        let w = StepHypergraphon::unvalidated(space.clone(), grid.clone(), table.clone()).unwrap();
        assert!(!w.is_coherent());
        let v = w.validate();
        assert!(v.contains(&Violation { sigma: vec![1, 0], cells: vec![0, 0, 1] }));
        assert!(matches!(StepHypergraphon::new(space.clone(), grid.clone(), table), Err(Error::Incoherent(_))));
        assert!(matches!(
            StepHypergraphon::new(space, grid, vec![TypeDistribution::point(bot); 7]),
            Err(Error::IncompleteTable(_))
        ));
    }

    #[test]
    fn distribution_merges_and_checks() {
        let t = QfType::from_index;
        let d = TypeDistribution::new([(t(3), ratio(1, 4)), (t(0), ratio(1, 2)), (t(3), ratio(1, 4))]).unwrap();
        assert_eq!(d.support_len(), 2);
        assert_eq!(d.weight(t(3)), ratio(1, 2));
        assert!(TypeDistribution::new([(t(0), ratio(1, 2))]).is_err());
        assert!((TypeDistribution::uniform(&[t(0), t(1), t(2), t(3)]).unwrap().entropy_bits() - 2.0).abs() < 1e-12);
    }
}
