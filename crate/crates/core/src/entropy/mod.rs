//! Shannon entropy of finite distributions, exact and Monte Carlo entropy
//! functions of step hypergraphons, and the uniform non-redundant measure.

mod curve;
mod exact;
mod mc;

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::types::ArityProfile;

pub use curve::{entropy_curve, max_entropy_check, CurvePoint, EntropyCurve, Method};
pub use exact::{
    exact_budget, exact_distribution, exact_entropy, exact_entropy_with_budget, exact_mu_n,
    exact_mu_n_with_budget, ExactDistribution, DEFAULT_BUDGET,
};
pub use mc::{
    bootstrap_stderr, estimate_from_keys, mc_entropy, mc_entropy_with, miller_madow, McConfig, McEstimate,
};

/// `-Σ p log₂ p`, skipping zero probabilities. No normalization check.
pub fn entropy_of_probabilities(probs: impl IntoIterator<Item = f64>) -> f64 {
    let h: f64 = probs
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum();
    // a point mass gives -0.0
    h.max(0.0)
}

/// Entropy in bits of an exact probability vector; fails unless the
/// probabilities are non-negative and sum to one.
pub fn entropy(probs: &[BigRational]) -> Result<f64> {
    if probs.iter().any(Signed::is_negative) {
        return Err(Error::InvalidArgument("negative probability".into()));
    }
    let total: BigRational = probs.iter().sum();
    if !total.is_one() {
        return Err(Error::InvalidArgument(format!("probabilities sum to {total}, not 1")));
    }
    Ok(entropy_of_probabilities(probs.iter().map(ratio_to_f64)))
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(0.0)
}

/// `num / den` as a float without reducing the fraction first.
pub(crate) fn quotient_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    BigRational::new_raw(BigInt::from(num.clone()), BigInt::from(den.clone()))
        .to_f64()
        .unwrap_or(0.0)
}

/// A finitely supported probability measure with exact rational masses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMeasure<S: Ord> {
    atoms: BTreeMap<S, BigRational>,
}

impl<S: Ord + Clone> FiniteMeasure<S> {
    /// Merges repeated atoms and drops zero masses; the total must be one.
    pub fn new(atoms: impl IntoIterator<Item = (S, BigRational)>) -> Result<Self> {
        let mut map: BTreeMap<S, BigRational> = BTreeMap::new();
        for (s, p) in atoms {
            if p.is_negative() {
                return Err(Error::InvalidMeasure(format!("negative mass {p}")));
            }
            *map.entry(s).or_insert_with(BigRational::zero) += p;
        }
        map.retain(|_, p| !p.is_zero());
        let total: BigRational = map.values().sum();
        if !total.is_one() {
            return Err(Error::InvalidMeasure(format!("masses sum to {total}, not 1")));
        }
        Ok(FiniteMeasure { atoms: map })
    }

    pub fn point(s: S) -> Self {
        FiniteMeasure {
            atoms: BTreeMap::from([(s, BigRational::one())]),
        }
    }

    /// Uniform over the distinct elements of `support`.
    pub fn uniform(support: impl IntoIterator<Item = S>) -> Result<Self> {
        let set: Vec<S> = support
            .into_iter()
            .collect::<std::collections::BTreeSet<S>>()
            .into_iter()
            .collect();
        if set.is_empty() {
            return Err(Error::InvalidMeasure("uniform measure on an empty set".into()));
        }
        let p = BigRational::new(BigInt::one(), BigInt::from(set.len()));
        Ok(FiniteMeasure {
            atoms: set.into_iter().map(|s| (s, p.clone())).collect(),
        })
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&S, &BigRational)> {
        self.atoms.iter()
    }

    pub fn mass(&self, s: &S) -> BigRational {
        self.atoms.get(s).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn support_len(&self) -> usize {
        self.atoms.len()
    }

    pub fn entropy_bits(&self) -> f64 {
        entropy_of_probabilities(self.atoms.values().map(ratio_to_f64))
    }

    /// Image measure under `f`; masses of atoms with a common image add up.
    pub fn pushforward<T: Ord + Clone>(&self, mut f: impl FnMut(&S) -> Result<T>) -> Result<FiniteMeasure<T>> {
        let mut map: BTreeMap<T, BigRational> = BTreeMap::new();
        for (s, p) in &self.atoms {
            *map.entry(f(s)?).or_insert_with(BigRational::zero) += p;
        }
        Ok(FiniteMeasure { atoms: map })
    }
}

/// Entropy of the uniform non-redundant measure on `[n]`:
/// `Σ_{r ≤ n} C(n, r) · r! · a(r)` bits, an integer.
pub fn uniform_nr_entropy(profile: &ArityProfile, n: usize) -> BigUint {
    profile
        .iter()
        .filter(|&(r, _)| r <= n)
        .map(|(r, count)| {
            // C(n, r) · r! = n (n-1) ⋯ (n-r+1)
            let falling: BigUint = (n - r + 1..=n).map(BigUint::from).product();
            falling * count
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&[r(1, 1)]).unwrap(), 0.0);
        assert_eq!(entropy(&[r(1, 4), r(1, 4), r(1, 4), r(1, 4)]).unwrap(), 2.0);
        let h = entropy(&[r(1, 8), r(7, 8)]).unwrap();
        assert!((h - 0.5436).abs() < 1e-4, "{h}");
        assert!(entropy(&[r(1, 2)]).is_err());
        assert!(entropy(&[r(3, 2), r(-1, 2)]).is_err());
    }

    #[test]
    fn uniform_nr_examples() {
        let p = |s: &str| s.parse::<ArityProfile>().unwrap();
        assert_eq!(uniform_nr_entropy(&p("2:1"), 3), BigUint::from(6u32));
        assert_eq!(uniform_nr_entropy(&p("1:2,2:1"), 2), BigUint::from(6u32));
        assert_eq!(uniform_nr_entropy(&p("0:3,2:1"), 0), BigUint::from(3u32));
        assert_eq!(uniform_nr_entropy(&p("2:1"), 0), BigUint::zero());
        assert_eq!(uniform_nr_entropy(&p("1:0,2:1"), 4), BigUint::from(12u32));
    }

    #[test]
    fn measures() {
        let m = FiniteMeasure::new([(1, r(1, 2)), (2, r(1, 4)), (1, r(1, 4))]).unwrap();
        assert_eq!(m.mass(&1), r(3, 4));
        assert!(FiniteMeasure::new([(1, r(1, 2))]).is_err());
        let u = FiniteMeasure::uniform(0..8).unwrap();
        assert_eq!(u.entropy_bits(), 3.0);
        let halves = u.pushforward(|x| Ok(x % 2)).unwrap();
        assert_eq!(halves.entropy_bits(), 1.0);
        assert_eq!(FiniteMeasure::point("a").entropy_bits(), 0.0);
    }

    /// Chain rule, conditioning and subadditivity on a small joint law.
    #[test]
    fn joint_entropy_identities() {
        let joint = FiniteMeasure::new([
            ((0, 0), r(1, 2)),
            ((0, 1), r(1, 8)),
            ((1, 0), r(1, 8)),
            ((1, 1), r(1, 4)),
        ])
        .unwrap();
        let hx = joint.pushforward(|&(x, _)| Ok(x)).unwrap().entropy_bits();
        let hy = joint.pushforward(|&(_, y)| Ok(y)).unwrap().entropy_bits();
        let hxy = joint.entropy_bits();
        // H(Y | X) computed from the conditional laws
        let mut h_cond = 0.0;
        for x in 0..2 {
            let px: BigRational = joint.atoms().filter(|((a, _), _)| *a == x).map(|(_, p)| p.clone()).sum();
            let cond: Vec<BigRational> = joint
                .atoms()
                .filter(|((a, _), _)| *a == x)
                .map(|(_, p)| p / &px)
                .collect();
            h_cond += ratio_to_f64(&px) * entropy(&cond).unwrap();
        }
        assert!((hxy - (hx + h_cond)).abs() < 1e-12);
        assert!(h_cond <= hy + 1e-12);
        assert!(hxy <= hx + hy + 1e-12);
        let indep = FiniteMeasure::new([((0, 0), r(1, 4)), ((0, 1), r(1, 4)), ((1, 0), r(1, 4)), ((1, 1), r(1, 4))]).unwrap();
        assert_eq!(indep.entropy_bits(), 2.0);
    }
}
