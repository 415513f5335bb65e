use num_integer::binomial;
use num_traits::ToPrimitive;

use super::{exact_entropy, mc_entropy, uniform_nr_entropy};
use crate::error::{invalid, Result};
use crate::hypergraphon::StepHypergraphon;
use crate::types::ArityProfile;

/// How to evaluate `h(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::MonteCarlo { .. } => "mc",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub n: usize,
    pub h_bits: f64,
    pub method: Method,
    /// Bootstrap standard error; `None` for exact values.
    pub stderr: Option<f64>,
}

impl CurvePoint {
    /// `h(n) / C(n, k)`.
    pub fn ratio(&self, k: usize) -> f64 {
        self.h_bits / binomial(self.n as u64, k as u64) as f64
    }
}

/// `h(n)` for `k ≤ n ≤ n_max` together with the leading coefficient
/// estimate `h(n_max) / C(n_max, k)` and the target `∫ h(W)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyCurve {
    pub k: usize,
    pub points: Vec<CurvePoint>,
    pub c_hat: f64,
    pub target: f64,
    /// Whether `h` is non-decreasing over the computed range (within three
    /// standard errors for Monte Carlo points).
    pub monotone: bool,
}

pub fn entropy_curve(w: &StepHypergraphon, n_max: usize, method: Method) -> Result<EntropyCurve> {
    let k = w.k();
    if n_max < k {
        return invalid(format!("n_max = {n_max} is smaller than k = {k}"));
    }
    let mut points = Vec::new();
    for n in k..=n_max {
        let point = match method {
            Method::Exact => CurvePoint {
                n,
                h_bits: exact_entropy(w, n)?,
                method,
                stderr: None,
            },
            Method::MonteCarlo { samples, seed } => {
                let e = mc_entropy(w, n, samples, seed)?;
                CurvePoint {
                    n,
                    h_bits: e.estimate,
                    method,
                    stderr: Some(e.stderr),
                }
            }
        };
        points.push(point);
    }
    let monotone = points.windows(2).all(|p| {
        let slack = 1e-9 + 3.0 * (p[0].stderr.unwrap_or(0.0) + p[1].stderr.unwrap_or(0.0));
        p[1].h_bits + slack >= p[0].h_bits
    });
    let c_hat = points.last().expect("n_max ≥ k").ratio(k);
    Ok(EntropyCurve {
        k,
        points,
        c_hat,
        target: w.integral_entropy(),
        monotone,
    })
}

/// `h(μ_n) ≤` the entropy of the uniform non-redundant measure for the
/// profile of `W`'s signature.
pub fn max_entropy_check(w: &StepHypergraphon, profile: &ArityProfile, n: usize) -> Result<bool> {
    if w.space().signature().arity_profile() != *profile {
        return invalid(format!(
            "profile {profile} does not match the hypergraphon's signature ({})",
            w.space().signature().arity_profile()
        ));
    }
    let h = exact_entropy(w, n)?;
    let bound = uniform_nr_entropy(profile, n).to_f64().unwrap_or(f64::INFINITY);
    Ok(h <= bound + 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraphon::{make_constant, make_er, make_triangle, TypeDistribution};
    use crate::types::{Signature, TypeSpace};
    use std::sync::Arc;

    #[test]
    fn er_curve_is_binomial() {
        let w = make_er(Arc::new(Signature::hypergraph(2)), 2).unwrap();
        let c = entropy_curve(&w, 6, Method::Exact).unwrap();
        for p in &c.points {
            assert_eq!(p.ratio(2), 1.0);
        }
        assert_eq!(c.c_hat, 1.0);
        assert_eq!(c.target, 1.0);
        assert!(c.monotone);
    }

    #[test]
    fn constant_two_bit_curve() {
        let space = TypeSpace::new(Arc::new(Signature::hypergraph(2)), 2).unwrap();
        let d = TypeDistribution::uniform(&space.enumerate().unwrap()).unwrap();
        let w = make_constant(space, d).unwrap();
        let c = entropy_curve(&w, 4, Method::Exact).unwrap();
        for p in &c.points {
            assert_eq!(p.h_bits, 2.0 * binomial(p.n, 2) as f64);
        }
    }

    #[test]
    fn bounds() {
        let er = make_er(Arc::new(Signature::hypergraph(2)), 2).unwrap();
        assert!(max_entropy_check(&er, &"2:1".parse().unwrap(), 4).unwrap());
        assert!(max_entropy_check(&er, &"3:1".parse().unwrap(), 4).is_err());
        let tri = make_triangle().unwrap();
        assert!(max_entropy_check(&tri, &"3:1".parse().unwrap(), 4).unwrap());
        let space = er.space().clone();
        let top = make_constant(space.clone(), TypeDistribution::point(space.top())).unwrap();
        assert!(max_entropy_check(&top, &"2:1".parse().unwrap(), 3).unwrap());
    }
}
