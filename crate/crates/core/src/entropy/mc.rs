//! Monte Carlo estimation of `h(μ_n)`.

use std::f64::consts::LN_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::hypergraphon::StepHypergraphon;
use crate::prf::{domain, Keyed};
use crate::sampler::sample_types;
use crate::types::QfType;

/// Settings for [`mc_entropy_with`].
#[derive(Debug, Clone)]
pub struct McConfig {
    pub samples: usize,
    pub seed: u64,
    pub resamples: usize,
    /// Largest number of distinct structures kept in memory.
    pub max_support: usize,
}

impl McConfig {
    pub fn new(samples: usize, seed: u64) -> Self {
        McConfig {
            samples,
            seed,
            resamples: 100,
            max_support: 1 << 22,
        }
    }
}

/// A bias-corrected entropy estimate with its bootstrap standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub plug_in: f64,
    pub support: usize,
    pub samples: usize,
}

/// Plug-in entropy of the empirical law plus `(K - 1) / (2 N ln 2)`, where
/// `K` is the number of non-zero counts.
pub fn miller_madow(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    let observed = counts.iter().filter(|&&c| c > 0).count();
    let plug_in = super::entropy_of_probabilities(counts.iter().map(|&c| c as f64 / n));
    plug_in + (observed as f64 - 1.0) / (2.0 * n * LN_2)
}

/// Standard deviation of the Miller–Madow estimate over multinomial
/// resamples of the counts.
pub fn bootstrap_stderr(counts: &[u64], resamples: usize, seed: u64) -> f64 {
    let total: u64 = counts.iter().sum();
    if resamples < 2 || total == 0 || counts.len() < 2 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(Keyed::new(seed, domain::BOOTSTRAP).word(&[total]));
    let mut draws = vec![0u64; counts.len()];
    let estimates: Vec<f64> = (0..resamples)
        .map(|_| {
            // multinomial draw as a chain of conditional binomials
            let mut left = total;
            let mut mass_left = total;
            for (d, &c) in draws.iter_mut().zip(counts) {
                *d = if mass_left == c {
                    left
                } else if left == 0 || c == 0 {
                    0
                } else {
                    Binomial::new(left, c as f64 / mass_left as f64)
                        .expect("probability in [0, 1]")
                        .sample(&mut rng)
                };
                left -= *d;
                mass_left -= c;
            }
            miller_madow(&draws)
        })
        .collect();
    let mean = estimates.iter().sum::<f64>() / resamples as f64;
    let var = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (resamples - 1) as f64;
    var.sqrt()
}

/// Estimate from a list of observed outcomes.
pub fn estimate_from_keys<K: Ord>(mut keys: Vec<K>, resamples: usize, seed: u64, max_support: usize) -> Result<McEstimate> {
    let samples = keys.len();
    keys.sort_unstable();
    let mut counts: Vec<u64> = Vec::new();
    let mut prev: Option<&K> = None;
    for k in &keys {
        if prev == Some(k) {
            *counts.last_mut().expect("non-empty after first key") += 1;
        } else {
            counts.push(1);
            if counts.len() > max_support {
                return Err(Error::ResourceLimit {
                    what: "Monte Carlo support".into(),
                    required: format!("more than {max_support} distinct outcomes"),
                    limit: max_support as u64,
                });
            }
            prev = Some(k);
        }
    }
    let n = samples as f64;
    let plug_in = super::entropy_of_probabilities(counts.iter().map(|&c| c as f64 / n));
    Ok(McEstimate {
        estimate: miller_madow(&counts),
        stderr: bootstrap_stderr(&counts, resamples, seed),
        plug_in,
        support: counts.len(),
        samples,
    })
}

/// Monte Carlo estimate of `h(μ_n)` from `samples` independent draws.
pub fn mc_entropy(w: &StepHypergraphon, n: usize, samples: usize, seed: u64) -> Result<McEstimate> {
    mc_entropy_with(w, n, &McConfig::new(samples, seed))
}

pub fn mc_entropy_with(w: &StepHypergraphon, n: usize, config: &McConfig) -> Result<McEstimate> {
    if config.samples < 100 {
        return invalid(format!("need at least 100 samples, got {}", config.samples));
    }
    w.require_coherent()?;
    let streams = Keyed::new(config.seed, domain::MC_SAMPLE);
    let keys: Vec<Vec<QfType>> = (0..config.samples as u64)
        .into_par_iter()
        .map(|i| sample_types(w, n, streams.substream(i)))
        .collect::<Result<_>>()?;
    estimate_from_keys(keys, config.resamples, config.seed, config.max_support)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraphon::{make_constant, make_er, TypeDistribution};
    use crate::types::Signature;
    use std::sync::Arc;

    #[test]
    fn point_mass_is_exactly_zero() {
        let er = make_er(Arc::new(Signature::hypergraph(2)), 2).unwrap();
        let space = er.space().clone();
        let w = make_constant(space.clone(), TypeDistribution::point(space.top())).unwrap();
        let e = mc_entropy(&w, 4, 1000, 5).unwrap();
        assert_eq!(e.estimate, 0.0);
        assert_eq!(e.stderr, 0.0);
        assert!(mc_entropy(&w, 4, 99, 5).is_err());
    }

    #[test]
    fn er_three_vertices() {
        let w = make_er(Arc::new(Signature::hypergraph(2)), 2).unwrap();
        let e = mc_entropy(&w, 3, 100_000, 17).unwrap();
        assert!((e.estimate - 3.0).abs() < 0.05, "{e:?}");
        assert!(e.stderr > 0.0 && e.stderr < 0.01);
    }

    #[test]
    fn miller_madow_correction() {
        let h = miller_madow(&[50, 50]);
        assert!((h - (1.0 + 1.0 / (200.0 * LN_2))).abs() < 1e-12);
        assert_eq!(miller_madow(&[10]), 0.0);
    }

    #[test]
    fn support_limit() {
        let keys: Vec<u32> = (0..200).collect();
        assert!(matches!(estimate_from_keys(keys, 10, 0, 100), Err(Error::ResourceLimit { .. })));
    }
}
