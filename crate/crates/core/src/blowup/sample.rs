use std::sync::Arc;

use num_integer::binomial;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::BlowupSchedule;
use crate::entropy::{estimate_from_keys, McEstimate};
use crate::error::{invalid, Error, Result};
use crate::prf::{domain, encode_set, Keyed};
use crate::rado::{RadoHypergraph, VertexId};
use crate::types::subsets::{permutations, subsets_of_size};
use crate::types::{FiniteStructure, Signature};

/// Largest number of labeled hypergraphs tallied by the conditional tests.
const MAX_GRAPHS: u64 = 4096;

fn check_pair(sched: &BlowupSchedule, rado: &RadoHypergraph) -> Result<()> {
    if sched.k() != rado.k() {
        return invalid(format!("schedule has k = {} but the Rado hypergraph has k = {}", sched.k(), rado.k()));
    }
    Ok(())
}

/// The Rado vertex `π(ζ_{j})` of every `j ∈ [n]`.
pub fn sample_blowup_vertices(sched: &BlowupSchedule, rado: &RadoHypergraph, n: usize, seed: u64) -> Result<Vec<VertexId>> {
    check_pair(sched, rado)?;
    let zeta = Keyed::new(seed, domain::ZETA);
    let index = Keyed::new(seed, domain::VERTEX_INDEX);
    (0..n)
        .map(|j| {
            let generation = sched.generation_of(zeta.unit(&encode_set(&[j])).raw());
            rado.random_vertex(generation as usize, &index, &[j as u64])
        })
        .collect()
}

/// Whether the images of a `k`-set form an edge; repeated images never do.
fn image_edge(rado: &RadoHypergraph, images: &[&VertexId], seed: u64) -> Result<bool> {
    for (i, v) in images.iter().enumerate() {
        if images[i + 1..].contains(v) {
            return Ok(false);
        }
    }
    let owned: Vec<VertexId> = images.iter().map(|v| (*v).clone()).collect();
    rado.has_edge(&owned, seed)
}

/// A sample of `G(n, W)` for the blow-up of the Rado hypergraph along the
/// schedule. Edges are stored with every ordering of their vertices.
pub fn sample_blowup(sched: &BlowupSchedule, rado: &RadoHypergraph, n: usize, seed: u64) -> Result<FiniteStructure> {
    let k = sched.k();
    if n < k {
        return invalid(format!("n = {n} is smaller than k = {k}"));
    }
    let vertices = sample_blowup_vertices(sched, rado, n, seed)?;
    let mut m = FiniteStructure::empty(Arc::new(Signature::hypergraph(k)), n)?;
    let orders = permutations(k);
    for set in subsets_of_size(n, k) {
        let images: Vec<&VertexId> = set.iter().map(|&j| &vertices[j]).collect();
        if image_edge(rado, &images, seed)? {
            for p in &orders {
                m.insert(0, p.iter().map(|&i| set[i]).collect())?;
            }
        }
    }
    Ok(m)
}

/// Tallies of the labeled hypergraphs seen by [`conditional_uniformity`].
#[derive(Debug, Clone, PartialEq)]
pub struct UniformityReport {
    /// Count per hypergraph; bit `i` of the index is the `i`-th `k`-set of
    /// `[s]` in lexicographic order.
    pub counts: Vec<u64>,
    pub trials: u64,
    pub statistic: f64,
    pub p_value: f64,
}

impl UniformityReport {
    pub fn frequencies(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.trials as f64).collect()
    }
}

/// Upper `level` quantile of the chi-square law with `df` degrees of freedom.
pub fn chi_square_critical(df: u64, level: f64) -> f64 {
    ChiSquared::new(df as f64).expect("df ≥ 1").inverse_cdf(level)
}

fn graph_count(s: usize, k: usize) -> Result<u64> {
    let sets = binomial(s as u64, k as u64);
    if sets >= 63 || 1u64 << sets > MAX_GRAPHS {
        return Err(Error::ResourceLimit {
            what: format!("labeled {k}-hypergraphs on {s} vertices"),
            required: format!("2^{sets}"),
            limit: MAX_GRAPHS,
        });
    }
    Ok(1 << sets)
}

fn check_generations(sched: &BlowupSchedule, rho: &[u64]) -> Result<()> {
    if let Some(g) = rho.iter().find(|&&g| g >= sched.generations()) {
        return invalid(format!("generation {g} is outside the schedule ({} generations)", sched.generations()));
    }
    Ok(())
}

/// Index of the hypergraph induced on one vertex per entry of `rho`.
fn trial_graph(rado: &RadoHypergraph, rho: &[u64], sets: &[Vec<usize>], stream: &Keyed, t: u64, seed: u64) -> Result<u64> {
    let vertices: Vec<VertexId> = rho
        .iter()
        .enumerate()
        .map(|(j, &g)| rado.random_vertex(g as usize, stream, &[t, j as u64]))
        .collect::<Result<_>>()?;
    let mut index = 0u64;
    for (i, set) in sets.iter().enumerate() {
        let images: Vec<&VertexId> = set.iter().map(|&j| &vertices[j]).collect();
        if image_edge(rado, &images, seed)? {
            index |= 1 << i;
        }
    }
    Ok(index)
}

/// Draws one uniform vertex from each generation `rho[j]` and tests the
/// induced labeled hypergraph on `[s]` against the uniform law.
pub fn conditional_uniformity(
    sched: &BlowupSchedule,
    rado: &RadoHypergraph,
    rho: &[u64],
    trials: u64,
    seed: u64,
) -> Result<UniformityReport> {
    check_pair(sched, rado)?;
    check_generations(sched, rho)?;
    let k = sched.k();
    let s = rho.len();
    if s < k {
        return invalid(format!("need at least k = {k} generations, got {s}"));
    }
    for (i, g) in rho.iter().enumerate() {
        if rho[i + 1..].contains(g) {
            return invalid(format!("generation {g} is listed twice; the map must be injective"));
        }
    }
    if trials == 0 {
        return invalid("trials must be positive");
    }
    let graphs = graph_count(s, k)?;
    let sets = subsets_of_size(s, k);
    let stream = Keyed::new(seed, domain::TRIAL);
    let counts = (0..trials)
        .into_par_iter()
        .map(|t| trial_graph(rado, rho, &sets, &stream, t, seed))
        .try_fold(
            || vec![0u64; graphs as usize],
            |mut acc, g| {
                acc[g? as usize] += 1;
                Ok::<_, Error>(acc)
            },
        )
        .try_reduce(
            || vec![0u64; graphs as usize],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )?;
    let expected = trials as f64 / graphs as f64;
    let statistic = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let p_value = if graphs > 1 {
        1.0 - ChiSquared::new((graphs - 1) as f64).expect("df ≥ 1").cdf(statistic)
    } else {
        1.0
    };
    Ok(UniformityReport {
        counts,
        trials,
        statistic,
        p_value,
    })
}

/// Estimated entropy of the sample given the generations, against the
/// lower bound `C(|ρ([n])|, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalEntropyReport {
    pub estimate: McEstimate,
    pub bound: u64,
    /// `estimate ≥ bound - 3 · stderr`.
    pub satisfied: bool,
}

pub fn conditional_entropy_bound(
    sched: &BlowupSchedule,
    rado: &RadoHypergraph,
    rho: &[u64],
    trials: u64,
    seed: u64,
) -> Result<ConditionalEntropyReport> {
    check_pair(sched, rado)?;
    check_generations(sched, rho)?;
    let k = sched.k();
    let n = rho.len();
    if n < k {
        return invalid(format!("need at least k = {k} points, got {n}"));
    }
    if trials < 100 {
        return invalid(format!("need at least 100 trials, got {trials}"));
    }
    let mut distinct = rho.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    graph_count(distinct.len().max(k), k)?;
    let sets = subsets_of_size(n, k);
    if sets.len() > 64 {
        return Err(Error::ResourceLimit {
            what: format!("{k}-sets of {n} points"),
            required: sets.len().to_string(),
            limit: 64,
        });
    }
    let stream = Keyed::new(seed, domain::TRIAL);
    let keys: Vec<u64> = (0..trials)
        .into_par_iter()
        .map(|t| trial_graph(rado, rho, &sets, &stream, t, seed))
        .collect::<Result<_>>()?;
    let estimate = estimate_from_keys(keys, 100, seed, usize::MAX)?;
    let bound = binomial(distinct.len() as u64, k as u64);
    Ok(ConditionalEntropyReport {
        satisfied: estimate.estimate >= bound as f64 - 3.0 * estimate.stderr,
        estimate,
        bound,
    })
}
