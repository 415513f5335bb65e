//! Blow-ups of the Rado hypergraph along a growth schedule.
//!
//! Generations are grouped into consecutive blocks `Γ_1, Γ_2, …` of sizes
//! `g_1, g_2, …`; every generation in `Γ_r` receives mass `1/(g_r 2^r)`,
//! split evenly among its vertices. After truncating at `r_max` blocks the
//! missing mass `2^{-r_max}` is spread evenly over the generations of `Γ_1`.

mod sample;
mod step;

use std::collections::BTreeMap;
use std::ops::Range;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::rado::{generation_size, GenerationSize};

pub use sample::{
    chi_square_critical, conditional_entropy_bound, conditional_uniformity, sample_blowup, sample_blowup_vertices,
    ConditionalEntropyReport, UniformityReport,
};
pub use step::truncated_step_form;

/// What `γ` does beyond the last tabulated `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailRule {
    /// `γ(n) = 0` past the table.
    Zero,
    /// `γ(n)` never exceeds the last tabulated value.
    NonIncreasing,
}

/// A finite table of `γ(n) ∈ [0, 1]` with a tail rule.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaTable {
    values: BTreeMap<u64, f64>,
    tail: TailRule,
}

impl GammaTable {
    pub fn new(values: impl IntoIterator<Item = (u64, f64)>, tail: TailRule) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (n, g) in values {
            if !(0.0..=1.0).contains(&g) {
                return invalid(format!("gamma({n}) = {g} is not in [0, 1]"));
            }
            if map.insert(n, g).is_some() {
                return invalid(format!("gamma({n}) given twice"));
            }
        }
        Ok(GammaTable { values: map, tail })
    }

    /// `γ(n) = 2^{-n}` for `n < len`, zero beyond.
    pub fn geometric(len: u64) -> Self {
        GammaTable {
            values: (0..len).map(|n| (n, 0.5f64.powi(n as i32))).collect(),
            tail: TailRule::Zero,
        }
    }

    pub fn values(&self) -> &BTreeMap<u64, f64> {
        &self.values
    }

    pub fn tail(&self) -> TailRule {
        self.tail
    }
}

/// `2^{-(r+1)k - 3k - 1} · k^{-k}`.
pub fn threshold(k: usize, r: usize) -> BigRational {
    let exp = (r + 1) * k + 3 * k + 1;
    let den = (BigInt::one() << exp) * BigInt::from(k).pow(k as u32);
    BigRational::new(BigInt::one(), den)
}

fn ratio(a: impl Into<BigInt>, b: impl Into<BigInt>) -> BigRational {
    BigRational::new(a.into(), b.into())
}

/// The block sizes `g_r` and the masses derived from them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlowupSchedule {
    k: usize,
    g: Vec<u64>,
    starts: Vec<u64>,
}

/// `g_r` for `r = 1..=r_max`.
pub fn build_schedule(gamma: &GammaTable, k: usize, r_max: usize) -> Result<BlowupSchedule> {
    if k == 0 || r_max == 0 {
        return invalid("k and r_max must be positive");
    }
    let mut g = Vec::with_capacity(r_max);
    for r in 1..=r_max {
        let thr = threshold(k, r);
        let above = |v: f64| BigRational::from_float(v).is_some_and(|v| v > thr);
        if gamma.tail == TailRule::NonIncreasing {
            match gamma.values.last_key_value() {
                None => return Err(Error::InsufficientGamma("empty gamma table".into())),
                Some((n, &v)) if above(v) => {
                    return Err(Error::InsufficientGamma(format!(
                        "gamma({n}) = {v} still exceeds the block-{r} threshold {thr}; extend the table"
                    )))
                }
                _ => {}
            }
        }
        let floor = (1u64 << (r + 3)) * k as u64;
        let largest = gamma
            .values
            .iter()
            .filter(|(_, &v)| above(v))
            .map(|(&n, _)| n)
            .max()
            .unwrap_or(0);
        g.push(floor.max(largest));
    }
    BlowupSchedule::from_blocks(k, g)
}

impl BlowupSchedule {
    /// A schedule with given block sizes; each `g_r` must be at least
    /// `2^{r+3} k`.
    pub fn from_blocks(k: usize, g: Vec<u64>) -> Result<Self> {
        if k == 0 || g.is_empty() {
            return invalid("k and the number of blocks must be positive");
        }
        for (i, &gr) in g.iter().enumerate() {
            let floor = (1u64 << (i + 4)) * k as u64;
            if gr < floor {
                return invalid(format!("g_{} = {gr} is below 2^{}·{k}", i + 1, i + 4));
            }
        }
        let mut starts = Vec::with_capacity(g.len());
        let mut acc = 0u64;
        for &gr in &g {
            starts.push(acc);
            acc = acc
                .checked_add(gr)
                .ok_or_else(|| Error::InvalidArgument("too many generations".into()))?;
        }
        Ok(BlowupSchedule { k, g, starts })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn r_max(&self) -> usize {
        self.g.len()
    }

    pub fn g(&self) -> &[u64] {
        &self.g
    }

    /// Number of generations covered, `Σ g_r`.
    pub fn generations(&self) -> u64 {
        self.starts.last().expect("non-empty") + self.g.last().expect("non-empty")
    }

    /// `Γ_r` for `r = 1..=r_max`.
    pub fn block(&self, r: usize) -> Range<u64> {
        self.starts[r - 1]..self.starts[r - 1] + self.g[r - 1]
    }

    /// The block containing a generation.
    pub fn block_of(&self, generation: u64) -> Option<usize> {
        (generation < self.generations()).then(|| self.starts.partition_point(|&s| s <= generation))
    }

    /// `1 / (g_r 2^r)` for the block `r` of the generation.
    pub fn alpha(&self, generation: u64) -> BigRational {
        match self.block_of(generation) {
            Some(r) => ratio(1, BigInt::from(self.g[r - 1]) << r),
            None => BigRational::zero(),
        }
    }

    /// `2^{-r_max}`, the mass lost by truncating.
    pub fn remainder(&self) -> BigRational {
        ratio(1, BigInt::one() << self.r_max())
    }

    /// `Σ_ℓ α_ℓ = 1 - 2^{-r_max}`.
    pub fn total_raw_mass(&self) -> BigRational {
        (1..=self.r_max())
            .map(|r| BigRational::from_integer(self.g[r - 1].into()) * ratio(1, BigInt::from(self.g[r - 1]) << r))
            .sum()
    }

    /// Mass of a generation after the remainder is spread over `Γ_1`.
    pub fn effective_alpha(&self, generation: u64) -> BigRational {
        let a = self.alpha(generation);
        if self.block_of(generation) == Some(1) {
            a + self.remainder() / BigRational::from_integer(self.g[0].into())
        } else {
            a
        }
    }

    fn block_mass(&self, r: usize) -> BigRational {
        let raw = ratio(1, BigInt::one() << r);
        if r == 1 {
            raw + self.remainder()
        } else {
            raw
        }
    }

    /// Mass `α_ℓ / |A_ℓ|` of each vertex of generation `ℓ` in the blow-up,
    /// when `|A_ℓ|` is exactly known.
    pub fn vertex_mass(&self, generation: u64) -> Result<Option<BigRational>> {
        Ok(match generation_size(self.k, generation as usize)? {
            GenerationSize::Exact(size) => Some(self.effective_alpha(generation) / BigRational::from_integer(size.into())),
            _ => None,
        })
    }

    /// The generation whose interval contains `raw / 2^53`.
    pub fn generation_of(&self, raw: u64) -> u64 {
        let u = ratio(raw, BigInt::one() << crate::prf::UNIT_BITS);
        let mut acc = BigRational::zero();
        for r in 1..=self.r_max() {
            let mass = self.block_mass(r);
            if u < &acc + &mass {
                let per = &mass / BigRational::from_integer(self.g[r - 1].into());
                let offset = ((u - acc) / per).floor().to_integer().to_u64().unwrap_or(0);
                return self.starts[r - 1] + offset.min(self.g[r - 1] - 1);
            }
            acc += mass;
        }
        self.generations() - 1
    }

    pub fn to_json(&self) -> Value {
        let pair = |r: &BigRational| json!([r.numer().to_string(), r.denom().to_string()]);
        let blocks: Vec<Value> = (1..=self.r_max())
            .map(|r| {
                let range = self.block(r);
                json!({
                    "alpha": pair(&self.alpha(range.start)),
                    "effective_alpha": pair(&self.effective_alpha(range.start)),
                    "end": range.end,
                    "g": self.g[r - 1],
                    "r": r,
                    "start": range.start,
                })
            })
            .collect();
        json!({
            "blocks": blocks,
            "g": self.g,
            "k": self.k,
            "r_max": self.r_max(),
            "remainder": pair(&self.remainder()),
            "total_raw_mass": pair(&self.total_raw_mass()),
        })
    }

    /// Reads `k` and `g`; everything else is derived.
    pub fn from_json(value: &Value) -> Result<Self> {
        let k = value
            .get("k")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Format("schedule without integer `k`".into()))? as usize;
        let g = value
            .get("g")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Format("schedule without `g` list".into()))?
            .iter()
            .map(Value::as_u64)
            .collect::<Option<Vec<u64>>>()
            .ok_or_else(|| Error::Format("`g` must hold integers".into()))?;
        BlowupSchedule::from_blocks(k, g)
    }
}

/// Effective mass of every generation, in order.
pub fn generation_masses(sched: &BlowupSchedule) -> Vec<BigRational> {
    (0..sched.generations()).map(|l| sched.effective_alpha(l)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_gamma_schedule() {
        let s = build_schedule(&GammaTable::geometric(64), 2, 4).unwrap();
        assert_eq!(threshold(2, 1), ratio(1, 1 << 13));
        assert_eq!(s.g()[0], 32);
        assert_eq!(s.block(1), 0..32);
        for l in 0..32 {
            assert_eq!(s.alpha(l), ratio(1, 64));
        }
        assert_eq!(s.total_raw_mass(), ratio(15, 16));
        let total: BigRational = generation_masses(&s).iter().sum();
        assert!(total.is_one());
    }

    #[test]
    fn zero_gamma_uses_floor() {
        let s = build_schedule(&GammaTable::new([], TailRule::Zero).unwrap(), 2, 3).unwrap();
        assert_eq!(s.g(), &[32, 64, 128]);
        let s3 = build_schedule(&GammaTable::new([], TailRule::Zero).unwrap(), 3, 2).unwrap();
        assert_eq!(s3.g(), &[48, 96]);
    }

    #[test]
    fn large_gamma_extends_block() {
        let gamma = GammaTable::new([(100, 0.5), (200, 1e-9)], TailRule::Zero).unwrap();
        let s = build_schedule(&gamma, 2, 2).unwrap();
        assert_eq!(s.g(), &[100, 100]);
        let short = GammaTable::new([(10, 0.5)], TailRule::NonIncreasing).unwrap();
        assert!(matches!(build_schedule(&short, 2, 1), Err(Error::InsufficientGamma(_))));
    }

    #[test]
    fn generation_lookup() {
        let s = build_schedule(&GammaTable::geometric(10), 2, 2).unwrap();
        assert_eq!(s.generation_of(0), 0);
        assert_eq!(s.generation_of((1 << 53) - 1), s.generations() - 1);
        // Γ_1 carries mass 1/2 + 1/4
        let three_quarters = 3u64 << 51;
        assert_eq!(s.generation_of(three_quarters - 1), 31);
        assert_eq!(s.generation_of(three_quarters), 32);
        let json = s.to_json();
        assert_eq!(BlowupSchedule::from_json(&json).unwrap(), s);
    }
}
