//! Subset and permutation combinatorics.
//!
//! Subsets are sorted `Vec<usize>`s. Families of subsets are listed in
//! shortlex order: by size, then lexicographically.

use std::cmp::Ordering;

use num_integer::binomial;

use crate::error::{invalid, Result};

/// All `r`-subsets of `[n]` in lexicographic order.
pub fn subsets_of_size(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if r > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..r).collect();
    loop {
        out.push(cur.clone());
        // advance to the next combination
        let mut i = r;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - r + i {
                break;
            }
        }
        cur[i] += 1;
        for j in i + 1..r {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Shortlex comparison of two sorted sets.
pub fn shortlex_cmp(a: &[usize], b: &[usize]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// The shortlex enumerations `P_{<k}(n)`, `P_k(n)` and `P_{≤k}(n)`, with
/// dense 0-based indices.
#[derive(Debug, Clone)]
pub struct SubsetIndex {
    n: usize,
    k: usize,
    below: Vec<Vec<usize>>,
    exactly: Vec<Vec<usize>>,
}

impl SubsetIndex {
    pub fn new(n: usize, k: usize) -> Self {
        let below = (0..k).flat_map(|r| subsets_of_size(n, r)).collect();
        let exactly = subsets_of_size(n, k);
        SubsetIndex { n, k, below, exactly }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `P_{<k}(n)`.
    pub fn below(&self) -> &[Vec<usize>] {
        &self.below
    }

    /// `P_k(n)`.
    pub fn exactly(&self) -> &[Vec<usize>] {
        &self.exactly
    }

    /// `P_{≤k}(n) = P_{<k}(n) ++ P_k(n)`.
    pub fn up_to(&self) -> Vec<Vec<usize>> {
        self.below.iter().chain(&self.exactly).cloned().collect()
    }

    /// Position of a sorted set in `P_{≤k}(n)`, or `None` if it is not a
    /// member.
    pub fn position(&self, set: &[usize]) -> Option<usize> {
        if set.len() > self.k || set.iter().any(|&x| x >= self.n) || !is_strictly_increasing(set) {
            return None;
        }
        let offset: usize = (0..set.len()).map(|r| binomial(self.n, r)).sum();
        Some(offset + lex_rank(self.n, set))
    }

    /// Position of a sorted set within `P_{<k}(n)`.
    pub fn position_below(&self, set: &[usize]) -> Option<usize> {
        if set.len() >= self.k {
            return None;
        }
        self.position(set)
    }
}

/// A list of sets.
pub type Family = Vec<Vec<usize>>;

/// Convenience wrapper returning `(P_{<k}(n), P_k(n), P_{≤k}(n))`.
pub fn shortlex(n: usize, k: usize) -> (Family, Family, Family) {
    let idx = SubsetIndex::new(n, k);
    let all = idx.up_to();
    (idx.below, idx.exactly, all)
}

fn is_strictly_increasing(s: &[usize]) -> bool {
    s.windows(2).all(|w| w[0] < w[1])
}

/// Rank of a sorted `r`-subset among all `r`-subsets of `[n]` in lex order.
pub fn lex_rank(n: usize, set: &[usize]) -> usize {
    let r = set.len();
    let mut rank = 0;
    let mut start = 0;
    for (i, &d) in set.iter().enumerate() {
        for x in start..d {
            rank += binomial(n - 1 - x, r - 1 - i);
        }
        start = d + 1;
    }
    rank
}

/// The increasing enumeration `τ_J : [k] → J` of a set of distinct
/// naturals, given in any order.
pub fn tau(set: &[usize]) -> Result<Vec<usize>> {
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return invalid(format!("set {set:?} has repeated elements"));
    }
    Ok(sorted)
}

/// All permutations of `[k]` in lexicographic order, as image vectors.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut cur: Vec<usize> = (0..k).collect();
    let mut out = vec![cur.clone()];
    // standard next-permutation
    loop {
        let Some(i) = (1..k).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..k).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}

/// Lexicographic rank of a permutation of `[k]`.
pub fn permutation_rank(perm: &[usize]) -> usize {
    let k = perm.len();
    let mut rank = 0;
    let mut fact: usize = (1..k).product();
    let mut used = vec![false; k];
    for (i, &p) in perm.iter().enumerate() {
        let smaller = (0..p).filter(|&q| !used[q]).count();
        rank += smaller * fact;
        used[p] = true;
        if i + 1 < k {
            fact /= k - 1 - i;
        }
    }
    rank
}

pub fn is_permutation(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || seen[p] {
            return false;
        }
        seen[p] = true;
    }
    true
}

/// `(a ∘ b)(i) = a(b(i))`.
pub fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&i| a[i]).collect()
}

pub fn inverse(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

/// Image of a set under a permutation, sorted.
pub fn image(perm: &[usize], set: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = set.iter().map(|&x| perm[x]).collect();
    out.sort_unstable();
    out
}

/// All set partitions of `[k]` as restricted-growth strings, in increasing
/// order of the string.
pub fn restricted_growth_strings(k: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, max: usize, k: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == k {
            out.push(prefix.clone());
            return;
        }
        let limit = if prefix.is_empty() { 0 } else { max + 1 };
        for v in 0..=limit {
            prefix.push(v);
            go(prefix, max.max(v), k, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::with_capacity(k), 0, k, &mut out);
    out
}
