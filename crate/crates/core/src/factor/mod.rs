//! Batch prime factorization in `Õ(n + √s)`.
//!
//! The primes up to `√s` are multiplied into a single product tree. For a set
//! `M`, reducing `Π(P)` down a product tree over `M` gives `Π(P) mod m` at
//! every leaf, and `gcd(m, Π(P) mod m) > 1` says whether `m` has a prime
//! factor in `P` ([`divisible_subset`]). Splitting `P` along its own product
//! tree and recursing on the survivors finds every `(m, p)` pair with
//! `p | m` ([`prime_factors_among`]). Since `m ≤ s` has at most one prime
//! factor above `√s`, dividing out the small primes leaves that factor
//! ([`factorize_batch`]).

mod sieve;
mod tree;

use std::collections::HashMap;

use rug::Integer;

pub use sieve::{is_prime, sieve_primes, PrimeTable};
pub use tree::ProductTree;

use crate::error::{Error, Result};

/// Prime sets at or below this size are handled by trial division.
pub const TRIAL_DIVISION_CUTOFF: usize = 8;

/// Both halves of a split must carry this many candidates before they are
/// handed to separate rayon tasks.
const PARALLEL_MIN: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Factorization {
    pub value: u64,
    /// `(prime, exponent)` with strictly increasing primes.
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Multiplies the factors back together (`1` for the empty product).
    pub fn product(&self) -> u128 {
        self.factors
            .iter()
            .fold(1u128, |acc, &(p, e)| acc * (p as u128).pow(e))
    }
}

impl std::fmt::Display for Factorization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} =", self.value)?;
        if self.factors.is_empty() {
            return write!(f, " 1");
        }
        for (i, &(p, e)) in self.factors.iter().enumerate() {
            let sep = if i == 0 { " " } else { " * " };
            if e == 1 {
                write!(f, "{sep}{p}")?;
            } else {
                write!(f, "{sep}{p}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Recursion bookkeeping for [`prime_factors_among_with_stats`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RecursionStats {
    /// Number of recursive calls with a non-empty `M`.
    pub calls: usize,
    /// Deepest recursion level reached.
    pub depth: usize,
    /// For each level, the largest number of calls any single `m` took part in.
    pub max_appearances_per_level: Vec<usize>,
}

/// Elements of `m` divisible by at least one prime of `p`, in input order.
pub fn divisible_subset(m: &[u64], p: &[u64]) -> Vec<u64> {
    if m.is_empty() || p.is_empty() {
        return Vec::new();
    }
    let primorial = ProductTree::new(p)
        .root_product()
        .expect("uncapped tree has a root product");
    divisible_by_modulus(m, &primorial)
}

/// Filters `m` down to the elements sharing a factor with `modulus`.
fn divisible_by_modulus(m: &[u64], modulus: &Integer) -> Vec<u64> {
    let [kept] = divisible_by_each(m, [modulus]);
    kept
}

/// [`divisible_by_modulus`] for several moduli over one product tree of `m`,
/// capped at the largest modulus.
fn divisible_by_each<const K: usize>(m: &[u64], moduli: [&Integer; K]) -> [Vec<u64>; K] {
    let cap = moduli.iter().map(|q| q.significant_bits()).max().unwrap_or(0);
    let tree = ProductTree::with_cap(m, cap);
    let mut rems = vec![0u64; m.len()];
    moduli.map(|modulus| {
        tree.remainders_into(modulus, &mut rems);
        m.iter()
            .zip(&rems)
            .filter(|&(&x, &r)| shares_factor(x, r))
            .map(|(&x, _)| x)
            .collect()
    })
}

/// `gcd(x, r) > 1` for `x ≥ 2`, by binary gcd with the swap done as
/// min/max so the loop body stays branch-free.
fn shares_factor(x: u64, r: u64) -> bool {
    if r == 0 {
        return true;
    }
    if (x | r) & 1 == 0 {
        return true;
    }
    let mut a = x >> x.trailing_zeros();
    let mut b = r >> r.trailing_zeros();
    while a != b {
        let (lo, hi) = (a.min(b), a.max(b));
        let d = hi - lo;
        a = lo;
        b = d >> d.trailing_zeros();
    }
    a > 1
}

/// All `(m, p)` with `p | m`, sorted by `m` then `p`. `p` must be sorted.
pub fn prime_factors_among(m: &[u64], p: &[u64]) -> Vec<(u64, u64)> {
    let mut out = search_pairs(m, p, None);
    out.sort_unstable();
    out
}

/// [`prime_factors_among`] that also records how the recursion unfolded.
pub fn prime_factors_among_with_stats(m: &[u64], p: &[u64]) -> (Vec<(u64, u64)>, RecursionStats) {
    let mut per_level: Vec<HashMap<u64, usize>> = Vec::new();
    let mut stats = RecursionStats::default();
    let mut out = search_pairs(m, p, Some((&mut per_level, &mut stats)));
    out.sort_unstable();
    stats.max_appearances_per_level = per_level
        .iter()
        .map(|counts| counts.values().copied().max().unwrap_or(0))
        .collect();
    (out, stats)
}

type Recorder<'a> = Option<(&'a mut Vec<HashMap<u64, usize>>, &'a mut RecursionStats)>;

fn search_pairs(m: &[u64], p: &[u64], recorder: Recorder<'_>) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    if m.is_empty() || p.is_empty() {
        return out;
    }
    debug_assert!(p.windows(2).all(|w| w[0] < w[1]), "primes must be sorted");
    let ptree = ProductTree::new(p);
    let candidates: Vec<u64> = m.iter().copied().filter(|&x| x > 1).collect();
    match recorder {
        None => search_parallel(&ptree, ptree.root(), candidates, &mut out),
        Some(rec) => search(&ptree, ptree.root(), candidates, 0, &mut out, &mut Some(rec)),
    }
    out
}

fn child_moduli(ptree: &ProductTree, l: usize, r: usize) -> (Integer, Integer) {
    let q = |c| ptree.product(c).expect("prime tree is uncapped");
    (q(l), q(r))
}

fn search(
    ptree: &ProductTree,
    node: usize,
    m: Vec<u64>,
    level: usize,
    out: &mut Vec<(u64, u64)>,
    recorder: &mut Option<(&mut Vec<HashMap<u64, usize>>, &mut RecursionStats)>,
) {
    if m.is_empty() {
        return;
    }
    if let Some((levels, stats)) = recorder {
        stats.calls += 1;
        stats.depth = stats.depth.max(level);
        if levels.len() <= level {
            levels.resize_with(level + 1, HashMap::new);
        }
        for &x in &m {
            *levels[level].entry(x).or_insert(0) += 1;
        }
    }
    let primes = ptree.leaf_slice(node);
    if primes.len() <= TRIAL_DIVISION_CUTOFF {
        for &x in &m {
            for &q in primes {
                if x % q == 0 {
                    out.push((x, q));
                }
            }
        }
        return;
    }
    let (l, r) = ptree.children(node).expect("more than one prime means an internal node");
    let (ql, qr) = child_moduli(ptree, l, r);
    let [sl, sr] = divisible_by_each(&m, [&ql, &qr]);
    search(ptree, l, sl, level + 1, out, recorder);
    search(ptree, r, sr, level + 1, out, recorder);
}

/// Same recursion without bookkeeping; the two halves of `P` run through
/// `rayon::join` and their pairs are concatenated in a fixed order.
fn search_parallel(ptree: &ProductTree, node: usize, m: Vec<u64>, out: &mut Vec<(u64, u64)>) {
    if m.is_empty() {
        return;
    }
    let primes = ptree.leaf_slice(node);
    if primes.len() <= TRIAL_DIVISION_CUTOFF {
        for &x in &m {
            for &q in primes {
                if x % q == 0 {
                    out.push((x, q));
                }
            }
        }
        return;
    }
    let (l, r) = ptree.children(node).expect("more than one prime means an internal node");
    let (ql, qr) = child_moduli(ptree, l, r);
    let [sl, sr] = divisible_by_each(&m, [&ql, &qr]);
    let run = |child: usize, survivors: Vec<u64>| {
        let mut part = Vec::new();
        search_parallel(ptree, child, survivors, &mut part);
        part
    };
    let (left, right) = if sl.len().min(sr.len()) >= PARALLEL_MIN {
        rayon::join(|| run(l, sl), || run(r, sr))
    } else {
        (run(l, sl), run(r, sr))
    };
    out.extend(left);
    out.extend(right);
}

/// Prime factorization of every value in `m`, each of which must lie in
/// `[1, s]`. Results are in input order; duplicates are factored once.
pub fn factorize_batch(m: &[u64], s: u64) -> Result<Vec<Factorization>> {
    if let Some(&bad) = m.iter().find(|&&v| v < 1 || v > s) {
        return Err(Error::OutOfRange { value: bad, limit: s });
    }
    let table = sieve_primes(s.isqrt());
    let mut distinct: Vec<u64> = m.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let pairs = prime_factors_among(&distinct, table.primes());
    let mut by_value: Vec<Factorization> = Vec::with_capacity(distinct.len());
    let mut i = 0;
    for &value in &distinct {
        let mut rest = value;
        let mut factors = Vec::new();
        while i < pairs.len() && pairs[i].0 == value {
            let p = pairs[i].1;
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            factors.push((p, e));
            i += 1;
        }
        if rest > 1 {
            // The unique prime factor above √s.
            factors.push((rest, 1));
        }
        by_value.push(Factorization { value, factors });
    }
    Ok(m
        .iter()
        .map(|v| by_value[distinct.binary_search(v).expect("value was collected")].clone())
        .collect())
}

/// Per-number trial division by 2 and odd candidates up to `√m`; the
/// reference the batch algorithm is checked and timed against.
pub fn trial_division(value: u64) -> Factorization {
    let mut rest = value;
    let mut factors = Vec::new();
    let mut p = 2u64;
    while p * p <= rest {
        if rest % p == 0 {
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Factorization { value, factors }
}
