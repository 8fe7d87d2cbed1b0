//! Multi-sets of positive integers and their derived parameters.
//!
//! A [`MultiSet`] is stored run-length style as `(value, multiplicity)` pairs
//! sorted by value. All of `n`, `mx`, `μ` and `σ` are multiplicity-weighted,
//! and the density and almost-divisor predicates are evaluated by
//! cross-multiplication in exact arithmetic.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::rational::{big, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiSet {
    entries: Vec<(u64, u64)>,
}

/// The scalar parameters of a multi-set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Profile {
    /// Size, counted with multiplicity.
    pub n: u64,
    /// Largest value.
    pub mx: u64,
    /// Largest multiplicity.
    pub mul: u64,
    /// Sum of all elements, counted with multiplicity.
    pub sum: u64,
    /// Number of distinct values.
    pub support: u64,
}

/// `(X, t)` after the trivial cases, the `t ↦ σ − t` mirror and the removal
/// of elements larger than the target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedInstance {
    /// `None` when every element was dropped (only possible alongside a
    /// trivial answer).
    pub x: Option<MultiSet>,
    pub t: u64,
    pub mirrored: bool,
    pub dropped_count: u64,
    pub trivial_answer: Option<bool>,
}

impl MultiSet {
    /// Builds a multi-set from a list of values; repetitions become
    /// multiplicities.
    pub fn from_values(values: &[u64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("empty multi-set".into()));
        }
        let mut counts = BTreeMap::new();
        for &v in values {
            if v == 0 {
                return Err(Error::InvalidInput("values must be positive".into()));
            }
            *counts.entry(v).or_insert(0u64) += 1;
        }
        Self::from_entries(counts.into_iter().collect())
    }

    /// Builds a multi-set from `(value, multiplicity)` pairs in any order;
    /// pairs with equal values are merged.
    pub fn from_counts(pairs: impl IntoIterator<Item = (u64, u64)>) -> Result<Self> {
        let mut counts = BTreeMap::new();
        for (v, m) in pairs {
            if v == 0 {
                return Err(Error::InvalidInput("values must be positive".into()));
            }
            if m == 0 {
                continue;
            }
            let slot = counts.entry(v).or_insert(0u64);
            *slot = slot
                .checked_add(m)
                .ok_or_else(|| Error::InvalidInput("multiplicity overflow".into()))?;
        }
        if counts.is_empty() {
            return Err(Error::InvalidInput("empty multi-set".into()));
        }
        Self::from_entries(counts.into_iter().collect())
    }

    /// `entries` must already be sorted, distinct and positive.
    fn from_entries(entries: Vec<(u64, u64)>) -> Result<Self> {
        let mut n: u64 = 0;
        let mut sum: u64 = 0;
        for &(v, m) in &entries {
            n = n
                .checked_add(m)
                .ok_or_else(|| Error::InvalidInput("size overflows u64".into()))?;
            let part = v
                .checked_mul(m)
                .and_then(|p| sum.checked_add(p))
                .ok_or_else(|| Error::InvalidInput("sum overflows u64".into()))?;
            sum = part;
        }
        Ok(MultiSet { entries })
    }

    /// Sorted `(value, multiplicity)` pairs.
    pub fn entries(&self) -> &[(u64, u64)] {
        &self.entries
    }

    /// Distinct values in increasing order.
    pub fn support(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().map(|&(v, _)| v)
    }

    /// All elements in increasing order, repeated by multiplicity.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries
            .iter()
            .flat_map(|&(v, m)| std::iter::repeat(v).take(m as usize))
    }

    pub fn to_values(&self) -> Vec<u64> {
        self.iter().collect()
    }

    pub fn multiplicity(&self, value: u64) -> u64 {
        self.entries
            .binary_search_by_key(&value, |&(v, _)| v)
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    pub fn len(&self) -> u64 {
        self.entries.iter().map(|&(_, m)| m).sum()
    }

    pub fn max(&self) -> u64 {
        self.entries.last().map(|&(v, _)| v).unwrap_or(0)
    }

    pub fn sum(&self) -> u64 {
        self.entries.iter().map(|&(v, m)| v * m).sum()
    }

    pub fn profile(&self) -> Profile {
        Profile {
            n: self.len(),
            mx: self.max(),
            mul: self.entries.iter().map(|&(_, m)| m).max().unwrap_or(0),
            sum: self.sum(),
            support: self.entries.len() as u64,
        }
    }

    /// Every present value has the same multiplicity.
    pub fn is_uniform(&self) -> bool {
        let first = self.entries[0].1;
        self.entries.iter().all(|&(_, m)| m == first)
    }

    /// Multiplicity-wise containment.
    pub fn is_subset_of(&self, other: &MultiSet) -> bool {
        self.entries.iter().all(|&(v, m)| other.multiplicity(v) >= m)
    }

    /// `X(d)` and `|X̄(d)|`; `None` stands for the empty restriction.
    pub fn restrict_divisible(&self, d: u64) -> (Option<MultiSet>, u64) {
        assert!(d >= 1, "divisor must be positive");
        let kept: Vec<(u64, u64)> = self.entries.iter().copied().filter(|&(v, _)| v % d == 0).collect();
        let kept_n: u64 = kept.iter().map(|&(_, m)| m).sum();
        let complement = self.len() - kept_n;
        let x_d = if kept.is_empty() { None } else { Some(MultiSet { entries: kept }) };
        (x_d, complement)
    }

    /// Number of elements (with multiplicity) not divisible by `d`.
    pub fn count_not_divisible(&self, d: u64) -> u64 {
        self.entries.iter().filter(|&&(v, _)| v % d != 0).map(|&(_, m)| m).sum()
    }

    /// `X/d`; every element must be divisible by `d`.
    pub fn divide(&self, d: u64) -> Result<MultiSet> {
        assert!(d >= 1, "divisor must be positive");
        let mut entries = Vec::with_capacity(self.entries.len());
        for &(v, m) in &self.entries {
            if v % d != 0 {
                return Err(Error::NotDivisible { value: v, divisor: d });
            }
            entries.push((v / d, m));
        }
        Ok(MultiSet { entries })
    }

    /// `n² ≥ δ·μ·mx`.
    pub fn is_dense(&self, delta: &Rational) -> bool {
        self.profile().is_dense(delta)
    }

    /// `|X̄(d)| ≤ α·μ·σ/n²`.
    pub fn is_almost_divisor(&self, d: u64, alpha: &Rational) -> bool {
        assert!(d >= 2, "almost divisors are at least 2");
        let complement = self.count_not_divisible(d);
        self.profile().within_almost_divisor_budget(complement, alpha)
    }

    /// Multiplicity-wise maximum of several sub-multi-sets.
    pub fn max_union<'a>(parts: impl IntoIterator<Item = &'a MultiSet>) -> Result<MultiSet> {
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for part in parts {
            for &(v, m) in &part.entries {
                let slot = counts.entry(v).or_insert(0);
                *slot = (*slot).max(m);
            }
        }
        if counts.is_empty() {
            return Err(Error::InvalidInput("empty multi-set".into()));
        }
        Ok(MultiSet { entries: counts.into_iter().collect() })
    }

    /// The `k` smallest elements (with multiplicity), `None` when `k = 0`.
    pub fn smallest(&self, k: u64) -> Option<MultiSet> {
        let mut left = k;
        let mut entries = Vec::new();
        for &(v, m) in &self.entries {
            if left == 0 {
                break;
            }
            let take = m.min(left);
            entries.push((v, take));
            left -= take;
        }
        (!entries.is_empty()).then_some(MultiSet { entries })
    }

    /// Elements not divisible by `d`, `None` when there are none.
    pub fn not_divisible_by(&self, d: u64) -> Option<MultiSet> {
        let entries: Vec<_> = self.entries.iter().copied().filter(|&(v, _)| v % d != 0).collect();
        (!entries.is_empty()).then_some(MultiSet { entries })
    }

    /// Multiplies every element by `k`.
    pub fn scale(&self, k: u64) -> Result<MultiSet> {
        let entries = self
            .entries
            .iter()
            .map(|&(v, m)| {
                v.checked_mul(k)
                    .map(|w| (w, m))
                    .ok_or_else(|| Error::InvalidInput("value overflow".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        if k == 0 {
            return Err(Error::InvalidInput("values must be positive".into()));
        }
        Self::from_entries(entries)
    }
}

impl Profile {
    pub fn is_dense(&self, delta: &Rational) -> bool {
        let lhs = big(self.n as u128 * self.n as u128);
        let rhs = delta * big(self.mul as u128 * self.mx as u128);
        lhs >= rhs
    }

    /// `α·μ·σ/n²` as an exact rational.
    pub fn almost_divisor_budget(&self, alpha: &Rational) -> Rational {
        alpha * big(self.mul as u128 * self.sum as u128) / big(self.n as u128 * self.n as u128)
    }

    pub fn within_almost_divisor_budget(&self, complement: u64, alpha: &Rational) -> bool {
        // complement·n² ≤ α·μ·σ
        let lhs = Rational::from_integer(BigInt::from(complement) * BigInt::from(self.n) * BigInt::from(self.n));
        lhs <= alpha * big(self.mul as u128 * self.sum as u128)
    }

    /// `μ·mx·σ/n²`, the scale of every window and bound in the pipeline.
    pub fn spread(&self) -> Rational {
        big(self.mul as u128 * self.mx as u128) * big(self.sum as u128) / big(self.n as u128 * self.n as u128)
    }
}

/// Normalizes `(X, t)`: settles `t > σ`, `t = 0` and `t = σ`, mirrors
/// `t > σ/2` to `σ − t` on the full multi-set, then drops elements above the
/// (possibly mirrored) target. Dropping shrinks `σ`, so the two steps repeat
/// until neither applies.
pub fn normalize_instance(x: &MultiSet, t: u64) -> NormalizedInstance {
    let mut current = x.clone();
    let mut t = t;
    let mut mirrored = false;
    let mut dropped_count = 0;
    loop {
        let sum = current.sum();
        let settled = |answer, current: MultiSet, t, mirrored, dropped_count| NormalizedInstance {
            x: Some(current),
            t,
            mirrored,
            dropped_count,
            trivial_answer: Some(answer),
        };
        if t > sum {
            return settled(false, current, t, mirrored, dropped_count);
        }
        if t == 0 || t == sum {
            return settled(true, current, t, mirrored, dropped_count);
        }
        if 2 * t > sum {
            t = sum - t;
            mirrored = true;
        }
        let kept: Vec<(u64, u64)> = current.entries.iter().copied().filter(|&(v, _)| v <= t).collect();
        if kept.len() == current.entries.len() {
            return NormalizedInstance { x: Some(current), t, mirrored, dropped_count, trivial_answer: None };
        }
        let kept_n: u64 = kept.iter().map(|&(_, m)| m).sum();
        dropped_count += current.len() - kept_n;
        if kept.is_empty() {
            // Every element exceeds t ≥ 1: only the empty sum is left.
            return NormalizedInstance { x: None, t, mirrored, dropped_count, trivial_answer: Some(false) };
        }
        current = MultiSet { entries: kept };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn ms(v: &[u64]) -> MultiSet {
        MultiSet::from_values(v).unwrap()
    }

    #[test]
    fn from_values_counts_repetitions() {
        assert_eq!(ms(&[3, 3, 5]).entries(), &[(3, 2), (5, 1)]);
        assert_eq!(ms(&[7]).entries(), &[(7, 1)]);
        assert_eq!(ms(&[2, 4, 2, 4]).entries(), &[(2, 2), (4, 2)]);
        assert!(matches!(MultiSet::from_values(&[]), Err(Error::InvalidInput(_))));
        assert!(matches!(MultiSet::from_values(&[1, 0]), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn profile_fields() {
        let p = ms(&[3, 3, 5]).profile();
        assert_eq!((p.n, p.mx, p.mul, p.sum, p.support), (3, 5, 2, 11, 2));
        let p = ms(&[7]).profile();
        assert_eq!((p.n, p.mx, p.mul, p.sum, p.support), (1, 7, 1, 7, 1));
        let hundred: Vec<u64> = (1..=100).collect();
        let p = ms(&hundred).profile();
        assert_eq!((p.n, p.mx, p.mul, p.sum), (100, 100, 1, 5050));
    }

    #[test]
    fn density_examples() {
        let x = ms(&[1, 2, 3, 4]);
        assert!(x.is_dense(&int(4)));
        assert!(!x.is_dense(&int(5)));
        assert!(ms(&[2, 2, 2]).is_dense(&int(1)));
    }

    #[test]
    fn restriction_and_division() {
        let x = ms(&[3, 6, 9, 4]);
        let (x3, c) = x.restrict_divisible(3);
        assert_eq!(x3.unwrap(), ms(&[3, 6, 9]));
        assert_eq!(c, 1);
        let (x1, c) = x.restrict_divisible(1);
        assert_eq!(x1.unwrap(), x);
        assert_eq!(c, 0);
        let (x2, c) = ms(&[5, 7]).restrict_divisible(2);
        assert!(x2.is_none());
        assert_eq!(c, 2);

        let y = ms(&[6, 9, 12]);
        assert_eq!(y.divide(3).unwrap(), ms(&[2, 3, 4]));
        assert_eq!(y.divide(1).unwrap(), y);
        assert_eq!(y.divide(2), Err(Error::NotDivisible { value: 9, divisor: 2 }));
    }

    #[test]
    fn almost_divisor_examples() {
        assert!(ms(&[2, 4, 6, 8, 10, 3]).is_almost_divisor(2, &int(2)));
        assert!(!ms(&[1, 3, 5, 7]).is_almost_divisor(2, &int(1)));
        assert!(ms(&[6, 6]).is_almost_divisor(3, &int(0)));
        // Boundary: {1,2,3,4}: μσ/n² = 10/16, one odd... two odds; α=3.2 gives 2 exactly.
        assert!(ms(&[1, 2, 3, 4]).is_almost_divisor(2, &frac(16, 5)));
        assert!(!ms(&[1, 2, 3, 4]).is_almost_divisor(2, &frac(31, 10)));
    }

    #[test]
    fn normalize_examples() {
        let n = normalize_instance(&ms(&[1, 2, 3]), 5);
        assert_eq!(n.t, 1);
        assert!(n.mirrored);
        // {2, 3} exceed the mirrored target; {1} sums to it.
        assert_eq!(n.trivial_answer, Some(true));

        let n = normalize_instance(&ms(&[3, 5, 100]), 8);
        assert_eq!(n.x.unwrap(), ms(&[3, 5]));
        assert_eq!(n.dropped_count, 1);
        // {3,5} sums to 8 exactly.
        assert_eq!(n.trivial_answer, Some(true));

        let n = normalize_instance(&ms(&[1, 2, 3]), 7);
        assert_eq!(n.trivial_answer, Some(false));
        assert_eq!(normalize_instance(&ms(&[1, 2, 3]), 0).trivial_answer, Some(true));
        assert_eq!(normalize_instance(&ms(&[1, 2, 3]), 6).trivial_answer, Some(true));
    }

    #[test]
    fn normalize_keeps_target_at_most_half() {
        let n = normalize_instance(&ms(&[3, 5, 100, 7, 4]), 12);
        assert_eq!(n.trivial_answer, None);
        assert!(n.mirrored);
        assert_eq!(n.t, 7);
        assert_eq!(n.dropped_count, 1);
        let x = n.x.unwrap();
        assert!(2 * n.t <= x.sum());
        assert!(x.max() <= n.t);
    }

    #[test]
    fn helpers() {
        let x = ms(&[1, 1, 2, 5, 5, 5]);
        assert_eq!(x.smallest(3).unwrap(), ms(&[1, 1, 2]));
        assert_eq!(x.smallest(0), None);
        assert_eq!(x.not_divisible_by(5).unwrap(), ms(&[1, 1, 2]));
        let u = MultiSet::max_union([&ms(&[1, 2]), &ms(&[1, 1, 3])]).unwrap();
        assert_eq!(u, ms(&[1, 1, 2, 3]));
        assert!(u.is_subset_of(&ms(&[1, 1, 2, 3, 3])));
        assert!(!u.is_subset_of(&ms(&[1, 2, 3])));
        assert_eq!(ms(&[1, 2]).scale(3).unwrap(), ms(&[3, 6]));
        assert!(ms(&[4, 4, 5, 5]).is_uniform());
        assert!(!ms(&[4, 5, 5]).is_uniform());
    }
}
