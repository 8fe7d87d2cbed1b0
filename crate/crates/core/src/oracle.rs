//! Exact ground truth: the word-packed Bellman dynamic program over `[0, t]`
//! and plain `2^n` enumeration for tiny inputs.

use crate::bitset::BitSet;
use crate::multiset::MultiSet;

/// Splits a multiplicity into powers of two plus a remainder, so that
/// `c` copies of `v` become `O(log c)` single items whose subset sums are
/// exactly `{0, v, …, c·v}`.
pub fn binary_split(count: u64) -> Vec<u64> {
    let mut parts = Vec::new();
    let mut left = count;
    let mut k = 1;
    while left > 0 {
        let take = k.min(left);
        parts.push(take);
        left -= take;
        k <<= 1;
    }
    parts
}

/// Bitset of all subset sums of `x` in `[0, limit]`.
pub fn subset_sums_upto(x: &MultiSet, limit: u64) -> BitSet {
    let len = usize::try_from(limit).expect("limit exceeds address space") + 1;
    let mut dp = BitSet::new(len);
    dp.set(0);
    for &(v, m) in x.entries() {
        for part in binary_split(m) {
            let shift = v.saturating_mul(part);
            if shift <= limit {
                dp.or_shift_left_in_place(shift as usize);
            }
        }
    }
    dp
}

/// Full subset-sum table `S(X) ⊆ [0, σ]`.
pub fn subset_sums(x: &MultiSet) -> BitSet {
    subset_sums_upto(x, x.sum())
}

/// `t ∈ S(X)` by dynamic programming over `[0, t]`.
pub fn oracle_decide(x: &MultiSet, t: u64) -> bool {
    if t > x.sum() {
        return false;
    }
    subset_sums_upto(x, t).get(t as usize)
}

/// `t ∈ S(X)` by enumerating all `2^n` sub-multi-sets element by element;
/// only for `n ≤ 25`.
pub fn enumerate_decide(x: &MultiSet, t: u64) -> bool {
    let values = x.to_values();
    assert!(values.len() <= 25, "enumeration limited to 25 elements");
    (0u32..1 << values.len()).any(|mask| {
        values
            .iter()
            .enumerate()
            .filter(|&(i, _)| mask >> i & 1 == 1)
            .map(|(_, &v)| v)
            .sum::<u64>()
            == t
    })
}

/// All subset sums by enumeration, sorted and deduplicated.
pub fn enumerate_sums(values: &[u64]) -> Vec<u64> {
    assert!(values.len() <= 25, "enumeration limited to 25 elements");
    let mut sums = vec![0u64];
    for &v in values {
        let extra: Vec<u64> = sums.iter().map(|s| s + v).collect();
        sums.extend(extra);
    }
    sums.sort_unstable();
    sums.dedup();
    sums
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ms(v: &[u64]) -> MultiSet {
        MultiSet::from_values(v).unwrap()
    }

    #[test]
    fn decide_examples() {
        assert!(oracle_decide(&ms(&[3, 5, 8]), 11));
        assert!(!oracle_decide(&ms(&[3, 5, 8]), 2));
        assert!(oracle_decide(&ms(&[2, 2, 2]), 6));
        assert!(!oracle_decide(&ms(&[2, 2, 2]), 7));
        assert!(oracle_decide(&ms(&[2, 2, 2]), 0));
    }

    #[test]
    fn binary_split_covers_count() {
        for c in 1..200u64 {
            let parts = binary_split(c);
            assert_eq!(parts.iter().sum::<u64>(), c);
            // every k in [0, c] is a subset sum of the parts
            let sums = enumerate_sums(&parts);
            assert_eq!(sums, (0..=c).collect::<Vec<_>>());
        }
    }

    proptest! {
        #[test]
        fn dp_matches_enumeration(values in proptest::collection::vec(1u64..30, 1..12)) {
            let x = MultiSet::from_values(&values).unwrap();
            let table = subset_sums(&x);
            let sums = enumerate_sums(&values);
            let from_dp: Vec<u64> = table.iter_ones().map(|i| i as u64).collect();
            prop_assert_eq!(from_dp, sums);
        }
    }
}
