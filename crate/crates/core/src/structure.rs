//! Structural toolkit for dense multi-sets: representation counts and
//! buckets, uniform layers, remainder covers, the completeness precondition,
//! and empirical checks that `S(X)` contains a long interval or progression.
//!
//! Everything here is desk-scale. Representation counts cost `O(s²)` in the
//! support size and the sumset checks run the exact DP over `[0, σ]`.

use std::collections::BTreeSet;

use crate::divisor::find_almost_divisor;
use crate::error::{Error, Result};
use crate::factor::is_prime;
use crate::multiset::MultiSet;
use crate::oracle::subset_sums;
use crate::rational::{big, ceil_u64, int, log2_lower, log2_upper, Rational};

/// `f_X(z)`: ordered pairs `(a, b)` of support values with `a + b = z`,
/// weighted by the common multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepCounts {
    mul: u64,
    /// `f[z]` for `z ∈ [0, 2·mx]`.
    f: Vec<u64>,
}

impl RepCounts {
    pub fn get(&self, z: u64) -> u64 {
        usize::try_from(z).ok().and_then(|i| self.f.get(i)).copied().unwrap_or(0)
    }

    pub fn multiplicity(&self) -> u64 {
        self.mul
    }

    /// Non-zero entries in increasing `z`.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.f.iter().enumerate().filter(|(_, &c)| c > 0).map(|(z, &c)| (z as u64, c))
    }

    pub fn total(&self) -> u64 {
        self.f.iter().sum()
    }

    pub fn max_count(&self) -> u64 {
        self.f.iter().copied().max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bucket {
    pub v: u64,
    pub members: Vec<u64>,
}

impl Bucket {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// `S(X) ⊇ {a + s, a + 2s, …, a + m·s}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ApWitness {
    pub start: u64,
    pub step: u64,
    pub len: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemainderCover {
    pub r: MultiSet,
    pub tau: u64,
    pub primes_patched: BTreeSet<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntervalReport {
    pub ok: bool,
    pub first_miss: Option<u64>,
}

pub fn representation_counts(x: &MultiSet) -> Result<RepCounts> {
    if !x.is_uniform() {
        return Err(Error::NotUniform);
    }
    let support: Vec<u64> = x.support().collect();
    let mul = x.entries()[0].1;
    let mut f = vec![0u64; 2 * x.max() as usize + 1];
    for &a in &support {
        for &b in &support {
            f[(a + b) as usize] += mul;
        }
    }
    Ok(RepCounts { mul, f })
}

fn bucket_of(counts: &RepCounts, v: u64) -> Bucket {
    Bucket { v, members: counts.iter().filter(|&(_, c)| c >= v).map(|(z, _)| z).collect() }
}

/// `B_v = {z : f_X(z) ≥ v}`.
pub fn bucket(x: &MultiSet, v: u64) -> Result<Bucket> {
    if v == 0 {
        return Err(Error::InvalidInput("bucket threshold must be at least 1".into()));
    }
    Ok(bucket_of(&representation_counts(x)?, v))
}

/// Smallest `v ∈ (1, n]` with `|B_v| ≥ n/(3μ) + n²/(3vμ·log₂(2n))`.
///
/// `log₂(2n)` is replaced by a dyadic upper bound, which only lowers the
/// right-hand side.
pub fn select_bucket(x: &MultiSet) -> Result<(u64, Bucket)> {
    if !x.is_uniform() {
        return Err(Error::NotUniform);
    }
    if !x.is_dense(&int(7)) {
        return Err(Error::PreconditionFailed("X is not 7-dense: n² < 7·μ·mx".into()));
    }
    let p = x.profile();
    let counts = representation_counts(x)?;
    let log = log2_upper(2 * p.n);
    let (n, mul) = (big(p.n as u128), big(p.mul as u128));
    for v in 2..=p.n {
        let b = bucket_of(&counts, v);
        let need = n.clone() / (int(3) * &mul) + n.clone() * &n / (int(3) * big(v as u128) * &mul * &log);
        if big(b.len() as u128) >= need {
            return Ok((v, b));
        }
    }
    Err(Error::InternalInvariantViolation("no bucket meets the size bound".into()))
}

/// Layer `r` keeps `2^r` copies of every value whose multiplicity lies in
/// `[2^r, 2^{r+1})`. Returns the largest layer, smallest `r` on ties.
pub fn uniform_layer(x: &MultiSet) -> (u32, MultiSet) {
    let top = 63 - x.profile().mul.leading_zeros();
    let mut best: Option<(u64, u32, Vec<(u64, u64)>)> = None;
    for r in 0..=top {
        let copies = 1u64 << r;
        let layer: Vec<(u64, u64)> =
            x.entries().iter().filter(|&&(_, m)| m >> r == 1).map(|&(v, _)| (v, copies)).collect();
        let size = layer.len() as u64 * copies;
        if best.as_ref().is_none_or(|(s, _, _)| size > *s) {
            best = Some((size, r, layer));
        }
    }
    let (_, r, layer) = best.expect("at least one layer");
    (r, MultiSet::from_counts(layer).expect("the largest layer is non-empty"))
}

/// `|X_r| ≥ n/(2·log₂(2μ))`, checked against a lower bound of the logarithm
/// so that a pass is a pass for the true value.
pub fn layer_meets_bound(x: &MultiSet, layer: &MultiSet) -> bool {
    let p = x.profile();
    int(2) * big(layer.len() as u128) * log2_lower(2 * p.mul) >= big(p.n as u128)
}

/// Remainder cover with all preconditions checked. When
/// `8α·log₂(2n) ≥ δ` the whole of `X` already meets the size and sum bounds
/// and is returned as is.
pub fn build_remainder_cover(x: &MultiSet, alpha: &Rational, delta: &Rational) -> Result<RemainderCover> {
    if *alpha < int(1) {
        return Err(Error::PreconditionFailed("α ≥ 1 does not hold".into()));
    }
    if !x.is_dense(delta) {
        return Err(Error::PreconditionFailed("X is not δ-dense: n² < δ·μ·mx".into()));
    }
    if let Some(d) = find_almost_divisor(x, alpha)? {
        return Err(Error::PreconditionFailed(format!("X has the α-almost divisor {d}")));
    }
    // A lower bound on the logarithm: taking this branch is then justified
    // for the true value too.
    if int(8) * alpha * log2_lower(2 * x.len()) >= *delta {
        let tau = cover_tau(x, alpha);
        return Ok(RemainderCover { r: x.clone(), tau, primes_patched: BTreeSet::new() });
    }
    remainder_cover_core(x, alpha)
}

fn cover_tau(x: &MultiSet, alpha: &Rational) -> u64 {
    ceil_u64(&x.profile().almost_divisor_budget(alpha)).expect("τ fits in u64")
}

/// The construction itself: `τ = ⌈αμσ/n²⌉`, `R′` the `2τ` smallest
/// elements, and for every prime `p ≤ τ` that `R′` leaves short, the `τ`
/// smallest elements not divisible by `p`. No density check; fails only if
/// some patched prime has fewer than `τ` non-multiples, i.e. is an α-almost
/// divisor.
pub fn remainder_cover_core(x: &MultiSet, alpha: &Rational) -> Result<RemainderCover> {
    let tau = cover_tau(x, alpha);
    let Some(base) = x.smallest(2 * tau) else {
        return Ok(RemainderCover { r: x.clone(), tau, primes_patched: BTreeSet::new() });
    };
    let mut parts = vec![base.clone()];
    let mut primes_patched = BTreeSet::new();
    for p in (2..=tau).filter(|&p| is_prime(p)) {
        if base.count_not_divisible(p) >= tau {
            continue;
        }
        let patch = x
            .not_divisible_by(p)
            .and_then(|rest| rest.smallest(tau))
            .filter(|r| r.len() == tau)
            .ok_or_else(|| Error::PreconditionFailed(format!("fewer than τ elements avoid {p}")))?;
        parts.push(patch);
        primes_patched.insert(p);
    }
    let r = MultiSet::max_union(&parts)?;
    Ok(RemainderCover { r, tau, primes_patched })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverAudit {
    pub subset: bool,
    /// `|R̄(d)| ≥ d` for every `1 < d ≤ τ`.
    pub covers: bool,
    /// `|R| ≤ 8α·log₂(2n)·n/δ`.
    pub size_bound: bool,
    /// `σ_R ≤ 8α·log₂(2n)·σ/δ`.
    pub sum_bound: bool,
}

impl CoverAudit {
    pub fn all(&self) -> bool {
        self.subset && self.covers && self.size_bound && self.sum_bound
    }
}

/// Recomputes the guarantees of a cover. The bounds use an upper bound of
/// the logarithm, i.e. they are checked against a slightly looser limit.
pub fn audit_cover(x: &MultiSet, alpha: &Rational, delta: &Rational, cover: &RemainderCover) -> CoverAudit {
    let factor = int(8) * alpha * log2_upper(2 * x.len()) / delta;
    CoverAudit {
        subset: cover.r.is_subset_of(x),
        covers: check_completeness_precondition(&cover.r, cover.tau),
        size_bound: big(cover.r.len() as u128) <= factor.clone() * big(x.len() as u128),
        sum_bound: big(cover.r.sum() as u128) <= factor * big(x.sum() as u128),
    }
}

/// `|X̄(d)| ≥ d` for every `1 < d ≤ τ`.
pub fn check_completeness_precondition(x: &MultiSet, tau: u64) -> bool {
    (2..=tau).all(|d| x.count_not_divisible(d) >= d)
}

/// Checks `[λ, σ − λ] ⊆ S(X)` with one full DP pass.
pub fn verify_interval(x: &MultiSet, lambda: u64) -> IntervalReport {
    let sigma = x.sum();
    if lambda.saturating_mul(2) > sigma {
        return IntervalReport { ok: true, first_miss: None };
    }
    let sums = subset_sums(x);
    let miss = sums.first_zero_from(lambda as usize).map(|t| t as u64).filter(|&t| t <= sigma - lambda);
    IntervalReport { ok: miss.is_none(), first_miss: miss }
}

/// Looks for `{a + s, …, a + m·s} ⊆ S(X)` with `m ≥ min_len`, `a ≥ 0` and
/// `s ≤ max_step`. Prefers the smallest step, then the smallest start; the
/// reported length is the full run from that start.
pub fn find_ap_in_sums(x: &MultiSet, min_len: u64, max_step: u64) -> Option<ApWitness> {
    let sums = subset_sums(x);
    let sigma = x.sum();
    (1..=max_step.min(sigma.max(1))).find_map(|s| {
        let mut best: Option<ApWitness> = None;
        for c in 0..s.min(sigma + 1) {
            let mut z = c;
            while z <= sigma {
                if !sums.get(z as usize) {
                    z += s;
                    continue;
                }
                let first = z;
                while z <= sigma && sums.get(z as usize) {
                    z += s;
                }
                let last = z - s;
                // the progression starts one step after `a`, and `a ≥ 0`
                let first = if first < s { first + s } else { first };
                if first > last {
                    continue;
                }
                let w = ApWitness { start: first - s, step: s, len: (last - first) / s + 1 };
                if w.len >= min_len && best.is_none_or(|b| w.start < b.start) {
                    best = Some(w);
                }
            }
        }
        best
    })
}

/// Whether every element of a witness is a subset sum.
pub fn witness_holds(x: &MultiSet, w: &ApWitness) -> bool {
    let sums = subset_sums(x);
    (1..=w.len).all(|i| {
        w.start
            .checked_add(i * w.step)
            .is_some_and(|z| z <= x.sum() && sums.get(z as usize))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::is_complete_mod;
    use crate::rational::frac;
    use proptest::prelude::*;

    fn ms(v: &[u64]) -> MultiSet {
        MultiSet::from_values(v).unwrap()
    }

    fn range(a: u64, b: u64) -> MultiSet {
        ms(&(a..=b).collect::<Vec<_>>())
    }

    #[test]
    fn counts_examples() {
        let f = representation_counts(&ms(&[1, 2, 3])).unwrap();
        assert_eq!(f.iter().collect::<Vec<_>>(), vec![(2, 1), (3, 2), (4, 3), (5, 2), (6, 1)]);
        let f = representation_counts(&ms(&[1, 2])).unwrap();
        assert_eq!(f.total(), 4);
        let f = representation_counts(&MultiSet::from_counts([(5, 2)]).unwrap()).unwrap();
        assert_eq!(f.iter().collect::<Vec<_>>(), vec![(10, 2)]);
        assert_eq!(representation_counts(&ms(&[1, 1, 2])), Err(Error::NotUniform));
    }

    #[test]
    fn bucket_examples() {
        let x = ms(&[1, 2, 3]);
        assert_eq!(bucket(&x, 2).unwrap().members, vec![3, 4, 5]);
        assert_eq!(bucket(&x, 3).unwrap().members, vec![4]);
        assert!(bucket(&x, 4).unwrap().is_empty());
    }

    #[test]
    fn select_bucket_examples() {
        let (v, b) = select_bucket(&range(1, 10)).unwrap();
        assert_eq!(v, 2);
        assert_eq!(b.members, (3..=19).collect::<Vec<_>>());
        let (v, b) = select_bucket(&range(1, 20)).unwrap();
        assert_eq!(v, 2);
        assert_eq!(b.len(), 37);
        assert!(matches!(select_bucket(&ms(&[1, 2, 3])), Err(Error::PreconditionFailed(_))));
    }

    #[test]
    fn layer_examples() {
        assert_eq!(uniform_layer(&ms(&[1, 1, 2, 3])), (0, ms(&[2, 3])));
        assert_eq!(uniform_layer(&range(1, 10)), (0, range(1, 10)));
        let fours = MultiSet::from_counts([(5, 4)]).unwrap();
        assert_eq!(uniform_layer(&fours), (2, fours.clone()));
        // multiplicity 6 keeps 4 copies
        let x = MultiSet::from_counts([(5, 6), (7, 1)]).unwrap();
        assert_eq!(uniform_layer(&x), (2, MultiSet::from_counts([(5, 4)]).unwrap()));
    }

    #[test]
    fn cover_examples() {
        let x = range(1, 20);
        let c = build_remainder_cover(&x, &int(2), &int(1)).unwrap();
        assert_eq!(c.r, x);

        let c = remainder_cover_core(&x, &int(2)).unwrap();
        // τ = ⌈2·210/400⌉ = 2, R′ = {1,2,3,4} already holds two odd numbers
        assert_eq!(c.tau, 2);
        assert!(c.primes_patched.is_empty());
        assert_eq!(c.r, ms(&[1, 2, 3, 4]));

        // τ = ⌈3·206/196⌉ = 4 and R′ = {2,…,16} is all even, so 2 is patched
        // with the four odd elements; six of R′ avoid 3
        let x = ms(&[2, 4, 6, 8, 10, 12, 14, 16, 18, 20, 21, 23, 25, 27]);
        let c = remainder_cover_core(&x, &int(3)).unwrap();
        assert_eq!(c.tau, 4);
        assert_eq!(c.primes_patched.iter().copied().collect::<Vec<_>>(), vec![2]);
        assert_eq!(c.r, ms(&[2, 4, 6, 8, 10, 12, 14, 16, 21, 23, 25, 27]));
        assert!(check_completeness_precondition(&c.r, c.tau));
        assert!(check_completeness_precondition(&c.r, c.tau));

        let evens = ms(&(1..=20).map(|i| 2 * i).collect::<Vec<_>>());
        assert!(matches!(build_remainder_cover(&evens, &int(1), &int(1)), Err(Error::PreconditionFailed(_))));
        assert!(matches!(build_remainder_cover(&x, &frac(1, 2), &int(1)), Err(Error::PreconditionFailed(_))));
    }

    #[test]
    fn cover_on_dense_set_meets_bounds() {
        // n = 2000, mx = 2000: dense for δ = 2000 and 8·log₂(4000) < 2000.
        let x = range(1, 2000);
        let (alpha, delta) = (int(1), int(2000));
        let c = build_remainder_cover(&x, &alpha, &delta).unwrap();
        assert!(c.r.len() < x.len());
        let audit = audit_cover(&x, &alpha, &delta, &c);
        assert!(audit.all(), "{audit:?}");
    }

    #[test]
    fn completeness_examples() {
        assert!(check_completeness_precondition(&range(1, 10), 3));
        assert!(!check_completeness_precondition(&ms(&[2, 4, 6]), 2));
        assert!(check_completeness_precondition(&ms(&[2, 4, 6]), 1));
    }

    #[test]
    fn interval_examples() {
        assert_eq!(verify_interval(&range(1, 20), 1), IntervalReport { ok: true, first_miss: None });
        let evens = ms(&(1..=10).map(|i| 2 * i).collect::<Vec<_>>());
        assert_eq!(verify_interval(&evens, 5).first_miss, Some(5));
        assert_eq!(verify_interval(&ms(&[1, 5, 50]), 2).first_miss, Some(2));
        assert!(verify_interval(&ms(&[1, 5, 50]), 40).ok);
    }

    #[test]
    fn ap_examples() {
        let w = find_ap_in_sums(&range(1, 10), 20, 1).unwrap();
        assert_eq!((w.start, w.step, w.len), (0, 1, 55));
        let evens = ms(&(1..=10).map(|i| 2 * i).collect::<Vec<_>>());
        let w = find_ap_in_sums(&evens, 20, 2).unwrap();
        assert_eq!(w.step, 2);
        assert!(witness_holds(&evens, &w));
        assert_eq!(find_ap_in_sums(&ms(&[1, 100]), 5, 3), None);
    }

    fn uniform_strategy() -> impl Strategy<Value = MultiSet> {
        (proptest::collection::btree_set(1u64..120, 1..25), 1u64..4)
            .prop_map(|(s, m)| MultiSet::from_counts(s.into_iter().map(|v| (v, m))).unwrap())
    }

    proptest! {
        #[test]
        fn count_identities(x in uniform_strategy()) {
            let p = x.profile();
            let f = representation_counts(&x).unwrap();
            prop_assert!(f.max_count() <= p.n);
            prop_assert!(f.iter().all(|(z, _)| z >= 2 && z <= 2 * p.mx));
            prop_assert_eq!(f.total() * p.mul, p.n * p.n);
            let mut prev: Option<Vec<u64>> = None;
            for v in 1..=p.n + 1 {
                let b = bucket(&x, v).unwrap();
                prop_assert!(b.len() as u64 <= 2 * p.mx);
                if v > p.n { prop_assert!(b.is_empty()); }
                if let Some(prev) = &prev {
                    prop_assert!(b.members.iter().all(|z| prev.binary_search(z).is_ok()));
                }
                prev = Some(b.members);
            }
        }

        #[test]
        fn layer_guarantee(counts in proptest::collection::btree_map(1u64..200, 1u64..40, 1..30)) {
            let x = MultiSet::from_counts(counts).unwrap();
            let (r, layer) = uniform_layer(&x);
            prop_assert!(layer.is_uniform());
            prop_assert_eq!(layer.entries()[0].1, 1u64 << r);
            prop_assert!(layer.is_subset_of(&x));
            prop_assert!(layer_meets_bound(&x, &layer));
        }

        #[test]
        fn precondition_implies_completeness(values in proptest::collection::vec(1u64..300, 1..60), tau in 1u64..12) {
            let x = MultiSet::from_values(&values).unwrap();
            if check_completeness_precondition(&x, tau) {
                for d in 1..=tau {
                    prop_assert!(is_complete_mod(&x, d), "d = {}", d);
                }
            }
        }

        #[test]
        fn interval_report_is_exact(values in proptest::collection::vec(1u64..40, 1..12), lambda in 0u64..60) {
            let x = MultiSet::from_values(&values).unwrap();
            let sums = crate::oracle::enumerate_sums(&values);
            let sigma = x.sum();
            let expect = (lambda..=sigma.saturating_sub(lambda))
                .filter(|_| 2 * lambda <= sigma)
                .find(|t| !sums.contains(t));
            prop_assert_eq!(verify_interval(&x, lambda).first_miss, expect);
        }

        #[test]
        fn witnesses_are_sound(values in proptest::collection::vec(1u64..30, 1..10), min_len in 1u64..20, max_step in 1u64..6) {
            let x = MultiSet::from_values(&values).unwrap();
            if let Some(w) = find_ap_in_sums(&x, min_len, max_step) {
                prop_assert!(w.len >= min_len && w.step <= max_step);
                prop_assert!(witness_holds(&x, &w));
            }
        }
    }
}
