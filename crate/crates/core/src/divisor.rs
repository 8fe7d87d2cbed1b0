//! Almost divisors and the stripping loop that removes them.
//!
//! Starting from `X₀ = X`, each round finds the smallest prime `dᵢ` that is
//! an α-almost divisor of `Xᵢ₋₁` (measured against `Xᵢ₋₁`'s own `n`, `μ`,
//! `σ`) and continues with `Xᵢ = Xᵢ₋₁(dᵢ)/dᵢ`. The loop stops once no prime
//! qualifies. Every divisor `> 1` of an almost divisor is again one, so at
//! that point no `d > 1` qualifies either.
//!
//! Factorizations are computed once with the batch algorithm and carried
//! along: dividing by `dᵢ` only lowers one exponent.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::factor::factorize_batch;
use crate::multiset::{MultiSet, Profile};
use crate::rational::{big, int, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step {
    pub prime: u64,
    /// `|Xᵢ|` after dividing by `prime`.
    pub size: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionTrace {
    pub d: u64,
    pub steps: Vec<Step>,
    /// `X′ = X(d)/d`.
    pub final_set: MultiSet,
}

/// One distinct value with its multiplicity and prime factorization.
#[derive(Debug, Clone)]
struct Factored {
    value: u64,
    count: u64,
    factors: Vec<(u64, u32)>,
}

fn factor_set(x: &MultiSet) -> Result<Vec<Factored>> {
    let values: Vec<u64> = x.support().collect();
    let facts = factorize_batch(&values, x.max())?;
    Ok(x
        .entries()
        .iter()
        .zip(facts)
        .map(|(&(value, count), f)| Factored { value, count, factors: f.factors })
        .collect())
}

/// Smallest prime whose complement count fits the budget of `profile`.
fn smallest_prime_almost_divisor(set: &[Factored], profile: &Profile, alpha: &Rational) -> Option<u64> {
    // A prime dividing nothing has complement n; if that fits, 2 wins.
    if profile.within_almost_divisor_budget(profile.n, alpha) {
        return Some(2);
    }
    let mut divisible: BTreeMap<u64, u64> = BTreeMap::new();
    for f in set {
        for &(p, _) in &f.factors {
            *divisible.entry(p).or_insert(0) += f.count;
        }
    }
    divisible
        .into_iter()
        .find(|&(_, c)| profile.within_almost_divisor_budget(profile.n - c, alpha))
        .map(|(p, _)| p)
}

fn profile_of(set: &[Factored]) -> Profile {
    Profile {
        n: set.iter().map(|f| f.count).sum(),
        mx: set.iter().map(|f| f.value).max().unwrap_or(0),
        mul: set.iter().map(|f| f.count).max().unwrap_or(0),
        sum: set.iter().map(|f| f.value * f.count).sum(),
        support: set.len() as u64,
    }
}

/// The smallest prime α-almost divisor of `x`, if any `d > 1` qualifies.
///
/// Counts, for every prime, how many elements it divides (from the batch
/// factorization of the distinct values), so the large prime factor above
/// `√mx` is counted too.
pub fn find_almost_divisor(x: &MultiSet, alpha: &Rational) -> Result<Option<u64>> {
    let set = factor_set(x)?;
    Ok(smallest_prime_almost_divisor(&set, &x.profile(), alpha))
}

/// Guarded entry point: checks `X` is δ-dense and `16α ≤ δ`, then
/// strips almost divisors.
pub fn strip_almost_divisors(x: &MultiSet, alpha: &Rational, delta: &Rational) -> Result<ReductionTrace> {
    if *alpha < int(0) {
        return Err(Error::PreconditionFailed("α must be non-negative".into()));
    }
    if *delta < int(1) {
        return Err(Error::PreconditionFailed("δ must be at least 1".into()));
    }
    if !x.is_dense(delta) {
        return Err(Error::PreconditionFailed("X is not δ-dense: n² < δ·μ·mx".into()));
    }
    if int(16) * alpha > *delta {
        return Err(Error::PreconditionFailed("16α ≤ δ does not hold".into()));
    }
    strip_almost_divisors_unchecked(x, alpha)
}

/// The stripping loop without the density preconditions. Without them the
/// postconditions of [`strip_almost_divisors`] need not hold, but the loop
/// still ends with a set that has no α-almost divisor.
pub fn strip_almost_divisors_unchecked(x: &MultiSet, alpha: &Rational) -> Result<ReductionTrace> {
    let mut set = factor_set(x)?;
    let mut d: u64 = 1;
    let mut steps = Vec::new();
    while let Some(p) = smallest_prime_almost_divisor(&set, &profile_of(&set), alpha) {
        set.retain(|f| f.factors.iter().any(|&(q, _)| q == p));
        if set.is_empty() {
            return Err(Error::InternalInvariantViolation(format!("X({p}) is empty")));
        }
        for f in &mut set {
            f.value /= p;
            let slot = f.factors.iter().position(|&(q, _)| q == p).expect("p divides every survivor");
            f.factors[slot].1 -= 1;
            if f.factors[slot].1 == 0 {
                f.factors.remove(slot);
            }
        }
        d = d
            .checked_mul(p)
            .ok_or_else(|| Error::InternalInvariantViolation("divisor overflow".into()))?;
        steps.push(Step { prime: p, size: set.iter().map(|f| f.count).sum() });
    }
    let final_set = MultiSet::from_counts(set.iter().map(|f| (f.value, f.count)))?;
    Ok(ReductionTrace { d, steps, final_set })
}

/// Outcome of re-checking every guarantee of the stripping loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StripAudit {
    pub no_almost_divisor: bool,
    pub dense: bool,
    /// `d ≤ 4μσ/n²`.
    pub d_within_spread: bool,
    /// `d ≤ 4μ·mx/n`.
    pub d_linear: bool,
    /// `|X′| ≥ 0.75n`.
    pub size_kept: bool,
    /// `σ_{X′} ≥ 0.75σ/d`.
    pub sum_kept: bool,
    /// `|Xᵢ| ≥ n − 4αμσ/n²` after every step.
    pub sizes_after_steps: bool,
    /// Number of steps `≤ log₂ mx`.
    pub step_count: bool,
}

impl StripAudit {
    pub fn all(&self) -> bool {
        self.no_almost_divisor
            && self.dense
            && self.d_within_spread
            && self.d_linear
            && self.size_kept
            && self.sum_kept
            && self.sizes_after_steps
            && self.step_count
    }
}

/// `true` iff some integer `d ∈ [2, mx]` is an α-almost divisor, by trying
/// all of them.
pub fn has_almost_divisor_brute(x: &MultiSet, alpha: &Rational) -> bool {
    (2..=x.max()).any(|d| x.is_almost_divisor(d, alpha))
}

/// Recomputes every postcondition of [`strip_almost_divisors`] from scratch.
/// The almost-divisor check is brute force over `[2, mx′]`.
pub fn audit_strip(x: &MultiSet, alpha: &Rational, delta: &Rational, trace: &ReductionTrace) -> StripAudit {
    let p = x.profile();
    let out = &trace.final_set;
    let q = out.profile();
    let d = big(trace.d as u128);
    let n = p.n as u128;
    let mut step_bound = 0u32;
    while (1u128 << (step_bound + 1)) <= p.mx as u128 {
        step_bound += 1;
    }
    let size_floor = big(n) - int(4) * alpha * big(p.mul as u128 * p.sum as u128) / big(n * n);
    StripAudit {
        no_almost_divisor: !has_almost_divisor_brute(out, alpha),
        dense: out.is_dense(delta),
        d_within_spread: d.clone() * big(n * n) <= int(4) * big(p.mul as u128 * p.sum as u128),
        d_linear: d.clone() * big(n) <= int(4) * big(p.mul as u128 * p.mx as u128),
        size_kept: int(4) * big(q.n as u128) >= int(3) * big(n),
        sum_kept: int(4) * big(q.sum as u128) * d >= int(3) * big(p.sum as u128),
        sizes_after_steps: trace.steps.iter().all(|s| big(s.size as u128) >= size_floor),
        step_count: trace.steps.len() as u32 <= step_bound,
    }
}
