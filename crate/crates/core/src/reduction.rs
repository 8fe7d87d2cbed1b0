//! Hard Subset Sum instances from k-SUM.
//!
//! A parameter setting `(τ, ξ, σ)` fixes how `t`, `mx` and `σ` scale with
//! `n`. For hard settings a k-SUM instance `(Z, T)` over `[U]` becomes a set
//! `X = X₁ ∪ X₂ ∪ X₃` and a target `t` with `t = Θ(n^τ)`, `mx = Θ(n^ξ)`,
//! `σ_X = Θ(n^σ)`. Writing `B = ⌈U^β⌉`, `G = ⌈U^γ⌉`, `A = ⌈U^α⌉` and
//! `H = 8k²·U·B`:
//!
//! ```text
//! X₁ = { H + z·4kB + 2B     : z ∈ Z }
//! X₂ = { G·H + j·4kB + 1    : j ∈ [1, B] }
//! X₃ = { H + j·4kB          : j ∈ [1, A] }
//! t  = (k + B·G)·H + (T + B(B+1)/2)·4kB + 2kB + B
//! ```
//!
//! Parity forces all of `X₂` into any solution, the residue mod `4kB` forces
//! `k (mod 2k)` elements of `X₁`, and the size of `t` caps the rest at `k`.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::multiset::MultiSet;
use crate::rational::{display, int, to_f64, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Trivial,
    Nontrivial,
    HardNontrivial,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Trivial => "trivial",
            Classification::Nontrivial => "nontrivial",
            Classification::HardNontrivial => "hard-nontrivial",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParameterSetting {
    pub tau: Rational,
    pub xi: Rational,
    pub sigma: Rational,
    pub classification: Classification,
    /// Non-triviality inequalities that fail, empty unless trivial.
    pub violations: Vec<&'static str>,
}

impl fmt::Display for ParameterSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", display(&self.tau), display(&self.xi), display(&self.sigma))
    }
}

pub fn validate_setting(tau: &Rational, xi: &Rational, sigma: &Rational) -> ParameterSetting {
    let checks: [(bool, &'static str); 5] = [
        (*sigma >= int(2), "σ ≥ 2"),
        (*xi >= int(1), "1 ≤ ξ"),
        (xi <= tau, "ξ ≤ τ"),
        (tau <= sigma, "τ ≤ σ"),
        (*sigma <= int(1) + xi, "σ ≤ 1 + ξ"),
    ];
    let violations: Vec<&'static str> = checks.iter().filter(|(ok, _)| !ok).map(|&(_, name)| name).collect();
    let classification = if !violations.is_empty() {
        Classification::Trivial
    } else if *tau < xi + sigma - int(2) {
        Classification::HardNontrivial
    } else {
        Classification::Nontrivial
    };
    ParameterSetting { tau: tau.clone(), xi: xi.clone(), sigma: sigma.clone(), classification, violations }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exponents {
    pub alpha: Rational,
    pub beta: Rational,
    pub gamma: Rational,
}

/// `α = 1/(ξ+σ−τ−1)`, `β = ασ − α − 1`, `γ = α(ξ−σ+1)`.
pub fn exponents(setting: &ParameterSetting) -> Result<Exponents> {
    if setting.classification != Classification::HardNontrivial {
        return Err(Error::PreconditionFailed(format!("setting {setting} is {}", setting.classification)));
    }
    let (tau, xi, sigma) = (&setting.tau, &setting.xi, &setting.sigma);
    let alpha = int(1) / (xi + sigma - tau - int(1));
    let beta = &alpha * sigma - &alpha - int(1);
    let gamma = &alpha * (xi - sigma + int(1));
    Ok(Exponents { alpha, beta, gamma })
}

/// Which inequalities between the exponents hold, in exact arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExponentAudit {
    pub alpha_in_unit: bool,
    pub beta_nonnegative: bool,
    pub gamma_nonnegative: bool,
    pub beta_gamma_within_alpha: bool,
    pub beta_within_alpha: bool,
}

impl ExponentAudit {
    pub fn all(&self) -> bool {
        self.alpha_in_unit
            && self.beta_nonnegative
            && self.gamma_nonnegative
            && self.beta_gamma_within_alpha
            && self.beta_within_alpha
    }
}

pub fn audit_exponents(e: &Exponents) -> ExponentAudit {
    ExponentAudit {
        alpha_in_unit: e.alpha > int(0) && e.alpha < int(1),
        beta_nonnegative: !e.beta.is_negative(),
        gamma_nonnegative: !e.gamma.is_negative(),
        beta_gamma_within_alpha: &e.beta + &e.gamma <= e.alpha,
        beta_within_alpha: e.beta <= e.alpha,
    }
}

/// `⌈u^r⌉` for `r = p/q ≥ 0`: the least `m` with `m^q ≥ u^p`, by binary
/// search on exact big integers.
pub fn ceil_pow(u: u64, r: &Rational) -> Result<u64> {
    if r.is_negative() {
        return Err(Error::InvalidInput("negative exponent".into()));
    }
    if u <= 1 || r.is_zero() {
        return Ok(if r.is_zero() { 1 } else { u });
    }
    let p = r.numer().to_u32().ok_or_else(|| Error::InvalidInput("exponent numerator too large".into()))?;
    let q = r.denom().to_u32().ok_or_else(|| Error::InvalidInput("exponent denominator too large".into()))?;
    let target = BigUint::from(u).pow(p);
    // m ≤ u^⌈p/q⌉
    let hi_bound = BigUint::from(u).pow(p.div_ceil(q));
    let (mut lo, mut hi) = (BigUint::one(), hi_bound);
    while lo < hi {
        let mid: BigUint = (&lo + &hi) >> 1usize;
        if mid.pow(q) >= target {
            hi = mid;
        } else {
            lo = mid + 1u32;
        }
    }
    lo.to_u64().ok_or(Error::OutOfRange { value: u64::MAX, limit: u64::MAX })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KSumInstance {
    /// Distinct, sorted, within `[1, u]`.
    pub z: Vec<u64>,
    pub target: u64,
    pub k: u64,
    pub u: u64,
}

impl KSumInstance {
    pub fn new(mut z: Vec<u64>, target: u64, k: u64, u: u64) -> Result<Self> {
        if k < 3 {
            return Err(Error::InvalidInput("k-SUM needs k ≥ 3".into()));
        }
        z.sort_unstable();
        z.dedup();
        if z.first().is_some_and(|&v| v == 0) || z.last().is_some_and(|&v| v > u) {
            return Err(Error::InvalidInput(format!("Z must lie in [1, {u}]")));
        }
        Ok(KSumInstance { z, target, k, u })
    }
}

/// Whether the `k` summands must be distinct elements of `Z` or may repeat.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KSumSemantics {
    Distinct,
    WithRepetition,
}

/// Brute-force k-SUM: reachable sums by number of summands, capped at `T`.
pub fn ksum_decide(inst: &KSumInstance, semantics: KSumSemantics) -> bool {
    let (k, t) = (inst.k as usize, inst.target);
    let len = t as usize + 1;
    // layer[c] = sums of exactly c summands
    let mut layer: Vec<BitSet> = (0..=k).map(|_| BitSet::new(len)).collect();
    layer[0].set(0);
    for &z in &inst.z {
        if z > t {
            continue;
        }
        match semantics {
            KSumSemantics::Distinct => {
                // downward, so each element is used at most once
                for c in (1..=k).rev() {
                    let moved = shift_up(&layer[c - 1], z as usize);
                    layer[c].or_assign(&moved);
                }
            }
            KSumSemantics::WithRepetition => {
                for c in 1..=k {
                    let moved = shift_up(&layer[c - 1], z as usize);
                    layer[c].or_assign(&moved);
                }
            }
        }
    }
    layer[k].get(t as usize)
}

fn shift_up(bits: &BitSet, by: usize) -> BitSet {
    let mut out = BitSet::new(bits.len());
    for i in bits.iter_ones() {
        if i + by < bits.len() {
            out.set(i + by);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionOutput {
    pub x: MultiSet,
    pub t: u64,
    pub exponents: Exponents,
    /// `|X₁|, |X₂|, |X₃|`.
    pub blocks: [u64; 3],
    pub x1: Vec<u64>,
    pub x2: Vec<u64>,
    pub x3: Vec<u64>,
    /// Elements written, for the linear-time check.
    pub work: u64,
}

fn checked(v: Option<u128>) -> Result<u64> {
    v.and_then(|v| u64::try_from(v).ok())
        .ok_or(Error::OutOfRange { value: u64::MAX, limit: u64::MAX })
}

pub fn reduce_ksum(inst: &KSumInstance, setting: &ParameterSetting) -> Result<ReductionOutput> {
    let e = exponents(setting)?;
    let u = inst.u;
    let k = inst.k as u128;
    let a = ceil_pow(u, &e.alpha)?;
    let b = ceil_pow(u, &e.beta)?;
    let g = ceil_pow(u, &e.gamma)?;
    if inst.z.len() as u64 > a {
        return Err(Error::PreconditionFailed(format!("|Z| = {} exceeds ⌈U^α⌉ = {a}", inst.z.len())));
    }
    if inst.target as u128 > k * u as u128 {
        return Err(Error::PreconditionFailed("T ≤ kU does not hold".into()));
    }
    let (b128, g128) = (b as u128, g as u128);
    let head = (8 * k * k).checked_mul(u as u128).and_then(|v| v.checked_mul(b128));
    let head = checked(head)? as u128;
    let step = 4 * k * b128;
    let mut work = 0u64;
    let mut block = |vals: &mut dyn Iterator<Item = Option<u128>>| -> Result<Vec<u64>> {
        let out = vals.map(checked).collect::<Result<Vec<u64>>>()?;
        work += out.len() as u64;
        Ok(out)
    };
    let x1 = block(&mut inst.z.iter().map(|&z| Some(head + z as u128 * step + 2 * b128)))?;
    let x2 = block(&mut (1..=b128).map(|j| g128.checked_mul(head).map(|v| v + j * step + 1)))?;
    let x3 = block(&mut (1..=a as u128).map(|j| Some(head + j * step)))?;
    let t = (k + b128 * g128)
        .checked_mul(head)
        .and_then(|v| v.checked_add((inst.target as u128 + b128 * (b128 + 1) / 2) * step))
        .map(|v| v + 2 * k * b128 + b128);
    let t = checked(t)?;
    let mut values = Vec::with_capacity(x1.len() + x2.len() + x3.len());
    values.extend(&x1);
    values.extend(&x2);
    values.extend(&x3);
    let x = MultiSet::from_values(&values)?;
    if x.profile().mul != 1 {
        return Err(Error::InternalInvariantViolation("constructed numbers collide".into()));
    }
    Ok(ReductionOutput { x, t, exponents: e, blocks: [x1.len() as u64, b, a], x1, x2, x3, work })
}

/// `n/U^α`, `mx/n^ξ`, `σ/n^σ`, `t/n^τ` for one reduction output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ratios {
    pub n: f64,
    pub mx: f64,
    pub sum: f64,
    pub t: f64,
}

impl Ratios {
    pub fn as_array(&self) -> [f64; 4] {
        [self.n, self.mx, self.sum, self.t]
    }

    /// Smallest `ρ` with every ratio in `[1/ρ, ρ]`.
    pub fn spread(&self) -> f64 {
        self.as_array().iter().map(|r| r.max(1.0 / r)).fold(1.0, f64::max)
    }
}

pub fn ratios(out: &ReductionOutput, setting: &ParameterSetting, u: u64) -> Ratios {
    let p = out.x.profile();
    let ln_n = (p.n as f64).ln();
    let rel = |v: u64, exp: &Rational, base_ln: f64| ((v as f64).ln() - to_f64(exp) * base_ln).exp();
    Ratios {
        n: rel(p.n, &out.exponents.alpha, (u as f64).ln()),
        mx: rel(p.mx, &setting.xi, ln_n),
        sum: rel(p.sum, &setting.sigma, ln_n),
        t: rel(out.t, &setting.tau, ln_n),
    }
}

/// Largest ratio spread over a sweep of universes, with `|Z| = ⌈U^α⌉` random
/// values and a planted target. This is the empirical `ρ` of a setting.
pub fn calibrate_rho(setting: &ParameterSetting, universes: &[u64], seed: u64) -> Result<f64> {
    let e = exponents(setting)?;
    let mut rho: f64 = 1.0;
    for (i, &u) in universes.iter().enumerate() {
        let count = ceil_pow(u, &e.alpha)?.min(u);
        let inst = random_ksum(count, u, 3, seed.wrapping_add(i as u64), true)?;
        let out = reduce_ksum(&inst, setting)?;
        rho = rho.max(ratios(&out, setting, u).spread());
    }
    Ok(rho)
}

/// `count` distinct values from `[1, u]`. With `planted`, `T` is the sum of
/// `k` of them; otherwise `T` is uniform in `[k, k·u]`.
pub fn random_ksum(count: u64, u: u64, k: u64, seed: u64, planted: bool) -> Result<KSumInstance> {
    if count > u {
        return Err(Error::InvalidInput(format!("cannot draw {count} distinct values from [1, {u}]")));
    }
    if planted && count < k {
        return Err(Error::InvalidInput(format!("planting needs at least k = {k} values")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z: Vec<u64> = sample(&mut rng, u as usize, count as usize).into_iter().map(|i| i as u64 + 1).collect();
    let target = if planted {
        sample(&mut rng, z.len(), k as usize).into_iter().map(|i| z[i]).sum()
    } else {
        rng.gen_range(k..=k * u)
    };
    KSumInstance::new(z, target, k, u)
}

/// `n` distinct values drawn without replacement from `[1, ⌈n^ξ⌉]`.
pub fn random_dense_instance(n: u64, xi: &Rational, seed: u64) -> Result<MultiSet> {
    if n < 2 {
        return Err(Error::InvalidInput("n must be at least 2".into()));
    }
    let top = ceil_pow(n, xi)?;
    if n > top {
        return Err(Error::InvalidInput(format!("{n} distinct values do not fit in [1, {top}]")));
    }
    let top = usize::try_from(top).map_err(|_| Error::OutOfRange { value: top, limit: usize::MAX as u64 })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<u64> = sample(&mut rng, top, n as usize).into_iter().map(|i| i as u64 + 1).collect();
    MultiSet::from_values(&values)
}
