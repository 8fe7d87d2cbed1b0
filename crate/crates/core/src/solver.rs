//! The dense Subset Sum pipeline.
//!
//! [`preprocess`] strips almost divisors to find `d`, tabulates `S(X) mod d`
//! and fixes the certified window `[⌈(4+2C_λ)·μ·mx·σ/n²⌉, ⌊σ/2⌋]`. Inside
//! the window `t ∈ S(X)` iff `t mod d ∈ S(X) mod d`, so [`PreparedSolver::query`]
//! is one modulo and one bit test. [`solve`] wraps everything and falls back
//! to the exact dynamic program whenever a target is not certified.

use std::fmt;

use crate::divisor::{strip_almost_divisors, ReductionTrace};
use crate::error::{Error, Result};
use crate::modular::{subset_sums_mod, ResidueSet};
use crate::multiset::{normalize_instance, MultiSet, Profile};
use crate::oracle::oracle_decide;
use crate::rational::{big, display, int, log2_upper, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstantsMode {
    /// The proof's constants, with logarithms (base 2) rounded up.
    Paper,
    /// Small defaults validated empirically against the oracle.
    Practical,
}

impl fmt::Display for ConstantsMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstantsMode::Paper => "paper",
            ConstantsMode::Practical => "practical",
        })
    }
}

impl std::str::FromStr for ConstantsMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(ConstantsMode::Paper),
            "practical" => Ok(ConstantsMode::Practical),
            other => Err(Error::InvalidInput(format!("unknown constants mode {other:?}"))),
        }
    }
}

/// `(C_δ, C_α, C_λ)` evaluated for one `n` and `μ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstantsProfile {
    pub mode: ConstantsMode,
    pub c_delta: Rational,
    pub c_alpha: Rational,
    pub c_lambda: Rational,
}

pub const PRACTICAL_DEFAULTS: (u64, u64, u64) = (64, 4, 8);

/// Constants for a multi-set of size `n` and multiplicity `mul`.
///
/// The `paper` mode evaluates `C_δ = 1699200·log(2n)·log²(2μ)`,
/// `C_α = 42480·log(2μ)` and `C_λ = 169920·log(2μ)` with dyadic upper bounds
/// on the logarithms. Overrides replace all three values in either mode.
pub fn constants_for(
    n: u64,
    mul: u64,
    mode: ConstantsMode,
    overrides: Option<(Rational, Rational, Rational)>,
) -> Result<ConstantsProfile> {
    if n == 0 || mul == 0 {
        return Err(Error::InvalidInput("n and μ must be positive".into()));
    }
    let (c_delta, c_alpha, c_lambda) = match (overrides, mode) {
        (Some(o), _) => o,
        (None, ConstantsMode::Practical) => {
            let (d, a, l) = PRACTICAL_DEFAULTS;
            (int(d), int(a), int(l))
        }
        (None, ConstantsMode::Paper) => {
            let log_n = log2_upper(2 * n);
            let log_mu = log2_upper(2 * mul);
            (
                int(1_699_200) * log_n * &log_mu * &log_mu,
                int(42_480) * &log_mu,
                int(169_920) * log_mu,
            )
        }
    };
    let c = ConstantsProfile { mode, c_delta, c_alpha, c_lambda };
    validate_constants(&c)?;
    Ok(c)
}

fn validate_constants(c: &ConstantsProfile) -> Result<()> {
    if c.c_alpha <= int(0) || c.c_lambda <= int(0) {
        return Err(Error::InvalidConstants("constants must be positive".into()));
    }
    if c.c_delta < int(1) {
        return Err(Error::InvalidConstants(format!("C_δ = {} is below 1", display(&c.c_delta))));
    }
    if int(16) * &c.c_alpha > c.c_delta {
        return Err(Error::InvalidConstants(format!(
            "16·C_α = {} exceeds C_δ = {}",
            display(&(int(16) * &c.c_alpha)),
            display(&c.c_delta)
        )));
    }
    Ok(())
}

/// Targets with `lo ≤ t ≤ hi` are certified. `lo` saturates at `u128::MAX`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeasibleWindow {
    pub lo: u128,
    pub hi: u64,
    pub empty: bool,
}

impl FeasibleWindow {
    #[inline]
    pub fn contains(&self, t: u64) -> bool {
        !self.empty && self.lo <= t as u128 && t <= self.hi
    }

    /// Number of certified targets.
    pub fn width(&self) -> u64 {
        if self.empty {
            0
        } else {
            self.hi - self.lo as u64 + 1
        }
    }
}

/// The exact lower bound `(4+2C_λ)·μ·mx·σ/n²` of the window.
pub fn window_threshold(p: &Profile, c: &ConstantsProfile) -> Rational {
    (int(4) + int(2) * &c.c_lambda) * p.spread()
}

pub fn feasible_window(p: &Profile, c: &ConstantsProfile) -> FeasibleWindow {
    let lo_exact = window_threshold(p, c).ceil().to_integer();
    let lo = u128::try_from(lo_exact).unwrap_or(u128::MAX);
    let hi = p.sum / 2;
    FeasibleWindow { lo, hi, empty: lo > hi as u128 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reason {
    ModularWindow,
    OracleFallback,
    Trivial,
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reason::ModularWindow => "modular-window",
            Reason::OracleFallback => "oracle-fallback",
            Reason::Trivial => "trivial",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryDecision {
    pub answer: bool,
    pub certified: bool,
    pub reason: Reason,
    /// The stripped divisor, when the modular test decided.
    pub d: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct PreparedSolver {
    original_profile: Profile,
    trace: ReductionTrace,
    residues: ResidueSet,
    window: FeasibleWindow,
    constants: ConstantsProfile,
}

/// Strips almost divisors, tabulates `S(X) mod d` and fixes the window.
/// Fails with [`Error::NotDense`] unless `X` is `C_δ`-dense.
pub fn preprocess(x: &MultiSet, c: &ConstantsProfile) -> Result<PreparedSolver> {
    validate_constants(c)?;
    if !x.is_dense(&c.c_delta) {
        return Err(Error::NotDense(display(&c.c_delta)));
    }
    let trace = strip_almost_divisors(x, &c.c_alpha, &c.c_delta)?;
    let residues = subset_sums_mod(x, trace.d);
    let original_profile = x.profile();
    let window = feasible_window(&original_profile, c);
    Ok(PreparedSolver { original_profile, trace, residues, window, constants: c.clone() })
}

impl PreparedSolver {
    pub fn profile(&self) -> &Profile {
        &self.original_profile
    }

    pub fn trace(&self) -> &ReductionTrace {
        &self.trace
    }

    pub fn residues(&self) -> &ResidueSet {
        &self.residues
    }

    pub fn window(&self) -> &FeasibleWindow {
        &self.window
    }

    pub fn constants(&self) -> &ConstantsProfile {
        &self.constants
    }

    pub fn d(&self) -> u64 {
        self.trace.d
    }

    /// Certified answer for `t` in the window; errors outside it.
    #[inline]
    pub fn query(&self, t: u64) -> Result<QueryDecision> {
        if !self.window.contains(t) {
            return Err(Error::OutsideWindow {
                t,
                lo: u64::try_from(self.window.lo).unwrap_or(u64::MAX),
                hi: self.window.hi,
            });
        }
        Ok(QueryDecision {
            answer: self.residues.contains(t),
            certified: true,
            reason: Reason::ModularWindow,
            d: Some(self.trace.d),
        })
    }

    /// `t mod d ∈ S(X) mod d`, with no window check. A `false` here is a
    /// proof that `t ∉ S(X)`; a `true` is only meaningful inside the window.
    #[inline]
    pub fn residue_member(&self, t: u64) -> bool {
        self.residues.contains(t)
    }
}

/// Decides `t ∈ S(X)`. Normalizes the instance, answers trivial cases
/// directly, uses the certified modular test when the normalized instance is
/// dense and `t` lies in its window, and runs the exact DP otherwise.
pub fn solve(x: &MultiSet, t: u64, c: &ConstantsProfile) -> QueryDecision {
    let norm = normalize_instance(x, t);
    if let Some(answer) = norm.trivial_answer {
        return QueryDecision { answer, certified: true, reason: Reason::Trivial, d: None };
    }
    let x = norm.x.as_ref().expect("non-trivial instances keep elements");
    let t = norm.t;
    if x.is_dense(&c.c_delta) && feasible_window(&x.profile(), c).contains(t) {
        if let Ok(prepared) = preprocess(x, c) {
            if let Ok(decision) = prepared.query(t) {
                return decision;
            }
        }
    }
    QueryDecision { answer: oracle_decide(x, t), certified: false, reason: Reason::OracleFallback, d: None }
}

/// Whether any multi-set with these `n`, `mx`, `μ` can have a non-empty
/// window. `σ` cancels: `lo ≤ hi` needs `2·(4+2C_λ)·μ·mx ≤ n²` (up to the
/// rounding of `lo` and `hi`).
pub fn window_can_be_nonempty(c: &ConstantsProfile, n: u64, mx: u64, mul: u64) -> bool {
    // (4+2C_λ)·μ·mx·σ/n² ≤ σ/2  ⇔  2·(4+2C_λ)·μ·mx ≤ n²
    int(2) * (int(4) + int(2) * &c.c_lambda) * big(mul as u128 * mx as u128) <= big(n as u128 * n as u128)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn ms(v: &[u64]) -> MultiSet {
        MultiSet::from_values(v).unwrap()
    }

    fn practical() -> ConstantsProfile {
        constants_for(1, 1, ConstantsMode::Practical, None).unwrap()
    }

    #[test]
    fn constants_examples() {
        let c = constants_for(1000, 1, ConstantsMode::Paper, None).unwrap();
        assert_eq!(c.c_alpha, int(42_480));
        assert_eq!(c.c_lambda, int(169_920));
        assert_eq!(c.c_delta, int(1_699_200) * log2_upper(2000));
        let p = practical();
        assert_eq!((p.c_delta, p.c_alpha, p.c_lambda), (int(64), int(4), int(8)));
        // μ = 2: log₂4 = 2 exactly
        let c = constants_for(512, 2, ConstantsMode::Paper, None).unwrap();
        assert_eq!(c.c_delta, int(1_699_200) * int(10) * int(4));
        assert_eq!(c.c_alpha, int(84_960));
        let bad = constants_for(10, 1, ConstantsMode::Practical, Some((int(60), int(4), int(8))));
        assert!(matches!(bad, Err(Error::InvalidConstants(_))));
    }

    #[test]
    fn window_examples() {
        let p = ms(&(1..=100).collect::<Vec<_>>()).profile();
        let paper = constants_for(100, 1, ConstantsMode::Paper, None).unwrap();
        let w = feasible_window(&p, &paper);
        assert!(w.empty);
        assert!(w.lo > 17_000_000 && w.lo < 17_200_000, "{}", w.lo);
        // 20·5050·100/10⁴ = 1010
        let w = feasible_window(&p, &practical());
        assert_eq!((w.lo, w.hi, w.empty), (1010, 2525, false));
        let p = ms(&(1..=1000).collect::<Vec<_>>()).profile();
        let w = feasible_window(&p, &practical());
        assert_eq!((w.lo, w.hi, w.empty), (10_010, 250_250, false));
    }

    #[test]
    fn preprocess_examples() {
        let ones: Vec<u64> = (1..=1000).collect();
        let s = preprocess(&ms(&ones), &practical()).unwrap();
        assert_eq!(s.d(), 1);
        assert_eq!(s.residues().iter().collect::<Vec<_>>(), vec![0]);
        assert!(!s.window().empty);

        let evens: Vec<u64> = (1..=500).map(|i| 2 * i).collect();
        let s = preprocess(&ms(&evens), &practical()).unwrap();
        assert_eq!(s.d(), 2);
        assert_eq!(s.residues().iter().collect::<Vec<_>>(), vec![0]);

        let small: Vec<u64> = (1..=10).collect();
        let paper = constants_for(10, 1, ConstantsMode::Paper, None).unwrap();
        assert!(matches!(preprocess(&ms(&small), &paper), Err(Error::NotDense(_))));
    }

    #[test]
    fn query_examples() {
        let evens: Vec<u64> = (1..=500).map(|i| 2 * i).collect();
        let s = preprocess(&ms(&evens), &practical()).unwrap();
        let w = *s.window();
        let odd = if w.lo % 2 == 1 { w.lo as u64 } else { w.lo as u64 + 1 };
        assert!(!s.query(odd).unwrap().answer);
        let even = odd + 1;
        assert!(s.query(even).unwrap().answer);
        assert!(oracle_decide(&ms(&evens), even));

        let ones: Vec<u64> = (1..=1000).collect();
        let x = ms(&ones);
        let s = preprocess(&x, &practical()).unwrap();
        let lo = s.window().lo as u64;
        for t in [lo, lo + 1, 100_000, s.window().hi] {
            assert!(s.query(t).unwrap().answer);
        }
        assert!(matches!(s.query(x.sum() + 1), Err(Error::OutsideWindow { .. })));
        assert!(matches!(s.query(lo - 1), Err(Error::OutsideWindow { .. })));
    }

    #[test]
    fn solve_examples() {
        let c = practical();
        let d = solve(&ms(&[1, 2, 3]), 7, &c);
        assert_eq!((d.answer, d.reason), (false, Reason::Trivial));
        // 11 ↦ 5 drops 8, then 5 ↦ 3 drops 5, leaving {3} with t = σ
        let d = solve(&ms(&[3, 5, 8]), 11, &c);
        assert_eq!((d.answer, d.reason), (true, Reason::Trivial));
        let d = solve(&ms(&[3, 5, 8, 9]), 12, &c);
        assert_eq!((d.answer, d.certified, d.reason), (true, false, Reason::OracleFallback));
        let evens: Vec<u64> = (1..=500).map(|i| 2 * i).collect();
        let d = solve(&ms(&evens), 60_000, &c);
        assert_eq!((d.answer, d.certified, d.reason), (true, true, Reason::ModularWindow));
        let d = solve(&ms(&evens), 60_001, &c);
        assert_eq!((d.answer, d.certified, d.reason), (false, true, Reason::ModularWindow));
    }

    #[test]
    fn proof_window_empty_at_desk_scale() {
        for n in [10u64, 1000, 100_000, 1_000_000] {
            let mx = (n as f64).powf(1.5).round() as u64;
            let c = constants_for(n, 1, ConstantsMode::Paper, None).unwrap();
            assert!(!window_can_be_nonempty(&c, n, mx, 1));
        }
        let c = constants_for(10, 1, ConstantsMode::Practical, Some((int(64), frac(1, 2), int(8)))).unwrap();
        assert!(window_can_be_nonempty(&c, 10_000, 10_000, 1));
    }
}
