//! Dense Subset Sum in near-linear time.
//!
//! The pipeline strips almost divisors from a dense multi-set (using batch
//! prime factorization over product/remainder trees), tabulates the subset
//! sums modulo the resulting divisor `d`, and then answers every target in a
//! certified window with a single modulo and bit test.
//!
//! Alongside the solver the crate ships:
//!
//! * [`structure`]: executable checkers for the additive-combinatorics
//!   toolkit behind the certified window (remainder covers, uniform layers,
//!   representation counts, buckets, progressions in subset sums);
//! * [`reduction`]: a generator of hard Subset Sum instances from k-SUM;
//! * [`oracle`]: exact word-packed dynamic programming used as ground truth.

pub mod bitset;
pub mod divisor;
pub mod error;
pub mod factor;
pub mod io;
pub mod modular;
pub mod multiset;
pub mod oracle;
pub mod rational;
pub mod reduction;
pub mod solver;
pub mod structure;

pub use error::{Error, Result};
pub use multiset::{MultiSet, NormalizedInstance, Profile};
pub use rational::Rational;
