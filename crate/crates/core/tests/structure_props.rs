use std::collections::BTreeSet;

use densesum::divisor::find_almost_divisor;
use densesum::modular::is_complete_mod;
use densesum::oracle::subset_sums;
use densesum::rational::int;
use densesum::solver::{constants_for, ConstantsMode};
use densesum::structure::{
    check_completeness_precondition, find_ap_in_sums, representation_counts, verify_interval, witness_holds,
};
use densesum::MultiSet;
use proptest::prelude::*;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `n` distinct values in `[1, n²/64]`, optionally all but a few multiples
/// of `d`.
fn dense_set(rng: &mut ChaCha8Rng, n: u64, d: u64, strays: u64) -> MultiSet {
    let top = n * n / 64;
    let mut all: BTreeSet<u64> =
        sample(rng, (top / d) as usize, (n - strays) as usize).into_iter().map(|i| (i as u64 + 1) * d).collect();
    while all.len() < n as usize {
        all.insert(rng.gen_range(1..=top));
    }
    MultiSet::from_values(&all.into_iter().collect::<Vec<_>>()).unwrap()
}

/// With the practical constants, a dense set with no almost divisor hits
/// every target in `[λ, σ − λ]` for `λ = C_λ·μ·mx·σ/n²`.
#[test]
fn practical_constants_give_full_interval() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut checked = 0;
    let mut counterexamples = Vec::new();
    for round in 0..120 {
        let n = rng.gen_range(200..=400u64);
        let d = [1u64, 1, 2, 3][round % 4];
        let strays = if d == 1 { 0 } else { rng.gen_range(n / 4..=n / 2) };
        let x = dense_set(&mut rng, n, d, strays);
        let p = x.profile();
        let c = constants_for(p.n, p.mul, ConstantsMode::Practical, None).unwrap();
        if !x.is_dense(&c.c_delta) || find_almost_divisor(&x, &c.c_alpha).unwrap().is_some() {
            continue;
        }
        checked += 1;
        let lambda = (c.c_lambda.clone() * p.spread()).ceil().to_integer();
        let lambda = u64::try_from(lambda).unwrap();
        let report = verify_interval(&x, lambda);
        if !report.ok {
            counterexamples.push((x.to_values(), lambda, report.first_miss));
        }
    }
    assert!(checked >= 60, "only {checked} sets qualified");
    assert!(counterexamples.is_empty(), "{} counterexamples, first {:?}", counterexamples.len(), counterexamples[0]);
}

fn small_multiset() -> impl Strategy<Value = MultiSet> {
    proptest::collection::vec(1u64..50, 1..=14).prop_map(|v| MultiSet::from_values(&v).unwrap())
}

proptest! {
    #[test]
    fn ordered_pair_counts(v in proptest::collection::btree_set(1u64..80, 1..=25)) {
        let x = MultiSet::from_values(&v.iter().copied().collect::<Vec<_>>()).unwrap();
        let counts = representation_counts(&x).unwrap();
        let vals: Vec<u64> = v.into_iter().collect();
        let mut total = 0u64;
        for &a in &vals {
            for &b in &vals {
                total += 1;
                let s = a + b;
                let naive = vals.iter().filter(|&&y| s > y && vals.contains(&(s - y))).count() as u64;
                prop_assert_eq!(counts.get(s), naive);
            }
        }
        prop_assert_eq!(counts.total(), total);
    }

    #[test]
    fn interval_report_is_exact(x in small_multiset(), lambda in 0u64..200) {
        let sums = subset_sums(&x);
        let sigma = x.sum();
        let report = verify_interval(&x, lambda);
        if 2 * lambda > sigma {
            prop_assert!(report.ok);
        } else {
            let miss = (lambda..=sigma - lambda).find(|&t| !sums.get(t as usize));
            prop_assert_eq!(report.ok, miss.is_none());
            prop_assert_eq!(report.first_miss, miss);
        }
    }

    #[test]
    fn precondition_gives_completeness(x in small_multiset(), tau in 2u64..10) {
        if check_completeness_precondition(&x, tau) {
            for d in 1..=tau {
                prop_assert!(is_complete_mod(&x, d), "not complete mod {}", d);
            }
        }
    }

    #[test]
    fn ap_witnesses_hold(x in small_multiset(), min_len in 1u64..8, max_step in 1u64..6) {
        let sums = subset_sums(&x);
        match find_ap_in_sums(&x, min_len, max_step) {
            Some(w) => {
                prop_assert!(witness_holds(&x, &w));
                prop_assert!(w.len >= min_len && w.step <= max_step);
                for i in 1..=w.len {
                    prop_assert!(sums.get((w.start + i * w.step) as usize));
                }
            }
            None => {
                // brute force over every start and step
                for s in 1..=max_step {
                    for a in 0..=x.sum() {
                        let run = (1..=min_len).all(|i| a + i * s <= x.sum() && sums.get((a + i * s) as usize));
                        prop_assert!(!run, "missed a = {}, s = {}", a, s);
                    }
                }
            }
        }
    }
}

#[test]
fn practical_constants_are_consistent() {
    let c = constants_for(1000, 1, ConstantsMode::Practical, None).unwrap();
    assert!(int(16) * &c.c_alpha <= c.c_delta);
}
