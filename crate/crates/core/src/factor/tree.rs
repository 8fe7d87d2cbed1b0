//! Product and remainder trees.
//!
//! A [`ProductTree`] is a balanced binary tree over a list of leaves (split
//! left-heavy, `⌈k/2⌉ | ⌊k/2⌋`) whose internal nodes hold the product of
//! their subtree. Pushing a big modulus down the tree (`R(I) = R(parent) mod
//! Π(I)`) yields the modulus reduced at every leaf.
//!
//! Products below `2^128` stay native, so the lower levels of a descent never
//! touch GMP. Trees built with a cap stop multiplying once a node's product
//! exceeds the modulus they will later reduce: every reduction above that
//! point is the identity.

use gmp_mpfr_sys::gmp;
use rug::{Assign, Integer};

#[derive(Debug, Clone, Copy)]
enum Val {
    Word(u64),
    Double(u128),
    /// Index into the tree's big-integer pool.
    Big(u32),
    /// Product exceeds the cap and was never computed.
    Capped,
}

/// Nodes live in preorder: a subtree over `k` leaves occupies `2k - 1`
/// consecutive slots, so the left child of `i` is `i + 1` and the right
/// child is `i + 2·|left leaves|`.
#[derive(Debug, Clone)]
pub struct ProductTree {
    leaves: Vec<u64>,
    nodes: Vec<Val>,
    big: Vec<Integer>,
    depth: usize,
}

#[derive(Clone, Copy)]
enum Rem<'a> {
    Word(u64),
    Double(u128),
    Big(&'a Integer),
}

impl<'a> Rem<'a> {
    fn narrow(x: u128) -> Rem<'a> {
        match u64::try_from(x) {
            Ok(w) => Rem::Word(w),
            Err(_) => Rem::Double(x),
        }
    }

    fn of(x: &'a Integer) -> Rem<'a> {
        match x.to_u128() {
            Some(v) => Rem::narrow(v),
            None => Rem::Big(x),
        }
    }
}

/// `x mod m` for a GMP integer and a word-sized modulus, without allocating.
fn big_mod_u64(x: &Integer, m: u64) -> u64 {
    debug_assert!(m > 0 && *x >= 0);
    // SAFETY: `x` is a valid initialized mpz and `m` is non-zero.
    unsafe { gmp::mpz_fdiv_ui(x.as_raw(), m) }
}

fn split(lo: usize, hi: usize) -> usize {
    lo + (hi - lo).div_ceil(2)
}

impl ProductTree {
    /// Full product tree over `leaves`, which must be non-empty and positive.
    pub fn new(leaves: &[u64]) -> Self {
        Self::build(leaves, None)
    }

    /// Product tree whose nodes above `cap_bits` bits are left uncomputed.
    pub fn with_cap(leaves: &[u64], cap_bits: u32) -> Self {
        Self::build(leaves, Some(cap_bits))
    }

    fn build(leaves: &[u64], cap_bits: Option<u32>) -> Self {
        assert!(!leaves.is_empty(), "product tree needs at least one leaf");
        assert!(leaves.iter().all(|&x| x > 0), "product tree leaves must be positive");
        let mut tree = ProductTree {
            leaves: leaves.to_vec(),
            nodes: vec![Val::Capped; 2 * leaves.len() - 1],
            big: Vec::new(),
            depth: 0,
        };
        tree.build_range(0, 0, leaves.len(), cap_bits, 0);
        tree
    }

    fn build_range(&mut self, i: usize, lo: usize, hi: usize, cap: Option<u32>, depth: usize) {
        self.depth = self.depth.max(depth);
        if hi - lo == 1 {
            self.nodes[i] = Val::Word(self.leaves[lo]);
            return;
        }
        let mid = split(lo, hi);
        let (l, r) = (i + 1, i + 2 * (mid - lo));
        self.build_range(l, lo, mid, cap, depth + 1);
        self.build_range(r, mid, hi, cap, depth + 1);
        let native = |v: Val| match v {
            Val::Word(a) => Some(a as u128),
            Val::Double(a) => Some(a),
            _ => None,
        };
        let product = match (self.nodes[l], self.nodes[r]) {
            (Val::Capped, _) | (_, Val::Capped) => None,
            (a, b) => match (native(a), native(b)) {
                (Some(a), Some(b)) => match a.checked_mul(b) {
                    Some(p) => {
                        self.nodes[i] = match u64::try_from(p) {
                            Ok(w) => Val::Word(w),
                            Err(_) => Val::Double(p),
                        };
                        return;
                    }
                    None => Some(Integer::from(a) * b),
                },
                (Some(x), None) => Some(Integer::from(self.big_ref(b) * x)),
                (None, Some(y)) => Some(Integer::from(self.big_ref(a) * y)),
                (None, None) => Some(Integer::from(self.big_ref(a) * self.big_ref(b))),
            },
        };
        self.nodes[i] = match product {
            Some(p) if cap.is_none_or(|c| p.significant_bits() <= c) => {
                self.big.push(p);
                Val::Big((self.big.len() - 1) as u32)
            }
            _ => Val::Capped,
        };
    }

    fn big_ref(&self, v: Val) -> &Integer {
        match v {
            Val::Big(i) => &self.big[i as usize],
            _ => unreachable!("not a pooled node"),
        }
    }

    pub fn leaves(&self) -> &[u64] {
        &self.leaves
    }

    pub fn root(&self) -> usize {
        0
    }

    /// Product of the subtree at `node`, `None` if the node was capped.
    pub fn product(&self, node: usize) -> Option<Integer> {
        match self.nodes[node] {
            Val::Word(v) => Some(Integer::from(v)),
            Val::Double(v) => Some(Integer::from(v)),
            Val::Big(b) => Some(self.big[b as usize].clone()),
            Val::Capped => None,
        }
    }

    pub fn root_product(&self) -> Option<Integer> {
        self.product(0)
    }

    /// Leaf range `[lo, hi)` under `node`, found by walking from the root.
    fn range(&self, node: usize) -> (usize, usize) {
        let (mut i, mut lo, mut hi) = (0, 0, self.leaves.len());
        while i != node {
            let mid = split(lo, hi);
            let right = i + 2 * (mid - lo);
            if node < right {
                i += 1;
                hi = mid;
            } else {
                i = right;
                lo = mid;
            }
        }
        (lo, hi)
    }

    pub fn children(&self, node: usize) -> Option<(usize, usize)> {
        let (lo, hi) = self.range(node);
        (hi - lo > 1).then(|| (node + 1, node + 2 * (split(lo, hi) - lo)))
    }

    /// Leaves under `node`.
    pub fn leaf_slice(&self, node: usize) -> &[u64] {
        let (lo, hi) = self.range(node);
        &self.leaves[lo..hi]
    }

    /// `modulus mod leaf` for every leaf, computed top-down. `modulus ≥ 0`.
    pub fn remainders(&self, modulus: &Integer) -> Vec<u64> {
        let mut out = vec![0u64; self.leaves.len()];
        self.remainders_into(modulus, &mut out);
        out
    }

    pub(crate) fn remainders_into(&self, modulus: &Integer, out: &mut [u64]) {
        assert!(*modulus >= 0, "modulus must be non-negative");
        assert_eq!(out.len(), self.leaves.len());
        let mut scratch: Vec<Integer> = (0..=self.depth).map(|_| Integer::new()).collect();
        let start = Rem::of(modulus);
        self.descend(0, 0, self.leaves.len(), start, out, &mut scratch);
    }

    fn descend(&self, i: usize, lo: usize, hi: usize, parent: Rem<'_>, out: &mut [u64], scratch: &mut [Integer]) {
        let (cur, rest) = scratch.split_first_mut().expect("scratch covers tree depth");
        let r = match (self.nodes[i], parent) {
            (Val::Capped, p) => p,
            (Val::Word(v), Rem::Word(x)) => Rem::Word(x % v),
            (Val::Word(v), Rem::Double(x)) => Rem::Word((x % v as u128) as u64),
            (Val::Word(v), Rem::Big(x)) => Rem::Word(big_mod_u64(x, v)),
            // parent < 2^64 ≤ node
            (Val::Double(_), Rem::Word(x)) => Rem::Word(x),
            (Val::Double(v), Rem::Double(x)) => Rem::narrow(x % v),
            (Val::Double(v), Rem::Big(x)) => {
                cur.assign(x % v);
                Rem::of(cur)
            }
            // parent < 2^128 ≤ node
            (Val::Big(_), p @ (Rem::Word(_) | Rem::Double(_))) => p,
            (Val::Big(v), Rem::Big(x)) => {
                let v = &self.big[v as usize];
                if x < v {
                    Rem::Big(x)
                } else {
                    cur.assign(x % v);
                    Rem::of(cur)
                }
            }
        };
        if let Rem::Word(x) = r {
            // Below a word-sized remainder every further level is a native
            // `mod`, and reducing straight to the leaf gives the same value.
            for (o, &leaf) in out[lo..hi].iter_mut().zip(&self.leaves[lo..hi]) {
                *o = x % leaf;
            }
            return;
        }
        debug_assert!(hi - lo > 1, "leaves are native");
        let mid = split(lo, hi);
        self.descend(i + 1, lo, mid, r, out, rest);
        self.descend(i + 2 * (mid - lo), mid, hi, r, out, rest);
    }
}
