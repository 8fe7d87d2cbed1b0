//! Subset sums modulo `d`.
//!
//! The table is a bitset over `Z_d`. Each element shifts it cyclically and
//! ORs the result back in. Values are first reduced mod `d` and grouped by
//! residue, so `c` elements with the same residue cost `O(log c)` rotations
//! (binary splitting), and the DP stops as soon as every residue is reached.

use std::collections::BTreeMap;

use crate::bitset::BitSet;
use crate::multiset::MultiSet;
use crate::oracle::binary_split;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueSet {
    d: u64,
    members: BitSet,
}

impl ResidueSet {
    pub fn modulus(&self) -> u64 {
        self.d
    }

    /// Whether residue `r mod d` is reachable.
    #[inline]
    pub fn contains(&self, r: u64) -> bool {
        self.members.get((r % self.d) as usize)
    }

    pub fn count(&self) -> u64 {
        self.members.count_ones() as u64
    }

    pub fn is_complete(&self) -> bool {
        self.count() == self.d
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.members.iter_ones().map(|r| r as u64)
    }
}

/// `S(X) mod d`. Panics if `d = 0` or `d` does not fit the address space.
pub fn subset_sums_mod(x: &MultiSet, d: u64) -> ResidueSet {
    assert!(d >= 1, "modulus must be positive");
    let len = usize::try_from(d).expect("modulus exceeds address space");
    let mut members = BitSet::new(len);
    members.set(0);
    let mut by_residue: BTreeMap<u64, u64> = BTreeMap::new();
    for &(v, m) in x.entries() {
        let r = v % d;
        if r != 0 {
            *by_residue.entry(r).or_insert(0) += m;
        }
    }
    let mut rotated = BitSet::new(len);
    let mut filled = 1u64;
    'outer: for (r, count) in by_residue {
        for part in binary_split(count) {
            if filled == d {
                break 'outer;
            }
            let shift = (r as u128 * part as u128 % d as u128) as usize;
            if shift == 0 {
                continue;
            }
            members.rotate_left_into(shift, &mut rotated);
            members.or_assign(&rotated);
            filled = members.count_ones() as u64;
        }
    }
    ResidueSet { d, members }
}

/// `S(X) mod d = Z_d`.
pub fn is_complete_mod(x: &MultiSet, d: u64) -> bool {
    subset_sums_mod(x, d).is_complete()
}
