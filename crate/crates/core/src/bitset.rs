//! Fixed-length bitsets over `u64` words with the two shift-or transitions
//! the subset-sum dynamic programs need: a truncating left shift over
//! `[0, len)` and a cyclic rotation over `Z_len`.

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitSet {
    words: Vec<u64>,
    len: usize,
}

const W: usize = 64;

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet { words: vec![0; len.div_ceil(W)], len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / W] >> (i % W)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / W] |= 1 << (i % W);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * W + b)
            })
        })
    }

    /// Smallest index `≥ from` whose bit is clear.
    pub fn first_zero_from(&self, from: usize) -> Option<usize> {
        if from >= self.len {
            return None;
        }
        let mut wi = from / W;
        let mut w = !self.words[wi] & (!0u64 << (from % W));
        loop {
            if w != 0 {
                let i = wi * W + w.trailing_zeros() as usize;
                return (i < self.len).then_some(i);
            }
            wi += 1;
            if wi == self.words.len() {
                return None;
            }
            w = !self.words[wi];
        }
    }

    fn clear_tail(&mut self) {
        let r = self.len % W;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    /// `self |= self << shift`, dropping bits shifted past `len`.
    pub fn or_shift_left_in_place(&mut self, shift: usize) {
        if shift == 0 || shift >= self.len {
            return;
        }
        let q = shift / W;
        let r = shift % W;
        let n = self.words.len();
        // Top-down so every source word is read before it is written.
        if r == 0 {
            for i in (q..n).rev() {
                self.words[i] |= self.words[i - q];
            }
        } else {
            for i in (q + 1..n).rev() {
                self.words[i] |= (self.words[i - q] << r) | (self.words[i - q - 1] >> (W - r));
            }
            self.words[q] |= self.words[0] << r;
        }
        self.clear_tail();
    }

    /// Writes `self` rotated left by `shift` (mod `len`) into `out`:
    /// bit `i` moves to `(i + shift) mod len`.
    pub fn rotate_left_into(&self, shift: usize, out: &mut BitSet) {
        debug_assert_eq!(out.len, self.len);
        let len = self.len;
        let shift = if len == 0 { 0 } else { shift % len };
        out.words.iter_mut().for_each(|w| *w = 0);
        if shift == 0 {
            out.words.copy_from_slice(&self.words);
            return;
        }
        // low part: bits [0, len-shift) move up by `shift`
        shift_left_masked(&self.words, shift, &mut out.words);
        // high part: bits [len-shift, len) move down by `len - shift`
        shift_right_or(&self.words, len - shift, &mut out.words);
        out.clear_tail();
    }

    pub fn or_assign(&mut self, other: &BitSet) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }
}

/// `out |= src << shift` (truncated to `out`'s width).
fn shift_left_masked(src: &[u64], shift: usize, out: &mut [u64]) {
    let q = shift / W;
    let r = shift % W;
    let n = out.len();
    for i in q..n {
        let lo = src[i - q] << r;
        let carry = if r != 0 && i > q { src[i - q - 1] >> (W - r) } else { 0 };
        out[i] |= lo | carry;
    }
}

/// `out |= src >> shift`.
fn shift_right_or(src: &[u64], shift: usize, out: &mut [u64]) {
    let q = shift / W;
    let r = shift % W;
    let n = src.len();
    for i in 0..n.saturating_sub(q) {
        let hi = src[i + q] >> r;
        let carry = if r != 0 && i + q + 1 < n { src[i + q + 1] << (W - r) } else { 0 };
        out[i] |= hi | carry;
    }
}
