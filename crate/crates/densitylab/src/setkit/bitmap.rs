//! Explicit membership bitsets on `[0, len)`, used below the enumeration cutoff.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use super::expr::{NamedSet, SetExpr};
use super::layout::{self, Layout};
use super::primes;
use super::Limits;

#[derive(Clone, Debug)]
pub struct Bitmap {
    len: u64,
    words: Vec<u64>,
    /// `cum[w]` = set bits below `64·w`.
    cum: Vec<u64>,
}

impl Bitmap {
    fn zeros(len: u64) -> Bitmap {
        Bitmap { len, words: vec![0; len.div_ceil(64) as usize], cum: Vec::new() }
    }

    fn set(&mut self, x: u64) {
        if x < self.len {
            self.words[(x / 64) as usize] |= 1 << (x % 64);
        }
    }

    pub fn get(&self, x: u64) -> bool {
        x < self.len && self.words[(x / 64) as usize] >> (x % 64) & 1 == 1
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn trim(&mut self) {
        let tail = self.len % 64;
        if tail != 0 {
            if let Some(w) = self.words.last_mut() {
                *w &= (1u64 << tail) - 1;
            }
        }
        // bit 0 stands for the integer 0, outside every count
        if let Some(w) = self.words.first_mut() {
            *w &= !1;
        }
    }

    fn finish(mut self) -> Bitmap {
        self.trim();
        let mut acc = 0;
        self.cum = Vec::with_capacity(self.words.len() + 1);
        for w in &self.words {
            self.cum.push(acc);
            acc += w.count_ones() as u64;
        }
        self.cum.push(acc);
        self
    }

    /// `|S ∩ [1, n]|` for `n < len`.
    pub fn count(&self, n: u64) -> u64 {
        debug_assert!(n < self.len);
        let w = (n / 64) as usize;
        let b = n % 64;
        let mask = if b == 63 { u64::MAX } else { (1u64 << (b + 1)) - 1 };
        self.cum[w] + (self.words[w] & mask).count_ones() as u64
    }

    /// Smallest element `≥ from`.
    pub fn next_from(&self, from: u64) -> Option<u64> {
        let from = from.max(1);
        if from >= self.len {
            return None;
        }
        let mut w = (from / 64) as usize;
        let mut bits = self.words[w] & (u64::MAX << (from % 64));
        loop {
            if bits != 0 {
                return Some(w as u64 * 64 + bits.trailing_zeros() as u64);
            }
            w += 1;
            bits = *self.words.get(w)?;
        }
    }

    /// Largest element `≤ to`.
    pub fn prev_at_or_before(&self, to: u64) -> Option<u64> {
        let to = to.min(self.len.checked_sub(1)?);
        let mut w = (to / 64) as usize;
        let b = to % 64;
        let mut bits = self.words[w] & if b == 63 { u64::MAX } else { (1u64 << (b + 1)) - 1 };
        loop {
            if bits != 0 {
                return Some(w as u64 * 64 + 63 - bits.leading_zeros() as u64);
            }
            w = w.checked_sub(1)?;
            bits = self.words[w];
        }
    }

    pub fn build(e: &SetExpr, len: u64, limits: &Limits) -> Bitmap {
        raw(e, len, limits).finish()
    }
}

fn from_layout(l: &Layout, len: u64) -> Bitmap {
    let mut bm = Bitmap::zeros(len);
    let pieces = l.pieces();
    for (i, p) in pieces.iter().enumerate() {
        let Some(start) = p.start.to_u64() else { break };
        if start >= len {
            break;
        }
        let end = l.piece_end(i).and_then(|e| e.to_u64()).map_or(len - 1, |e| e.min(len - 1));
        let m = p.pattern.modulus();
        for &r in p.pattern.residues() {
            let first = start + (r + m - start % m) % m;
            let mut x = first;
            while x <= end {
                bm.set(x);
                x += m;
            }
        }
    }
    bm
}

fn raw(e: &SetExpr, len: u64, limits: &Limits) -> Bitmap {
    if let Some(l) = layout::build(e, &BigUint::from(len), limits) {
        return from_layout(&l, len);
    }
    match e {
        SetExpr::Named(NamedSet::Squares) => {
            let mut bm = Bitmap::zeros(len);
            let mut j = 1u64;
            while j * j < len {
                bm.set(j * j);
                j += 1;
            }
            bm
        }
        SetExpr::Named(NamedSet::Primes) => {
            let mut bm = Bitmap::zeros(len);
            for x in 2..len.min(primes::SIEVE_LIMIT + 1) {
                if primes::sieve_contains(x) == Some(true) {
                    bm.set(x);
                }
            }
            for x in primes::SIEVE_LIMIT + 1..len {
                if primes::is_prime(x) {
                    bm.set(x);
                }
            }
            bm
        }
        SetExpr::Named(NamedSet::Rangeset(bits)) => {
            let mut bm = Bitmap::zeros(len);
            for (k, r) in SetExpr::rangeset_classes(bits) {
                if r >= len as u128 {
                    continue;
                }
                let mut x = r as u64;
                while x < len {
                    bm.set(x);
                    match x.checked_add(k.min(u64::MAX as u128) as u64) {
                        Some(y) => x = y,
                        None => break,
                    }
                }
            }
            bm
        }
        SetExpr::Union(a, b) => zip(raw(a, len, limits), raw(b, len, limits), |x, y| x | y),
        SetExpr::Inter(a, b) => zip(raw(a, len, limits), raw(b, len, limits), |x, y| x & y),
        SetExpr::Diff(a, b) => zip(raw(a, len, limits), raw(b, len, limits), |x, y| x & !y),
        SetExpr::SymDiff(a, b) => zip(raw(a, len, limits), raw(b, len, limits), |x, y| x ^ y),
        SetExpr::Compl(a) => {
            let mut bm = raw(a, len, limits);
            for w in bm.words.iter_mut() {
                *w = !*w;
            }
            bm.trim();
            bm
        }
        SetExpr::Affine(k, h, a) => {
            let mut bm = Bitmap::zeros(len);
            if len > *h {
                let inner_len = (len - 1 - h) / k + 1;
                let inner = raw(a, inner_len, limits);
                for y in 1..inner_len {
                    if inner.get(y) {
                        bm.set(k * y + h);
                    }
                }
            }
            bm
        }
        // every remaining leaf has a layout
        _ => unreachable!("leaf without layout: {e}"),
    }
}

fn zip(mut a: Bitmap, b: Bitmap, f: impl Fn(u64, u64) -> u64) -> Bitmap {
    for (x, y) in a.words.iter_mut().zip(b.words.iter()) {
        *x = f(*x, *y);
    }
    a.trim();
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squares_and_primes() {
        let l = Limits::default();
        let sq = Bitmap::build(&SetExpr::squares(), 101, &l);
        assert_eq!(sq.count(100), 10);
        let pr = Bitmap::build(&SetExpr::primes(), 101, &l);
        assert_eq!(pr.count(100), 25);
        let mix = Bitmap::build(&SetExpr::inter(SetExpr::primes(), SetExpr::ap(4, 1).unwrap()), 101, &l);
        assert_eq!(mix.count(100), 11);
    }

    #[test]
    fn neighbours_match_scan() {
        let b = Bitmap::build(&SetExpr::squares(), 5000, &Limits::default());
        for x in 0..5000u64 {
            let next = (x.max(1)..5000).find(|&y| b.get(y));
            let prev = (1..=x).rev().find(|&y| b.get(y));
            assert_eq!(b.next_from(x), next);
            assert_eq!(b.prev_at_or_before(x), prev);
        }
    }
}
