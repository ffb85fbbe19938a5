use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::SetError;

/// A set of residues modulo `m`, kept in canonical form: sorted, deduplicated,
/// and reduced to the smallest period.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Residues {
    m: u64,
    r: Vec<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoolOp {
    Union,
    Inter,
    Diff,
    SymDiff,
}

impl BoolOp {
    pub fn apply(self, a: bool, b: bool) -> bool {
        match self {
            BoolOp::Union => a || b,
            BoolOp::Inter => a && b,
            BoolOp::Diff => a && !b,
            BoolOp::SymDiff => a != b,
        }
    }
}

impl Residues {
    pub fn full() -> Self {
        Residues { m: 1, r: vec![0] }
    }

    pub fn empty() -> Self {
        Residues { m: 1, r: Vec::new() }
    }

    /// The class `h mod k`; `k` must be positive.
    pub fn class(k: u64, h: u64) -> Self {
        Residues::new(k, vec![h % k])
    }

    pub fn new(m: u64, mut r: Vec<u64>) -> Self {
        assert!(m > 0, "modulus must be positive");
        for x in r.iter_mut() {
            *x %= m;
        }
        r.sort_unstable();
        r.dedup();
        let mut out = Residues { m, r };
        out.reduce();
        out
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn residues(&self) -> &[u64] {
        &self.r
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.r.len() as u64 == self.m
    }

    pub fn contains_residue(&self, x: u64) -> bool {
        self.r.binary_search(&(x % self.m)).is_ok()
    }

    pub fn contains(&self, x: &BigUint) -> bool {
        let rem = (x % self.m).to_u64().unwrap_or(0);
        self.contains_residue(rem)
    }

    pub fn density(&self) -> BigRational {
        BigRational::new(self.r.len().into(), self.m.into())
    }

    pub fn density_f64(&self) -> f64 {
        self.r.len() as f64 / self.m as f64
    }

    pub fn complement(&self) -> Self {
        let mut out = Vec::with_capacity(self.m as usize - self.r.len());
        let mut it = self.r.iter().peekable();
        for x in 0..self.m {
            if it.peek() == Some(&&x) {
                it.next();
            } else {
                out.push(x);
            }
        }
        Residues { m: self.m, r: out }
    }

    /// Residues of `self` lifted to a multiple `big` of the modulus.
    pub fn lift(&self, big: u64) -> Vec<u64> {
        debug_assert_eq!(big % self.m, 0);
        let reps = big / self.m;
        let mut out = Vec::with_capacity(self.r.len() * reps as usize);
        for j in 0..reps {
            for &r in &self.r {
                out.push(j * self.m + r);
            }
        }
        out
    }

    pub fn combine(&self, other: &Residues, op: BoolOp, bound: u64) -> Result<Residues, SetError> {
        match op {
            BoolOp::Union if self.is_full() || other.is_empty() => return Ok(self.clone()),
            BoolOp::Union if other.is_full() || self.is_empty() => return Ok(other.clone()),
            BoolOp::Inter if self.is_empty() || other.is_full() => return Ok(self.clone()),
            BoolOp::Inter if other.is_empty() || self.is_full() => return Ok(other.clone()),
            BoolOp::Diff if self.is_empty() || other.is_empty() => return Ok(self.clone()),
            _ => {}
        }
        let l = checked_lcm(self.m, other.m, bound)?;
        let mut out = Vec::new();
        for x in 0..l {
            if op.apply(self.contains_residue(x), other.contains_residue(x)) {
                out.push(x);
            }
        }
        Ok(Residues::new(l, out))
    }

    /// The pattern of `{k·x + h : x mod m ∈ R}` modulo `k·m`.
    pub fn affine(&self, k: u64, h: u64, bound: u64) -> Result<Residues, SetError> {
        let km = self.m.checked_mul(k).filter(|&v| v <= bound).ok_or_else(|| SetError::ModulusOverflow { modulus: format!("{}*{}", k, self.m), bound })?;
        let r = self.r.iter().map(|&x| ((x as u128 * k as u128 + h as u128) % km as u128) as u64).collect();
        Ok(Residues::new(km, r))
    }

    /// Number of residues in the cyclic window `[start, start + len)`, `len <= m`.
    fn window(&self, start: u64, len: u64) -> u64 {
        if len == 0 {
            return 0;
        }
        let end = start + len;
        if end <= self.m {
            (lower_bound(&self.r, end) - lower_bound(&self.r, start)) as u64
        } else {
            let tail = (self.r.len() - lower_bound(&self.r, start)) as u64;
            tail + lower_bound(&self.r, end - self.m) as u64
        }
    }

    /// Number of `x` in `[s, t]` whose residue lies in the set.
    pub fn count_range(&self, s: &BigUint, t: &BigUint) -> BigUint {
        if t < s || self.r.is_empty() {
            return BigUint::zero();
        }
        let len = t - s + 1u32;
        let (q, rem) = len.div_rem(&BigUint::from(self.m));
        let start = (s % self.m).to_u64().unwrap();
        q * self.r.len() + self.window(start, rem.to_u64().unwrap())
    }

    /// Smallest `x >= s` with residue in the set.
    pub fn first_at_or_after(&self, s: &BigUint) -> Option<BigUint> {
        if self.r.is_empty() {
            return None;
        }
        let base = (s % self.m).to_u64().unwrap();
        let i = lower_bound(&self.r, base);
        let step = if i < self.r.len() { self.r[i] - base } else { self.m - base + self.r[0] };
        Some(s + step)
    }

    /// Whether the class `h mod k` meets the pattern.
    /// `meets_class(k, h)` for every `h < k`.
    pub fn class_hits(&self, k: u64) -> Vec<bool> {
        let g = self.m.gcd(&k);
        let mut mark = vec![false; g as usize];
        for &r in &self.r {
            mark[(r % g) as usize] = true;
        }
        mark.iter().copied().cycle().take(k as usize).collect()
    }

    pub fn meets_class(&self, k: u64, h: u64) -> bool {
        let g = self.m.gcd(&k);
        let target = h % g;
        self.r.iter().any(|&r| r % g == target)
    }

    fn reduce(&mut self) {
        let mut m = self.m;
        for p in prime_factors(m) {
            while m.is_multiple_of(p) && self.periodic_with(m / p) {
                m /= p;
            }
        }
        if m != self.m {
            self.r.retain(|&x| x < m);
            self.m = m;
        }
    }

    fn periodic_with(&self, d: u64) -> bool {
        if !(self.r.len() as u64).is_multiple_of(self.m / d) {
            return false;
        }
        self.r.iter().all(|&x| self.r.binary_search(&((x + d) % self.m)).is_ok())
    }
}

fn lower_bound(v: &[u64], x: u64) -> usize {
    v.partition_point(|&y| y < x)
}

pub(crate) fn checked_lcm(a: u64, b: u64, bound: u64) -> Result<u64, SetError> {
    let g = a.gcd(&b);
    (a / g).checked_mul(b).filter(|&v| v <= bound).ok_or_else(|| SetError::ModulusOverflow { modulus: format!("lcm({a}, {b})"), bound })
}

pub(crate) fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            out.push(p);
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push(m);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_reduces_period() {
        let r = Residues::new(12, vec![0, 2, 4, 6, 8, 10]);
        assert_eq!(r, Residues::class(2, 0));
    }

    #[test]
    fn union_of_classes_mod_four() {
        let u = Residues::class(2, 0).combine(&Residues::class(4, 1), BoolOp::Union, 1000).unwrap();
        assert_eq!(u.modulus(), 4);
        assert_eq!(u.residues(), &[0, 1, 2]);
    }

    #[test]
    fn count_range_matches_scan() {
        let r = Residues::new(7, vec![1, 3, 6]);
        for s in 1u32..30 {
            for t in s..60 {
                let want = (s..=t).filter(|x| r.contains_residue(*x as u64)).count();
                assert_eq!(r.count_range(&s.into(), &t.into()), BigUint::from(want));
            }
        }
    }

    #[test]
    fn affine_image() {
        let a = Residues::class(2, 0).affine(3, 1, 1000).unwrap();
        assert_eq!(a.modulus(), 6);
        assert_eq!(a.residues(), &[1]);
    }
}
