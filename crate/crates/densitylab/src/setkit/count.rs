use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::bitmap::Bitmap;
use super::expr::{GroundSet, NamedSet, SetExpr};
use super::layout::{self, Layout};
use super::primes;
use super::residues::Residues;
use super::{Limits, SetError};

/// Counting engine with memoized layouts and bitmaps. Results never depend on
/// cache state.
pub struct Counter {
    limits: Limits,
    layouts: Mutex<HashMap<String, Option<Arc<Layout>>>>,
    bitmaps: Mutex<HashMap<String, Arc<Bitmap>>>,
}

impl Default for Counter {
    fn default() -> Self {
        Counter::new(Limits::default())
    }
}

impl std::fmt::Debug for Counter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Counter").field("limits", &self.limits).finish_non_exhaustive()
    }
}

/// `{c·j² + d : j ≥ 1}` if the expression has that form.
fn quadratic(e: &SetExpr) -> Option<(u64, u64)> {
    match e {
        SetExpr::Named(NamedSet::Squares) => Some((1, 0)),
        SetExpr::Affine(k, h, inner) => {
            let (c, d) = quadratic(inner)?;
            Some((k.checked_mul(c)?, k.checked_mul(d)?.checked_add(*h)?))
        }
        _ => None,
    }
}

/// `|{x ∈ [1, n] : x ≡ r (mod k)}|`.
fn count_class(k: &BigUint, r: &BigUint, n: &BigUint) -> BigUint {
    if r.is_zero() {
        n / k
    } else if n < r {
        BigUint::zero()
    } else {
        (n - r) / k + 1u32
    }
}

fn ceil_sqrt(x: &BigUint) -> BigUint {
    let s = x.sqrt();
    if &(&s * &s) == x {
        s
    } else {
        s + 1u32
    }
}

impl Counter {
    pub fn new(limits: Limits) -> Self {
        Counter { limits, layouts: Mutex::new(HashMap::new()), bitmaps: Mutex::new(HashMap::new()) }
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    /// A layout covering `[1, n]`, or `None` when the set has none.
    pub fn layout(&self, e: &SetExpr, n: &BigUint) -> Option<Arc<Layout>> {
        let key = e.key();
        if let Some(entry) = self.layouts.lock().unwrap().get(&key) {
            match entry {
                None => return None,
                Some(l) if l.covers(n) => return Some(l.clone()),
                Some(_) => {}
            }
        }
        let target = (n * 2u32).max(BigUint::from(1024u32));
        let built = layout::build(e, &target, &self.limits).map(Arc::new);
        self.layouts.lock().unwrap().insert(key, built.clone());
        built
    }

    /// Membership bitmap on `[0, n]` when `n` is within the enumeration cutoff.
    pub fn bitmap(&self, e: &SetExpr, n: &BigUint) -> Result<Arc<Bitmap>, SetError> {
        let nn = n.to_u64().filter(|&v| v <= self.limits.enumeration_cutoff).ok_or_else(|| layout::not_layout(e, n))?;
        let key = e.key();
        if let Some(b) = self.bitmaps.lock().unwrap().get(&key) {
            if b.len() > nn {
                return Ok(b.clone());
            }
        }
        let len = (nn + 1).max(1 << 16).max(2 * nn).min(self.limits.enumeration_cutoff + 1);
        let b = Arc::new(Bitmap::build(e, len, &self.limits));
        self.bitmaps.lock().unwrap().insert(key, b.clone());
        Ok(b)
    }

    /// `|S ∩ [1, n]|`.
    pub fn count_prefix(&self, e: &SetExpr, n: &BigUint) -> Result<BigUint, SetError> {
        if n.is_zero() {
            return Ok(BigUint::zero());
        }
        if let Some(l) = self.layout(e, n) {
            return Ok(l.count(n));
        }
        match e {
            SetExpr::Named(NamedSet::Squares) => Ok(n.sqrt()),
            SetExpr::Named(NamedSet::Primes) => n.to_u64().and_then(primes::prime_pi).map(BigUint::from).ok_or_else(|| layout::not_layout(e, n)),
            SetExpr::Named(NamedSet::Rangeset(bits)) => {
                Ok(SetExpr::rangeset_classes(bits).into_iter().map(|(k, r)| count_class(&k.into(), &r.into(), n)).sum())
            }
            SetExpr::Compl(a) => Ok(n - self.count_prefix(a, n)?),
            SetExpr::Affine(k, h, a) => {
                let first = BigUint::from(*k) + *h;
                if n < &first {
                    return Ok(BigUint::zero());
                }
                self.count_prefix(a, &((n - *h) / *k))
            }
            SetExpr::Union(a, b) => {
                let i = self.count_inter(a, b, n)?;
                Ok(self.count_prefix(a, n)? + self.count_prefix(b, n)? - i)
            }
            SetExpr::Diff(a, b) => {
                let i = self.count_inter(a, b, n)?;
                Ok(self.count_prefix(a, n)? - i)
            }
            SetExpr::SymDiff(a, b) => {
                let i = self.count_inter(a, b, n)?;
                Ok(self.count_prefix(a, n)? + self.count_prefix(b, n)? - i * 2u32)
            }
            SetExpr::Inter(a, b) => self.count_inter(a, b, n),
            _ => Ok(self.bitmap(e, n)?.count(n.to_u64().unwrap()).into()),
        }
    }

    fn count_inter(&self, a: &SetExpr, b: &SetExpr, n: &BigUint) -> Result<BigUint, SetError> {
        let whole = SetExpr::inter(a.clone(), b.clone());
        if let Some(l) = self.layout(&whole, n) {
            return Ok(l.count(n));
        }
        for (x, y) in [(a, b), (b, a)] {
            if let Some((c, d)) = quadratic(x) {
                if let Some(l) = self.layout(y, n) {
                    return Ok(quadratic_count(c, d, &l, n));
                }
            }
        }
        if let Some(bm) = n.to_u64().filter(|&v| v <= self.limits.enumeration_cutoff) {
            return Ok(self.bitmap(&whole, n)?.count(bm).into());
        }
        for (x, y) in [(a, b), (b, a)] {
            match y {
                SetExpr::Compl(z) => return Ok(self.count_prefix(x, n)? - self.count_inter(x, z, n)?),
                SetExpr::Union(u, v) => {
                    let both = SetExpr::inter((**u).clone(), (**v).clone());
                    return Ok(self.count_inter(x, u, n)? + self.count_inter(x, v, n)? - self.count_inter(x, &both, n)?);
                }
                _ => {}
            }
        }
        Err(layout::not_layout(&whole, n))
    }

    /// `|S ∩ [h+1, h+n]|`.
    pub fn count_window(&self, e: &SetExpr, h: &BigUint, n: &BigUint) -> Result<BigUint, SetError> {
        Ok(self.count_prefix(e, &(h + n))? - self.count_prefix(e, h)?)
    }

    /// Smallest element `x ≥ from` of `S`, restricted to the class `h mod k` when
    /// given. `Ok(None)` means there is none; an error means the search was
    /// inconclusive below `limit`.
    pub fn first_element(&self, e: &SetExpr, from: &BigUint, class: Option<(u64, u64)>, limit: &BigUint) -> Result<Option<BigUint>, SetError> {
        let e = &super::shape::simplify(e);
        let cls = class.map(|(k, h)| Residues::class(k, h));
        let mut horizon = (from * 2u32).max(BigUint::from(1u32 << 12));
        if self.layout(e, &horizon).is_some() {
            loop {
                let l = self.layout(e, &horizon).unwrap();
                if let Some(x) = l.first_at_or_after(from, cls.as_ref(), self.limits.pattern_bound) {
                    return Ok(Some(x));
                }
                if l.horizon().is_none() {
                    return Ok(None);
                }
                if &horizon > limit {
                    return Err(layout::not_layout(e, limit));
                }
                horizon = l.horizon().unwrap() * (1u32 << 16);
            }
        }
        let cap = limit.to_u64().unwrap_or(u64::MAX).min(self.limits.enumeration_cutoff);
        let bm = self.bitmap(e, &BigUint::from(cap))?;
        let mut x = from.to_u64().unwrap_or(u64::MAX).max(1);
        while x <= cap {
            match bm.next_from(x) {
                Some(y) if y <= cap => {
                    if cls.as_ref().is_none_or(|c| c.contains_residue(y)) {
                        return Ok(Some(y.into()));
                    }
                    x = y + 1;
                }
                _ => break,
            }
        }
        Err(layout::not_layout(e, &BigUint::from(cap)))
    }
}

/// Counts `j ≥ 1` with `c·j² + d ≤ n` and `c·j² + d` in the layout.
fn quadratic_count(c: u64, d: u64, l: &Layout, n: &BigUint) -> BigUint {
    let mut hits: HashMap<Residues, Residues> = HashMap::new();
    let mut total = BigUint::zero();
    let first = BigUint::from(c) + d;
    for (i, p) in l.pieces().iter().enumerate() {
        if &p.start > n {
            break;
        }
        let t = l.piece_end(i).map_or(n.clone(), |e| e.min(n.clone()));
        if t < first {
            continue;
        }
        let j_lo = if p.start <= first {
            BigUint::one()
        } else {
            let need = (&p.start - d).div_ceil(&BigUint::from(c));
            ceil_sqrt(&need)
        };
        let j_hi = ((&t - d) / c).sqrt();
        if j_lo > j_hi {
            continue;
        }
        let hit = hits.entry((*p.pattern).clone()).or_insert_with(|| {
            let m = p.pattern.modulus();
            let r = (0..m)
                .filter(|&j| {
                    let v = (c as u128 * (j as u128 * j as u128 % m as u128) + d as u128) % m as u128;
                    p.pattern.contains_residue(v as u64)
                })
                .collect();
            Residues::new(m, r)
        });
        total += hit.count_range(&j_lo, &j_hi);
    }
    total
}

/// Membership in `S` for an element of the ground set.
pub fn member(e: &SetExpr, x: &BigUint, ground: GroundSet) -> bool {
    if !ground.admits(x) {
        return false;
    }
    match e {
        SetExpr::Empty => false,
        SetExpr::Full => true,
        SetExpr::Class(c) => c.contains(x),
        SetExpr::Interval(a, b) => &BigUint::from(*a) <= x && x <= &BigUint::from(*b),
        SetExpr::Periodic(p) => p.contains(x),
        SetExpr::Blocks(f) => f.contains(x),
        SetExpr::Finite(xs) => x.to_u64().is_some_and(|v| xs.binary_search(&v).is_ok()),
        SetExpr::Named(NamedSet::Squares) => {
            let s = x.sqrt();
            &(&s * &s) == x
        }
        SetExpr::Named(NamedSet::Primes) => match x.to_u64() {
            Some(v) => primes::is_prime(v),
            None => probable_prime(x),
        },
        SetExpr::Named(NamedSet::Rangeset(bits)) => SetExpr::rangeset_classes(bits).into_iter().any(|(k, r)| x % BigUint::from(k) == BigUint::from(r)),
        SetExpr::Named(_) => e.as_block_family().is_some_and(|f| f.contains(x)),
        SetExpr::Union(a, b) => member(a, x, ground) || member(b, x, ground),
        SetExpr::Inter(a, b) => member(a, x, ground) && member(b, x, ground),
        SetExpr::Diff(a, b) => member(a, x, ground) && !member(b, x, ground),
        SetExpr::SymDiff(a, b) => member(a, x, ground) != member(b, x, ground),
        SetExpr::Compl(a) => !member(a, x, ground),
        SetExpr::Affine(k, h, a) => {
            let h = BigUint::from(*h);
            if x < &h {
                return false;
            }
            let (y, rem) = (x - &h).div_rem(&BigUint::from(*k));
            rem.is_zero() && member(a, &y, ground)
        }
    }
}

/// Strong-pseudoprime test to the first twelve prime bases, for inputs above `u64`.
fn probable_prime(n: &BigUint) -> bool {
    let one = BigUint::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'outer: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let a = BigUint::from(a);
        if (n % &a).is_zero() {
            return false;
        }
        let mut x = a.modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&BigUint::from(2u32), n);
            if x == nm1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// `|S ∩ [1, n]|` with default limits.
pub fn count_prefix(e: &SetExpr, n: &BigUint) -> Result<BigUint, SetError> {
    Counter::default().count_prefix(e, n)
}

/// `|S ∩ [h+1, h+n]|` with default limits.
pub fn count_window(e: &SetExpr, h: &BigUint, n: &BigUint) -> Result<BigUint, SetError> {
    Counter::default().count_window(e, h, n)
}

/// Smallest element `≥ from` of `S ∩ (k·H + h)` found below `limit`.
pub fn first_element(e: &SetExpr, from: &BigUint, class: Option<(u64, u64)>, limit: &BigUint) -> Result<Option<BigUint>, SetError> {
    Counter::default().first_element(e, from, class, limit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setkit::FactorialVariant;

    fn n(v: u64) -> BigUint {
        v.into()
    }

    #[test]
    fn closed_forms() {
        let c = Counter::default();
        let u = SetExpr::union(SetExpr::ap(2, 0).unwrap(), SetExpr::ap(3, 0).unwrap());
        assert_eq!(c.count_prefix(&u, &n(12)).unwrap(), n(8));
        let f = SetExpr::fblocks(FactorialVariant::Standard);
        assert_eq!(c.count_window(&f, &n(5), &n(18)).unwrap(), n(18));
    }

    #[test]
    fn squares_inside_blocks_beyond_cutoff() {
        let c = Counter::default();
        let f = SetExpr::fblocks(FactorialVariant::Standard);
        let e = SetExpr::inter(SetExpr::squares(), f.clone());
        let big = n(20_000_000);
        let got = c.count_prefix(&e, &big).unwrap();
        // blocks below 2·10⁷: [1,1], [6,23], [120,719], [5040,40319], [362880,3628799]
        let want: u64 = [(1u64, 1u64), (6, 23), (120, 719), (5040, 40319), (362880, 3628799)]
            .iter()
            .map(|&(a, b)| (1..=2000u64).filter(|j| j * j >= a && j * j <= b).count() as u64)
            .sum();
        assert_eq!(got, n(want));
        assert!(c.count_prefix(&SetExpr::primes(), &big).is_err());
    }

    #[test]
    fn big_prime_membership() {
        let p = BigUint::parse_bytes(b"170141183460469231731687303715884105727", 10).unwrap();
        assert!(member(&SetExpr::primes(), &p, GroundSet::Positive));
        assert!(!member(&SetExpr::primes(), &(p + 2u32), GroundSet::Positive));
    }
}
