//! Shared numeric machinery: checkpoint extremes, power sums over layouts,
//! and the preprocessing every functional applies before estimating.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use super::{DensityError, Mode, Result};
use crate::scalar::Scalar;
use crate::setkit::{is_meager, shape_of, simplify, Counter, Layout, NamedSet, SetError, SetExpr, Shape};

/// `a / b` in floating point, safe for integers beyond the `f64` range.
pub fn ratio(a: &BigUint, b: &BigUint) -> f64 {
    let shift = b.bits().saturating_sub(960);
    let (a, b) = (a >> shift, b >> shift);
    a.to_f64().unwrap_or(f64::INFINITY) / b.to_f64().unwrap_or(f64::INFINITY)
}

pub fn big_to<T: Scalar>(x: &BigUint) -> T {
    T::of(x.to_f64().unwrap_or(f64::INFINITY))
}

/// Bracket for a limit superior (upper) or inferior (lower) from a sequence
/// ordered toward the limit. After dropping `burn_in` leading values, an upper
/// bracket runs from the maximum of the trailing half to the overall maximum;
/// a lower bracket mirrors it.
pub fn extremes(values: &[f64], mode: Mode, burn_in: usize) -> (f64, f64) {
    assert!(!values.is_empty(), "no values to extremize");
    let v = if values.len() > burn_in { &values[burn_in..] } else { values };
    let tail = &v[v.len() / 2..];
    let max = |s: &[f64]| s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = |s: &[f64]| s.iter().cloned().fold(f64::INFINITY, f64::min);
    match mode {
        Mode::Upper => (max(tail), max(v)),
        Mode::Lower => (min(v), min(tail)),
    }
}

/// Number of leading terms summed directly before switching to Euler–Maclaurin.
const DIRECT_TERMS: u64 = 64;

/// `Σ x^p` over `x = a, a + m, …, b` (`b = None` for an infinite tail, `p < −1`),
/// Euler–Maclaurin with two correction terms.
fn em<T: Scalar>(a: T, b: Option<T>, m: T, p: T) -> T {
    let one = T::one();
    let f = |x: T| x.powf(p);
    let d1 = |x: T| p * m * x.powf(p - one);
    let d3 = |x: T| p * (p - one) * (p - T::of(2.0)) * m * m * m * x.powf(p - T::of(3.0));
    let q = p + one;
    match b {
        Some(b) => {
            let l = (b / a).ln();
            let integral = if q == T::zero() { l / m } else { a.powf(q) * (q * l).exp_m1() / (m * q) };
            integral + (f(a) + f(b)) / T::of(2.0) + (d1(b) - d1(a)) / T::of(12.0) - (d3(b) - d3(a)) / T::of(720.0)
        }
        None => -a.powf(q) / (m * q) + f(a) / T::of(2.0) - d1(a) / T::of(12.0) + d3(a) / T::of(720.0),
    }
}

/// `Σ_{j < count} (x0 + m·j)^p`; `count = None` sums to infinity (`p < −1`).
pub fn power_sum<T: Scalar>(x0: &BigUint, m: u64, count: Option<&BigUint>, p: T) -> T {
    let direct = count.map_or(DIRECT_TERMS, |c| c.to_u64().unwrap_or(u64::MAX).min(DIRECT_TERMS));
    let x0t: T = big_to(x0);
    let mt = T::of(m as f64);
    let mut s = T::zero();
    for j in 0..direct {
        s = s + (x0t + mt * T::of(j as f64)).powf(p);
    }
    let more = count.is_none_or(|c| c > &BigUint::from(DIRECT_TERMS));
    if more {
        let a = x0t + mt * T::of(DIRECT_TERMS as f64);
        let b = count.map(|c| big_to::<T>(&(x0 + (c - 1u32) * m)));
        s = s + em(a, b, mt, p);
    }
    s
}

/// `Σ i^p` over `i ∈ S ∩ [1, n]`, or over all of `S` when `n = None` and the
/// layout is unbounded.
pub fn layout_power_sum<T: Scalar>(l: &Layout, n: Option<&BigUint>, p: T) -> T {
    let mut total = T::zero();
    for (i, piece) in l.pieces().iter().enumerate() {
        if n.is_some_and(|n| &piece.start > n) {
            break;
        }
        let end = match (l.piece_end(i), n) {
            (Some(e), Some(n)) => Some(e.min(n.clone())),
            (Some(e), None) => Some(e),
            (None, Some(n)) => Some(n.clone()),
            (None, None) => None,
        };
        let m = piece.pattern.modulus();
        for &r in piece.pattern.residues() {
            let off = (r + m - (&piece.start % m).to_u64().unwrap()) % m;
            let x0 = &piece.start + off;
            match &end {
                Some(t) if &x0 > t => {}
                Some(t) => {
                    let count = (t - &x0) / m + 1u32;
                    total = total + power_sum(&x0, m, Some(&count), p);
                }
                None => total = total + power_sum(&x0, m, None, p),
            }
        }
    }
    total
}

/// `Σ_{i ≤ n} i^p`.
pub fn full_power_sum<T: Scalar>(n: &BigUint, p: T) -> T {
    if n.is_zero() {
        return T::zero();
    }
    power_sum(&BigUint::from(1u32), 1, Some(n), p)
}

/// Replaces meager subterms by the empty set; every built-in density is
/// unchanged by this (meager sets are null for upper densities).
pub fn reduce_meager(e: &SetExpr) -> SetExpr {
    if is_meager(e) {
        return SetExpr::Empty;
    }
    match e {
        SetExpr::Union(a, b) => SetExpr::union(reduce_meager(a), reduce_meager(b)),
        SetExpr::Inter(a, b) => SetExpr::inter(reduce_meager(a), reduce_meager(b)),
        SetExpr::Diff(a, b) => SetExpr::diff(reduce_meager(a), reduce_meager(b)),
        SetExpr::SymDiff(a, b) => SetExpr::symdiff(reduce_meager(a), reduce_meager(b)),
        SetExpr::Compl(a) => SetExpr::compl(reduce_meager(a)),
        SetExpr::Affine(k, h, a) => SetExpr::Affine(*k, *h, std::sync::Arc::new(reduce_meager(a))),
        _ => e.clone(),
    }
}

/// Structural facts shared by all functionals.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub simplified: SetExpr,
    /// Decidably finite.
    pub finite: bool,
    /// Shape up to finite and meager parts.
    pub shape: Option<Shape>,
    /// Shape up to finite parts only.
    pub strict_shape: Option<Shape>,
    /// Exact density of a bare rangeset too large for an explicit pattern.
    pub rangeset_density: Option<num_rational::BigRational>,
    pub reduced: SetExpr,
}

pub fn prepare(e: &SetExpr, counter: &Counter) -> Prepared {
    let simplified = simplify(e);
    let limits = counter.limits();
    let strict_shape = shape_of(&simplified, false, limits);
    let shape = shape_of(&simplified, true, limits);
    let finite = matches!(&strict_shape, Some(Shape::Periodic(p)) if p.is_empty());
    let rangeset_density = match &simplified {
        SetExpr::Named(NamedSet::Rangeset(bits)) => {
            Some(bits.iter().map(|&a| num_rational::BigRational::new(1.into(), num_bigint::BigInt::from(1u32) << a)).sum())
        }
        _ => None,
    };
    let reduced = simplify(&reduce_meager(&simplified));
    Prepared { simplified, finite, shape, strict_shape, rangeset_density, reduced }
}

/// Prefix ratios `|S ∩ [1, c]| / c` at every checkpoint that admits a count.
pub fn prefix_ratios(counter: &Counter, e: &SetExpr, cps: &[BigUint]) -> Result<(Vec<BigUint>, Vec<f64>)> {
    let mut used = Vec::new();
    let mut vals = Vec::new();
    let mut last_err = None;
    for c in cps {
        match counter.count_prefix(e, c) {
            Ok(k) => {
                vals.push(ratio(&k, c));
                used.push(c.clone());
            }
            Err(err @ SetError::EnumerationRequired { .. }) => last_err = Some(err),
            Err(err) => return Err(err.into()),
        }
    }
    if vals.is_empty() {
        return Err(last_err.map_or_else(|| DensityError::Domain("no checkpoints".into()), DensityError::from));
    }
    Ok((used, vals))
}
