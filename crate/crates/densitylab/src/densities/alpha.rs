use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::asymptotic::{asymptotic, structural};
use super::numeric::{extremes, full_power_sum, layout_power_sum, prepare, Prepared};
use super::{DensityError, DensityValue, Mode, Result, Schedule};
use crate::scalar::Scalar;
use crate::setkit::{checkpoints, Counter, SetError, SetExpr, Shape};

/// Relative slack covering Euler–Maclaurin truncation for non-integer powers.
const EM_SLACK: f64 = 1e-12;

/// Weighted ratios are taken over `]BASE, c]`; the limit ignores any initial
/// segment, and dropping it removes the `O(1/ln c)` drift of small elements.
const BASE: u64 = 1000;

/// Weighted density with weights `i^α`; `α = −1` is logarithmic density.
pub fn alpha_density<T: Scalar>(counter: &Counter, e: &SetExpr, alpha: &BigRational, mode: Mode, sch: &Schedule) -> Result<DensityValue<T>> {
    let minus_one = -BigRational::from_integer(1.into());
    if alpha < &minus_one {
        return Err(DensityError::Domain(format!("alpha = {alpha} is below -1")));
    }
    if alpha.is_zero() {
        return asymptotic(counter, e, mode, sch);
    }
    let p = prepare(e, counter);
    // block shapes carry no closed form for weighted densities
    let q = Prepared { shape: p.shape.clone().filter(|s| matches!(s, Shape::Periodic(_))), ..p.clone() };
    if let Some(v) = structural(&q, |s| s.asymptotic(true)) {
        return Ok(v);
    }
    let a = T::of(alpha.to_f64().unwrap());
    let e = &p.reduced;
    let base = BigUint::from(BASE);
    let cps: Vec<BigUint> = checkpoints(e, sch.depth).into_iter().filter(|c| c > &base).collect();
    let cutoff = counter.limits().enumeration_cutoff;
    let mut enumerable: Vec<u64> = cps.iter().filter_map(|c| c.to_u64()).filter(|&c| c <= cutoff).collect();
    enumerable.insert(0, BASE);
    let mut direct = None;
    let mut sum_at = |c: &BigUint| -> Result<Option<T>> {
        if let Some(l) = counter.layout(e, c) {
            return Ok(Some(layout_power_sum(&l, Some(c), a)));
        }
        let Some(cu) = c.to_u64().filter(|&v| v <= cutoff) else { return Ok(None) };
        if direct.is_none() {
            direct = Some(bitmap_power_sums::<T>(counter, e, &enumerable, a)?);
        }
        let (pts, sums) = direct.as_ref().unwrap();
        Ok(Some(sums[pts.iter().position(|&x| x == cu).unwrap()]))
    };
    let mut used = Vec::new();
    let mut vals = Vec::new();
    if let Some(s0) = sum_at(&base)? {
        let w0: T = full_power_sum(&base, a);
        for c in &cps {
            let Some(s) = sum_at(c)? else { continue };
            let w: T = full_power_sum(c, a);
            vals.push(((s - s0) / (w - w0)).f64());
            used.push(c.clone());
        }
    }
    if vals.is_empty() {
        return Err(SetError::EnumerationRequired { expr: e.to_string(), n: cps.last().map_or_else(String::new, |c| c.to_string()) }.into());
    }
    let (mut lo, mut hi) = extremes(&vals, mode, sch.burn_in);
    if alpha != &minus_one {
        lo *= 1.0 - EM_SLACK;
        hi *= 1.0 + EM_SLACK;
    }
    Ok(DensityValue::bracket(T::of(lo), T::of(hi), used))
}

/// `Σ_{i ∈ S, i ≤ c} i^α` at each point of `pts` by one sweep of the bitmap.
fn bitmap_power_sums<T: Scalar>(counter: &Counter, e: &SetExpr, pts: &[u64], a: T) -> Result<(Vec<u64>, Vec<T>)> {
    let top = pts.last().copied().unwrap_or(1);
    let bm = counter.bitmap(e, &BigUint::from(top))?;
    let mut sums = Vec::with_capacity(pts.len());
    let mut acc = T::zero();
    let mut x = 1;
    for &c in pts {
        while let Some(y) = bm.next_from(x).filter(|&y| y <= c) {
            acc = acc + T::of(y as f64).powf(a);
            x = y + 1;
        }
        x = x.max(c + 1);
        sums.push(acc);
    }
    Ok((pts.to_vec(), sums))
}
