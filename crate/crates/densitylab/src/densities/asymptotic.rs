use num_bigint::BigUint;
use num_traits::ToPrimitive;

use super::numeric::{extremes, prefix_ratios, prepare, Prepared};
use super::{DensityError, DensityValue, Mode, Result, Schedule};
use crate::scalar::Scalar;
use crate::setkit::{checkpoints, Counter, SetExpr, Shape};

/// Exact value from structure: finite sets, periodic or block shapes, rangesets.
pub(crate) fn structural<T: Scalar>(p: &Prepared, value: impl Fn(&Shape) -> num_rational::BigRational) -> Option<DensityValue<T>> {
    if p.finite {
        return Some(DensityValue::zero());
    }
    if let Some(q) = &p.rangeset_density {
        return Some(DensityValue::exact(q.clone()));
    }
    p.shape.as_ref().map(|s| DensityValue::exact(value(s)))
}

/// Upper or lower asymptotic density.
pub fn asymptotic<T: Scalar>(counter: &Counter, e: &SetExpr, mode: Mode, sch: &Schedule) -> Result<DensityValue<T>> {
    let p = prepare(e, counter);
    if let Some(v) = structural(&p, |s| s.asymptotic(mode.is_upper())) {
        return Ok(v);
    }
    asymptotic_numeric(counter, &p.reduced, mode, sch)
}

/// Checkpoint bracket without structural shortcuts.
pub fn asymptotic_numeric<T: Scalar>(counter: &Counter, e: &SetExpr, mode: Mode, sch: &Schedule) -> Result<DensityValue<T>> {
    let cps = checkpoints(e, sch.depth);
    let (used, vals) = prefix_ratios(counter, e, &cps)?;
    let (lo, hi) = extremes(&vals, mode, sch.burn_in);
    Ok(DensityValue::bracket(T::of(lo), T::of(hi), used))
}

/// Asymptotic density from explicit enumeration up to the cutoff, using the
/// element-indexed ratios `k / s_k` on both sides of every checkpoint.
pub fn enumeration_asymptotic<T: Scalar>(counter: &Counter, e: &SetExpr, mode: Mode, sch: &Schedule) -> Result<DensityValue<T>> {
    let p = prepare(e, counter);
    if p.finite {
        return Ok(DensityValue::zero());
    }
    let cutoff = counter.limits().enumeration_cutoff;
    let bm = counter.bitmap(e, &BigUint::from(cutoff))?;
    let top = bm.len() - 1;
    let needed = 100 * sch.depth as u64;
    if bm.count(top) < needed {
        return Err(DensityError::Domain(format!("fewer than {needed} elements of {e} below {top}")));
    }
    let mut used = Vec::new();
    let mut vals = Vec::new();
    for c in checkpoints(e, sch.depth).iter().filter_map(|c| c.to_u64()).filter(|&c| c <= top) {
        let n = bm.count(c);
        if let Some(x) = bm.prev_at_or_before(c) {
            vals.push(n as f64 / x as f64);
        }
        if let Some(y) = bm.next_from(c + 1) {
            vals.push((n + 1) as f64 / y as f64);
        }
        used.push(BigUint::from(c));
    }
    if vals.is_empty() {
        return Err(DensityError::Domain(format!("no checkpoints for {e} below {top}")));
    }
    let (lo, hi) = extremes(&vals, mode, 2 * sch.burn_in);
    Ok(DensityValue::bracket(T::of(lo), T::of(hi), used))
}
