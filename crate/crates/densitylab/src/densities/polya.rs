use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive};

use super::asymptotic::structural;
use super::numeric::{extremes, prepare, Prepared};
use super::{DensityError, DensityValue, Mode, Result, Schedule};
use crate::scalar::Scalar;
use crate::setkit::{checkpoints, Counter, SetError, SetExpr, Shape};

/// Pólya density: the limit in `s → 1⁻` of the upper (or lower) density of
/// `S` measured on intervals `(s·n, n]`.
pub fn polya<T: Scalar>(counter: &Counter, e: &SetExpr, mode: Mode, sch: &Schedule) -> Result<DensityValue<T>> {
    let p = prepare(e, counter);
    let q = Prepared { shape: p.shape.clone().filter(|s| matches!(s, Shape::Periodic(_))), ..p.clone() };
    if let Some(v) = structural(&q, |s| s.asymptotic(true)) {
        return Ok(v);
    }
    let e = &p.reduced;
    let cps = checkpoints(e, sch.depth);
    let mut per_s = Vec::new();
    let mut used = Vec::new();
    for s in &sch.polya_s {
        let (num, den) = (s.numer().abs().to_biguint().unwrap(), s.denom().to_biguint().unwrap());
        let gap = 1.0 - s.to_f64().unwrap();
        let mut vals = Vec::new();
        for c in &cps {
            let m = c * &num / &den;
            let counts = counter.count_prefix(e, c).and_then(|a| Ok((a, counter.count_prefix(e, &m)?)));
            match counts {
                Ok((a, b)) => {
                    let diff = (BigInt::from(a) - BigInt::from(b)).to_f64().unwrap();
                    vals.push(diff / (gap * c.to_f64().unwrap_or(f64::INFINITY)));
                    if per_s.is_empty() {
                        used.push(c.clone());
                    }
                }
                Err(SetError::EnumerationRequired { .. }) => {}
                Err(err) => return Err(err.into()),
            }
        }
        if vals.is_empty() {
            return Err(DensityError::Set(SetError::EnumerationRequired { expr: e.to_string(), n: cps.first().map_or_else(String::new, BigUint::to_string) }));
        }
        per_s.push(extremes(&vals, mode, sch.burn_in));
    }
    let tail = &per_s[per_s.len().saturating_sub(2)..];
    let lo = tail.iter().map(|b| b.0).fold(f64::INFINITY, f64::min);
    let hi = tail.iter().map(|b| b.1).fold(f64::NEG_INFINITY, f64::max);
    let mut v = DensityValue::bracket(T::of(lo), T::of(hi), used);
    let mids: Vec<f64> = per_s.iter().map(|b| (b.0 + b.1) / 2.0).collect();
    let monotone = |up: bool| mids.windows(2).all(|w| if up { w[1] >= w[0] - 1e-12 } else { w[1] <= w[0] + 1e-12 });
    let expected_up = !mode.is_upper();
    if !monotone(expected_up) {
        v = v.with_note("estimates drift non-monotonically in s");
    }
    Ok(v)
}
