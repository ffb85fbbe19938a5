use num_bigint::BigUint;
use num_traits::{FromPrimitive, ToPrimitive};
use rayon::prelude::*;

use super::asymptotic::structural;
use super::numeric::{extremes, prepare, ratio};
use super::{DensityError, DensityValue, Mode, Result, Schedule};
use crate::scalar::Scalar;
use crate::setkit::{checkpoints, Counter, SetError, SetExpr};

/// Window offsets: piece boundaries of the layout (windows flush with a
/// piece start or end) and a geometric sweep up to `horizon`.
fn offsets(counter: &Counter, e: &SetExpr, n: &BigUint, horizon: &BigUint, count: usize) -> Vec<BigUint> {
    let mut out = vec![BigUint::from(0u32)];
    if let Some(l) = counter.layout(e, horizon) {
        for (i, p) in l.pieces().iter().enumerate() {
            if &p.start > horizon {
                break;
            }
            out.push(&p.start - 1u32);
            if let Some(end) = l.piece_end(i) {
                if &end >= n {
                    out.push(end - n);
                }
            }
        }
    }
    let top = horizon.to_f64().unwrap_or(f64::MAX).ln();
    for i in 1..count {
        let x = (top * i as f64 / (count - 1) as f64).exp();
        if let Some(h) = BigUint::from_f64(x.floor()) {
            out.push(h);
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Upper or lower Banach density over windows of every checkpoint length.
pub fn banach<T: Scalar>(counter: &Counter, e: &SetExpr, mode: Mode, sch: &Schedule) -> Result<DensityValue<T>> {
    let p = prepare(e, counter);
    if let Some(v) = structural(&p, |s| s.banach(mode.is_upper())) {
        return Ok(v);
    }
    let e = &p.reduced;
    let cps = checkpoints(e, sch.depth);
    let cutoff = BigUint::from(counter.limits().enumeration_cutoff);
    let layout_top = cps.last().map(|c| c * 4u32).unwrap_or_default();
    let horizon = if counter.layout(e, &layout_top).is_some() { layout_top } else { cutoff.clone().min(layout_top) };
    let per_length: Vec<Option<Result<f64>>> = cps
        .par_iter()
        .map(|n| {
            if n > &horizon {
                return None;
            }
            let mut best: Option<f64> = None;
            for h in offsets(counter, e, n, &horizon, sch.window_count) {
                match counter.count_window(e, &h, n) {
                    Ok(k) => {
                        let r = ratio(&k, n);
                        best = Some(match (best, mode) {
                            (None, _) => r,
                            (Some(b), Mode::Upper) => b.max(r),
                            (Some(b), Mode::Lower) => b.min(r),
                        });
                    }
                    Err(SetError::EnumerationRequired { .. }) => {}
                    Err(err) => return Some(Err(err.into())),
                }
            }
            best.map(Ok)
        })
        .collect();
    let mut used = Vec::new();
    let mut vals = Vec::new();
    for (n, v) in cps.iter().zip(per_length) {
        if let Some(v) = v {
            vals.push(v?);
            used.push(n.clone());
        }
    }
    if vals.is_empty() {
        return Err(DensityError::Set(SetError::EnumerationRequired { expr: e.to_string(), n: horizon.to_string() }));
    }
    let (lo, hi) = extremes(&vals, mode, sch.burn_in);
    Ok(DensityValue::bracket(T::of(lo), T::of(hi), used))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setkit::FactorialVariant;

    #[test]
    fn blocks_reach_full_and_empty_windows() {
        let c = Counter::default();
        let sch = Schedule::default();
        let e = SetExpr::union(SetExpr::fblocks(FactorialVariant::Standard), SetExpr::squares());
        let up: DensityValue = banach(&c, &e, Mode::Upper, &sch).unwrap();
        let lo: DensityValue = banach(&c, &e, Mode::Lower, &sch).unwrap();
        assert!(up.lo > 0.99, "{up:?}");
        assert!(lo.hi < 0.01, "{lo:?}");
    }

    #[test]
    fn mixed_block_families_numeric() {
        let c = Counter::default();
        let sch = Schedule::default();
        let v = SetExpr::valpha(num_rational::BigRational::new(1.into(), 4.into())).unwrap();
        let e = SetExpr::union(v, SetExpr::affine(2, 0, SetExpr::fblocks(FactorialVariant::Standard)).unwrap());
        let up: DensityValue = banach(&c, &e, Mode::Upper, &sch).unwrap();
        assert!(up.certification == crate::densities::Certification::Numeric);
        assert!(up.hi > 0.99, "{up:?}");
    }
}
