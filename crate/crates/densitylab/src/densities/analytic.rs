use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{FromPrimitive, ToPrimitive};

use super::asymptotic::structural;
use super::numeric::{layout_power_sum, power_sum, prepare, Prepared};
use super::{DensityError, DensityValue, Mode, Result, Schedule};
use crate::scalar::Scalar;
use crate::setkit::{simplify, Counter, NamedSet, SetExpr, Shape};

/// Relative error allowed for sums evaluated to infinity in closed form.
const CLOSED_SLACK: f64 = 1e-12;

/// Riemann zeta for `s > 1`.
pub fn zeta<T: Scalar>(s: T) -> T {
    power_sum(&BigUint::from(1u32), 1, None, -s)
}

/// Smallest `N` with `N^{1−s}/(s − 1) ≤ tol`, if representable.
fn cutoff_for(s: f64, tol: f64) -> Option<BigUint> {
    let ln_n = (1.0 / (tol * (s - 1.0))).ln() / (s - 1.0);
    if ln_n > 690.0 {
        return None;
    }
    BigUint::from_f64(ln_n.max(0.0).exp().ceil())
}

/// Bracket for `Σ_{i∈S} i^{−s}` with a tail of at most `tol`.
fn mass<T: Scalar>(counter: &Counter, e: &SetExpr, s: f64, tol: f64) -> Result<(T, T)> {
    let p = T::of(-s);
    let tight = |v: T| (v * T::of(1.0 - CLOSED_SLACK), v * T::of(1.0 + CLOSED_SLACK));
    if matches!(e, SetExpr::Named(NamedSet::Squares)) {
        return Ok(tight(zeta(T::of(2.0 * s))));
    }
    let small = BigUint::from(1024u32);
    if let Some(l) = counter.layout(e, &small) {
        if l.horizon().is_none() {
            return Ok(tight(layout_power_sum(&l, None, p)));
        }
    }
    let unreachable = || DensityError::TailBoundUnreachable { expr: e.to_string(), s: format!("{s}") };
    let n = cutoff_for(s, tol).ok_or_else(unreachable)?;
    let tail = T::of(n.to_f64().unwrap().powf(1.0 - s) / (s - 1.0));
    if let Some(l) = counter.layout(e, &n) {
        let partial = layout_power_sum(&l, Some(&n), p);
        return Ok((partial, partial + tail));
    }
    let nn = n.to_u64().filter(|&v| v <= counter.limits().enumeration_cutoff).ok_or_else(unreachable)?;
    let bm = counter.bitmap(e, &n)?;
    let mut partial = T::zero();
    let mut x = 1;
    while let Some(y) = bm.next_from(x).filter(|&y| y <= nn) {
        partial = partial + T::of(y as f64).powf(p);
        x = y + 1;
    }
    Ok((partial, partial + tail))
}

/// Masses are compared above `BASE`; the limit ignores any initial segment.
const BASE: u64 = 1000;

/// `Σ_{i∈S, i ≤ BASE} i^{−s}`.
fn head_mass<T: Scalar>(counter: &Counter, e: &SetExpr, s: f64) -> Result<T> {
    let base = BigUint::from(BASE);
    if let Some(l) = counter.layout(e, &base) {
        return Ok(layout_power_sum(&l, Some(&base), T::of(-s)));
    }
    let bm = counter.bitmap(e, &base)?;
    let mut acc = T::zero();
    let mut x = 1;
    while let Some(y) = bm.next_from(x).filter(|&y| y <= BASE) {
        acc = acc + T::of(y as f64).powf(T::of(-s));
        x = y + 1;
    }
    Ok(acc)
}

/// Analytic density `lim_{s→1⁺} Σ_{i∈S} i^{−s} / ζ(s)`, or relative to `A`
/// with `ζ_A(s) = Σ_{i∈A} i^{−s}` (assumed divergent at 1).
pub fn analytic<T: Scalar>(counter: &Counter, e: &SetExpr, mode: Mode, sch: &Schedule, restrict: Option<&SetExpr>) -> Result<DensityValue<T>> {
    let p = prepare(e, counter);
    let target = match restrict {
        None => {
            let q = Prepared { shape: p.shape.clone().filter(|s| matches!(s, Shape::Periodic(_))), ..p.clone() };
            if let Some(v) = structural(&q, |s| s.asymptotic(true)) {
                return Ok(v);
            }
            p.reduced.clone()
        }
        Some(_) if p.finite => return Ok(DensityValue::zero()),
        Some(a) => simplify(&SetExpr::inter(p.simplified.clone(), a.clone())),
    };
    let mut per_s: Vec<(f64, f64)> = Vec::new();
    for s in &sch.analytic_s {
        let sf = s.to_f64().unwrap();
        let (zlo, zhi, zhead): (T, T, T) = match restrict {
            None => {
                let z = zeta(T::of(sf));
                (z * T::of(1.0 - CLOSED_SLACK), z * T::of(1.0 + CLOSED_SLACK), head_mass(counter, &SetExpr::Full, sf)?)
            }
            Some(a) => {
                let rough: T = mass(counter, a, sf, f64::INFINITY).map(|m: (T, T)| m.0).unwrap_or(T::one());
                let (lo, hi) = mass(counter, a, sf, sch.tolerance / 4.0 * rough.f64())?;
                (lo, hi, head_mass(counter, a, sf)?)
            }
        };
        let (zlo, zhi) = (zlo - zhead, zhi - zhead);
        let tol = sch.tolerance / 4.0 * zlo.f64();
        let (mlo, mhi): (T, T) = mass(counter, &target, sf, tol)?;
        let mhead: T = head_mass(counter, &target, sf)?;
        per_s.push((((mlo - mhead) / zhi).f64(), ((mhi - mhead) / zlo).f64()));
    }
    let last = &per_s[per_s.len().saturating_sub(2)..];
    let pick = |f: fn(f64, f64) -> f64, init: f64, side: fn(&(f64, f64)) -> f64| last.iter().map(side).fold(init, f);
    let (lo, hi) = match mode {
        Mode::Upper => (pick(f64::max, f64::NEG_INFINITY, |b| b.0), pick(f64::max, f64::NEG_INFINITY, |b| b.1)),
        Mode::Lower => (pick(f64::min, f64::INFINITY, |b| b.0), pick(f64::min, f64::INFINITY, |b| b.1)),
    };
    let cps = sch.analytic_s.iter().rev().take(2).filter_map(|s: &BigRational| cutoff_for(s.to_f64().unwrap(), sch.tolerance / 4.0)).collect();
    Ok(DensityValue::bracket(T::of(lo), T::of(hi), cps))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_two() {
        let z: f64 = zeta(2.0);
        assert!((z - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-12);
    }

    #[test]
    fn zeta_near_one_against_laurent_expansion() {
        // ζ(s) = 1/(s−1) + γ − γ₁(s−1) + O((s−1)²)
        let s = 1.01;
        let approx = 1.0 / (s - 1.0) + 0.5772156649 + 0.0728158455 * (s - 1.0);
        let z: f64 = zeta(s);
        assert!((z - approx).abs() < 1e-5, "{z} vs {approx}");
    }

    #[test]
    fn squares_vanish() {
        let c = Counter::default();
        let sch = Schedule::default();
        let v: DensityValue = analytic(&c, &SetExpr::squares(), Mode::Upper, &sch, None).unwrap();
        assert!(v.hi < 0.02, "{v:?}");
    }

    #[test]
    fn progression_mass_matches_direct_sum() {
        let c = Counter::default();
        let e = SetExpr::union(SetExpr::ap(5, 2).unwrap(), SetExpr::interval(1, 40));
        let (lo, hi): (f64, f64) = mass(&c, &e, 2.0, 1e-9).unwrap();
        let direct: f64 = (1..2_000_000u64).filter(|x| x % 5 == 2 || *x <= 40).map(|x| (x as f64).powi(-2)).sum();
        assert!(lo <= direct + 1e-6 && direct <= hi + 1e-6, "{lo} {direct} {hi}");
    }
}
