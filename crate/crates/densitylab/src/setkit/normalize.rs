use num_bigint::BigUint;

use super::count::member;
use super::expr::{GroundSet, NamedSet, PeriodicSet, SetExpr};
use super::residues::{BoolOp, Residues};
use super::{Limits, SetError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Normalized {
    Periodic(PeriodicSet),
    NotPeriodic,
}

impl Normalized {
    pub fn periodic(self) -> Option<PeriodicSet> {
        match self {
            Normalized::Periodic(p) => Some(p),
            Normalized::NotPeriodic => None,
        }
    }
}

/// Eventual pattern plus a threshold from which the set follows it.
fn eventual(e: &SetExpr, limits: &Limits) -> Result<Option<(Residues, u64)>, SetError> {
    let overflow = |what: &str| SetError::ModulusOverflow { modulus: what.to_string(), bound: limits.modulus_bound };
    Ok(Some(match e {
        SetExpr::Empty => (Residues::empty(), 1),
        SetExpr::Full => (Residues::full(), 1),
        SetExpr::Class(c) => (c.pattern(), 1),
        SetExpr::Interval(a, b) => (Residues::empty(), if a > b { 1 } else { b.checked_add(1).ok_or_else(|| overflow("interval"))? }),
        SetExpr::Finite(xs) => (Residues::empty(), xs.last().map_or(1, |x| x + 1)),
        SetExpr::Periodic(p) => (p.pattern().clone(), p.threshold()),
        SetExpr::Named(NamedSet::Rangeset(bits)) => {
            let top = *bits.last().unwrap();
            // explicit residue lists are capped at the pattern bound
            let m = 1u64.checked_shl(top).filter(|&m| top < 64 && m <= limits.pattern_bound);
            let m = m.ok_or_else(|| SetError::ModulusOverflow { modulus: format!("2^{top}"), bound: limits.pattern_bound })?;
            let mut r = Vec::new();
            for (k, off) in SetExpr::rangeset_classes(bits) {
                r.extend((off as u64..m).step_by(k as usize));
            }
            (Residues::new(m, r), 1)
        }
        SetExpr::Named(_) | SetExpr::Blocks(_) => return Ok(None),
        SetExpr::Union(a, b) | SetExpr::Inter(a, b) | SetExpr::Diff(a, b) | SetExpr::SymDiff(a, b) => {
            let op = match e {
                SetExpr::Union(..) => BoolOp::Union,
                SetExpr::Inter(..) => BoolOp::Inter,
                SetExpr::Diff(..) => BoolOp::Diff,
                _ => BoolOp::SymDiff,
            };
            let (Some((pa, ta)), Some((pb, tb))) = (eventual(a, limits)?, eventual(b, limits)?) else {
                return Ok(None);
            };
            (pa.combine(&pb, op, limits.modulus_bound)?, ta.max(tb))
        }
        SetExpr::Compl(a) => match eventual(a, limits)? {
            Some((p, t)) => (p.complement(), t),
            None => return Ok(None),
        },
        SetExpr::Affine(k, h, a) => match eventual(a, limits)? {
            Some((p, t)) => {
                let t2 = k.checked_mul(t).and_then(|v| v.checked_add(*h)).ok_or_else(|| overflow("affine threshold"))?;
                (p.affine(*k, *h, limits.modulus_bound)?, t2)
            }
            None => return Ok(None),
        },
    }))
}

/// Canonical eventually periodic form of a set built from classes, intervals,
/// finite sets and boolean or affine operators.
pub fn normalize_periodic(e: &SetExpr, limits: &Limits) -> Result<Normalized, SetError> {
    let Some((pattern, threshold)) = eventual(e, limits)? else {
        return Ok(Normalized::NotPeriodic);
    };
    if threshold > limits.enumeration_cutoff {
        return Err(SetError::EnumerationRequired { expr: e.to_string(), n: threshold.to_string() });
    }
    let patch = (1..threshold).filter(|&x| member(e, &BigUint::from(x), GroundSet::Positive)).collect();
    Ok(Normalized::Periodic(PeriodicSet::new(pattern, threshold, patch)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norm(e: &SetExpr) -> PeriodicSet {
        normalize_periodic(e, &Limits::default()).unwrap().periodic().unwrap()
    }

    #[test]
    fn union_mod_four() {
        let p = norm(&SetExpr::union(SetExpr::ap(2, 0).unwrap(), SetExpr::ap(4, 1).unwrap()));
        assert_eq!((p.modulus(), p.residues()), (4, &[0, 1, 2][..]));
    }

    #[test]
    fn affine_patch() {
        let p = norm(&SetExpr::affine(3, 1, SetExpr::ap(2, 0).unwrap()).unwrap());
        assert_eq!((p.modulus(), p.residues()), (6, &[1][..]));
        assert!(!p.contains(&1u32.into()));
        assert!(p.contains(&7u32.into()));
    }

    #[test]
    fn idempotent() {
        let p = norm(&SetExpr::diff(SetExpr::ap(3, 1).unwrap(), SetExpr::finite([4, 10, 30])));
        assert_eq!(norm(&SetExpr::Periodic(p.clone())), p);
    }

    #[test]
    fn blocks_are_not_periodic() {
        let e = SetExpr::valpha_ratio(1, 2).unwrap();
        assert_eq!(normalize_periodic(&e, &Limits::default()).unwrap(), Normalized::NotPeriodic);
    }
}
