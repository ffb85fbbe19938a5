use std::fmt;

use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::densities::{asymptotic, numeric::prepare, Mode, Schedule};
use crate::setkit::{shape_of, simplify, Counter, NamedSet, SetExpr, Shape};

/// A positive integer or infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Index {
    N(u64),
    Infinity,
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Index::N(n) => write!(f, "{n}"),
            Index::Infinity => f.write_str("inf"),
        }
    }
}

/// `(q·Y + r) \ S` is finite and `Y` has upper density 1.
#[derive(Clone, Debug, PartialEq)]
pub struct IotaWitness {
    pub set: SetExpr,
    pub q: u64,
    pub r: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IotaResult {
    pub lower: Index,
    pub upper: Index,
    pub exact: bool,
    pub witness: Option<IotaWitness>,
}

impl IotaResult {
    fn exact(n: Index, witness: Option<IotaWitness>) -> Self {
        IotaResult { lower: n, upper: n, exact: true, witness }
    }

    pub fn value(&self) -> Option<Index> {
        self.exact.then_some(self.upper)
    }
}

/// Search bound on `q` and `r` for progression witnesses.
pub const WITNESS_CAP: u64 = 8;

/// `n` with `α ∈ [1/n, 1/(n−1))`.
pub fn valpha_index(alpha: &BigRational) -> u64 {
    alpha.recip().ceil().to_integer().to_u64().unwrap_or(u64::MAX)
}

fn progression_witness(s: &Shape) -> Option<IotaWitness> {
    match s {
        Shape::Periodic(p) if !p.is_empty() => Some(IotaWitness { set: SetExpr::Full, q: p.modulus(), r: p.residues()[0] }),
        _ => None,
    }
}

fn structural(counter: &Counter, e: &SetExpr) -> Option<IotaResult> {
    let limits = counter.limits();
    match e {
        SetExpr::Full => return Some(IotaResult::exact(Index::N(1), Some(IotaWitness { set: SetExpr::Full, q: 1, r: 0 }))),
        SetExpr::Named(NamedSet::Valpha(a)) => return Some(IotaResult::exact(Index::N(valpha_index(a)), None)),
        SetExpr::Affine(_, _, inner) => {
            // affine images of positive-density sets keep their index
            if let Some(r) = structural(counter, inner).filter(|r| r.upper != Index::Infinity) {
                return Some(IotaResult { witness: None, ..r });
            }
        }
        SetExpr::Union(a, b) => {
            for side in [a, b] {
                if let Some(w) = shape_of(side, false, limits).as_ref().and_then(progression_witness) {
                    return Some(IotaResult::exact(Index::N(1), Some(w)));
                }
            }
        }
        _ => {}
    }
    shape_of(e, false, limits).as_ref().and_then(progression_witness).map(|w| IotaResult::exact(Index::N(1), Some(w)))
}

/// The index `ι(S)`: exact on the structured catalog (finite, periodic,
/// `V_α`, affine images, unions with a progression), bounds elsewhere.
pub fn iota_index(counter: &Counter, e: &SetExpr) -> IotaResult {
    let e = simplify(e);
    if prepare(&e, counter).finite {
        return IotaResult::exact(Index::Infinity, None);
    }
    if let Some(r) = structural(counter, &e) {
        return r;
    }
    let limits = counter.limits();
    for q in 1..=WITNESS_CAP {
        for r in 0..=WITNESS_CAP {
            let Ok(prog) = SetExpr::affine(q, r, SetExpr::Full) else { continue };
            let missing = shape_of(&SetExpr::diff(prog, e.clone()), false, limits);
            if matches!(&missing, Some(Shape::Periodic(p)) if p.is_empty()) {
                return IotaResult::exact(Index::N(1), Some(IotaWitness { set: SetExpr::Full, q, r }));
            }
        }
    }
    let d = asymptotic::<f64>(counter, &e, Mode::Upper, &Schedule::default());
    let upper = match d {
        Ok(v) if v.lo > 0.0 => {
            let n = (1.0 / v.lo).ceil();
            // guard against 1/lo landing just above an integer
            let n = if (1.0 / n) > v.lo { n + 1.0 } else { n };
            Index::N(n as u64)
        }
        _ => Index::Infinity,
    };
    let witness = (upper != Index::Infinity).then(|| IotaWitness { set: e.clone(), q: 1, r: 0 });
    IotaResult { lower: Index::N(1), upper, exact: upper == Index::N(1), witness }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn catalog_values() {
        let c = Counter::default();
        assert_eq!(iota_index(&c, &SetExpr::valpha(r(1, 3)).unwrap()).value(), Some(Index::N(3)));
        assert_eq!(iota_index(&c, &SetExpr::valpha(r(1, 4)).unwrap()).value(), Some(Index::N(4)));
        assert_eq!(iota_index(&c, &SetExpr::valpha(r(2, 3)).unwrap()).value(), Some(Index::N(2)));
        assert_eq!(iota_index(&c, &SetExpr::Full).value(), Some(Index::N(1)));
        assert_eq!(iota_index(&c, &SetExpr::finite(vec![2, 9])).value(), Some(Index::Infinity));
    }

    #[test]
    fn odd_numbers_witness() {
        let c = Counter::default();
        let res = iota_index(&c, &SetExpr::ap(2, 1).unwrap());
        assert_eq!(res.value(), Some(Index::N(1)));
        let w = res.witness.unwrap();
        assert_eq!((w.set, w.q, w.r), (SetExpr::Full, 2, 1));
    }

    #[test]
    fn full_upper_density_gives_one() {
        let c = Counter::default();
        let res = iota_index(&c, &SetExpr::fblocks(crate::setkit::FactorialVariant::Standard));
        assert_eq!(res.value(), Some(Index::N(1)));
    }

    #[test]
    fn mixed_block_families_only_bounded() {
        let c = Counter::default();
        let e = SetExpr::union(
            SetExpr::affine(2, 0, SetExpr::valpha(r(1, 3)).unwrap()).unwrap(),
            SetExpr::affine(2, 1, SetExpr::valpha(r(1, 4)).unwrap()).unwrap(),
        );
        let res = iota_index(&c, &e);
        assert!(res.lower < res.upper && !res.exact, "{res:?}");
    }
}
