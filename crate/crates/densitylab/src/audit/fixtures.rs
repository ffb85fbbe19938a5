use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;

use crate::densities::{dual, DensityError, DensityValue, Functional, Mode, Provenance};
use crate::setkit::{residue_profile, simplify, Counter, SetExpr, Tri};

/// Functionals that each break a known subset of the axioms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Fixture {
    /// `X ↦ 1/min X`; fails only F5.
    Minimum,
    /// 1 on cofinite sets, 0 elsewhere (lower).
    CofiniteIndicator,
    /// 1 on infinite sets, 0 on finite ones; fails only F4.
    CofiniteConjugate,
    /// Fails only F4.
    ConstantOne,
}

impl Fixture {
    pub const ALL: [Fixture; 4] = [Fixture::Minimum, Fixture::CofiniteIndicator, Fixture::CofiniteConjugate, Fixture::ConstantOne];

    pub fn name(self) -> &'static str {
        match self {
            Fixture::Minimum => "mfix",
            Fixture::CofiniteIndicator => "cofinite",
            Fixture::CofiniteConjugate => "dual:cofinite",
            Fixture::ConstantOne => "one",
        }
    }

    pub fn parse(s: &str) -> Option<Fixture> {
        Fixture::ALL.into_iter().find(|f| f.name() == s)
    }

    pub fn build(self, counter: Arc<Counter>) -> Functional {
        match self {
            Fixture::Minimum => minimum_functional(counter),
            Fixture::CofiniteIndicator => cofinite_indicator(counter),
            Fixture::CofiniteConjugate => cofinite_conjugate(counter),
            Fixture::ConstantOne => constant_one(),
        }
    }
}

/// `𝔪(X) = 1/min X`, `𝔪(∅) = 0`.
pub fn minimum_functional(counter: Arc<Counter>) -> Functional {
    let limit = BigUint::one() << 128u32;
    Functional::new("mfix", Mode::Upper, Provenance::Fixture, move |e, _| match counter.first_element(e, &BigUint::one(), None, &limit)? {
        None => Ok(DensityValue::zero()),
        Some(x) => Ok(DensityValue::exact(BigRational::new(BigInt::one(), x.into()))),
    })
}

/// `δ_*(X) = 1` iff `Xᶜ` is finite. Undecided finiteness is an error.
pub fn cofinite_indicator(counter: Arc<Counter>) -> Functional {
    Functional::new("cofinite", Mode::Lower, Provenance::Fixture, move |e, _| {
        let c = simplify(&SetExpr::compl(e.clone()));
        match residue_profile(&c, 1, &counter)[0].infinite {
            Tri::Yes => Ok(DensityValue::zero()),
            Tri::No => Ok(DensityValue::one()),
            Tri::Unknown => Err(DensityError::Domain(format!("finiteness of {c} is undecided"))),
        }
    })
}

pub fn cofinite_conjugate(counter: Arc<Counter>) -> Functional {
    dual(&cofinite_indicator(counter))
}

pub fn constant_one() -> Functional {
    Functional::new("one", Mode::Upper, Provenance::Fixture, |_, _| Ok(DensityValue::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::Schedule;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn minimum_values() {
        let f = minimum_functional(Arc::default());
        let sch = Schedule::default();
        assert_eq!(f.eval(&SetExpr::finite(vec![4, 9]), &sch).unwrap().exact, Some(r(1, 4)));
        assert_eq!(f.eval(&SetExpr::primes(), &sch).unwrap().exact, Some(r(1, 2)));
        assert_eq!(f.eval(&SetExpr::Empty, &sch).unwrap().exact, Some(r(0, 1)));
        let v = SetExpr::valpha(r(1, 3)).unwrap();
        let first = (1..200u64).find(|x| crate::setkit::Counter::default().count_window(&v, &(x - 1).into(), &1u32.into()).unwrap() == 1u32.into());
        assert_eq!(f.eval(&v, &sch).unwrap().exact, Some(r(1, first.unwrap() as i64)));
    }

    #[test]
    fn cofinite_values() {
        let f = cofinite_indicator(Arc::default());
        let g = cofinite_conjugate(Arc::default());
        let sch = Schedule::default();
        let cof = SetExpr::compl(SetExpr::finite(vec![2, 3]));
        assert_eq!(f.eval(&cof, &sch).unwrap().exact, Some(r(1, 1)));
        assert_eq!(f.eval(&SetExpr::ap(2, 0).unwrap(), &sch).unwrap().exact, Some(r(0, 1)));
        assert_eq!(g.eval(&SetExpr::finite(vec![7]), &sch).unwrap().exact, Some(r(0, 1)));
        assert_eq!(g.eval(&SetExpr::squares(), &sch).unwrap().exact, Some(r(1, 1)));
    }
}
