use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use super::iota::{iota_index, Index};
use crate::densities::{asymptotic, DensityError, DensityValue, Functional, Mode, Provenance, Result};
use crate::scalar::Scalar;
use crate::setkit::{Counter, SetExpr};

/// The bound `K ≥ 1` on θ*, possibly infinite.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum KParam {
    Finite(BigRational),
    Infinite,
}

impl fmt::Display for KParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KParam::Finite(k) => write!(f, "{k}"),
            KParam::Infinite => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for KParam {
    type Err = DensityError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if matches!(s, "inf" | "infinity" | "∞") {
            return Ok(KParam::Infinite);
        }
        let bad = || DensityError::Domain(format!("bad K {s:?}"));
        let parse = |t: &str| t.trim().parse::<BigInt>().map_err(|_| bad());
        let k = match s.split_once('/') {
            Some((n, d)) => {
                let d = parse(d)?;
                if d == BigInt::from(0) {
                    return Err(bad());
                }
                BigRational::new(parse(n)?, d)
            }
            None => BigRational::from_integer(parse(s)?),
        };
        Ok(KParam::Finite(k))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ThetaCase {
    /// `K > 1`: `aₙ = ϱₙ⁻¹·min(2ⁿ⁻¹, K)`.
    One,
    /// `K = 1`: `aₙ = 1` up to the pivot `v`, then `(1 + ϱ_v)/(2ϱₙ)`.
    Two,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThetaWeights {
    pub k: KParam,
    pub case: ThetaCase,
    pub v: u64,
}

impl ThetaWeights {
    pub fn new(k: KParam) -> Result<Self> {
        let case = match &k {
            KParam::Finite(q) if q < &BigRational::one() => return Err(DensityError::Domain(format!("K = {q} is below 1"))),
            KParam::Finite(q) if q.is_one() => ThetaCase::Two,
            _ => ThetaCase::One,
        };
        Ok(ThetaWeights { k, case, v: 3 })
    }

    /// `ϱ₁ = 1`, `ϱₙ = 1/(n−1)`.
    pub fn rho(n: u64) -> BigRational {
        assert!(n >= 1);
        BigRational::new(1.into(), n.saturating_sub(1).max(1).into())
    }

    pub fn a(&self, n: u64) -> BigRational {
        assert!(n >= 1);
        match self.case {
            ThetaCase::One => {
                let pow = BigRational::from_integer(BigInt::from(2u32).pow((n - 1) as u32));
                let m = match &self.k {
                    KParam::Finite(k) if k < &pow => k.clone(),
                    _ => pow,
                };
                m / Self::rho(n)
            }
            ThetaCase::Two if n <= self.v => BigRational::one(),
            ThetaCase::Two => (BigRational::one() + Self::rho(self.v)) / (BigRational::from_integer(2.into()) * Self::rho(n)),
        }
    }
}

/// `θ*(S) = a_{ι(S)}·d*(S)`, zero when `ι(S) = ∞`. Fails outside the sets
/// where `ι` is known exactly.
pub fn theta_star<T: Scalar>(k: KParam, counter: Arc<Counter>) -> Result<Functional<T>> {
    let w = ThetaWeights::new(k.clone())?;
    Ok(Functional::new(format!("theta:{k}"), Mode::Upper, Provenance::Combinator("theta".into()), move |e, sch| {
        let idx = iota_index(&counter, e);
        let n = match idx.value() {
            None => return Err(DensityError::IotaNotExact(e.to_string())),
            Some(Index::Infinity) => return Ok(DensityValue::zero()),
            Some(Index::N(n)) => n,
        };
        let a = w.a(n);
        let d: DensityValue<T> = asymptotic(&counter, e, Mode::Upper, sch)?;
        Ok(match &d.exact {
            Some(q) => DensityValue::exact(q * &a),
            None => {
                // values may exceed 1, so no clipping here
                let af = T::of(a.to_f64().unwrap());
                DensityValue { lo: d.lo * af, hi: d.hi * af, ..d }
            }
        })
    }))
}

/// A strict inclusion `Y ⊊ X` with `θ*(Y) > θ*(X)`, as `(Y, X)`.
pub fn theta_f2_witness(k: &KParam) -> (SetExpr, SetExpr) {
    let v = |n, d| SetExpr::valpha(BigRational::new(BigInt::from(n), BigInt::from(d))).unwrap();
    match k {
        KParam::Finite(q) if q.is_one() => (v(1, 4), v(1, 3)),
        _ => (v(2, 3), SetExpr::Full),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::Schedule;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn weights_by_case() {
        let two = ThetaWeights::new(KParam::Finite(r(2, 1))).unwrap();
        assert_eq!((1..=4).map(|n| two.a(n)).collect::<Vec<_>>(), vec![r(1, 1), r(2, 1), r(4, 1), r(6, 1)]);
        let inf = ThetaWeights::new(KParam::Infinite).unwrap();
        assert_eq!((1..=4).map(|n| inf.a(n)).collect::<Vec<_>>(), vec![r(1, 1), r(2, 1), r(8, 1), r(24, 1)]);
        let one = ThetaWeights::new(KParam::Finite(r(1, 1))).unwrap();
        assert_eq!((1..=4).map(|n| one.a(n)).collect::<Vec<_>>(), vec![r(1, 1), r(1, 1), r(1, 1), r(9, 4)]);
    }

    #[test]
    fn weights_nondecreasing() {
        for k in [KParam::Finite(r(1, 1)), KParam::Finite(r(3, 2)), KParam::Finite(r(5, 1)), KParam::Infinite] {
            let w = ThetaWeights::new(k).unwrap();
            assert!((1..40).all(|n| w.a(n) <= w.a(n + 1)));
        }
    }

    #[test]
    fn non_monotone_witnesses() {
        let c = Arc::new(Counter::default());
        let sch = Schedule::default();
        for k in [KParam::Finite(r(1, 1)), KParam::Finite(r(2, 1)), KParam::Infinite] {
            let f: Functional = theta_star(k.clone(), c.clone()).unwrap();
            let (y, x) = theta_f2_witness(&k);
            let (vy, vx) = (f.eval(&y, &sch).unwrap(), f.eval(&x, &sch).unwrap());
            assert!(vy.exact.unwrap() > vx.exact.unwrap(), "K = {k}");
        }
    }

    #[test]
    fn outside_catalog() {
        let c = Arc::new(Counter::default());
        let f: Functional = theta_star(KParam::Infinite, c).unwrap();
        let e = SetExpr::union(
            SetExpr::affine(2, 0, SetExpr::valpha(r(1, 3)).unwrap()).unwrap(),
            SetExpr::affine(2, 1, SetExpr::valpha(r(1, 4)).unwrap()).unwrap(),
        );
        assert!(matches!(f.eval(&e, &Schedule::default()), Err(DensityError::IotaNotExact(_))));
    }
}
