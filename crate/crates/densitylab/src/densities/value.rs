use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Certification {
    /// Derived from the structure of the set; the value is exact.
    Structural,
    /// Extremes over a finite checkpoint schedule.
    Numeric,
}

impl Certification {
    pub fn name(self) -> &'static str {
        match self {
            Certification::Structural => "structural",
            Certification::Numeric => "numeric",
        }
    }
}

/// An exact rational, or a bracket `[lo, hi] ⊆ [0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityValue<T = f64> {
    pub exact: Option<BigRational>,
    pub lo: T,
    pub hi: T,
    pub checkpoints: Vec<BigUint>,
    pub certification: Certification,
    pub notes: Vec<String>,
}

fn to_scalar<T: Scalar>(q: &BigRational) -> T {
    T::of(q.to_f64().unwrap_or(f64::NAN))
}

impl<T: Scalar> DensityValue<T> {
    pub fn exact(q: BigRational) -> Self {
        let v = to_scalar(&q);
        DensityValue { exact: Some(q), lo: v, hi: v, checkpoints: Vec::new(), certification: Certification::Structural, notes: Vec::new() }
    }

    pub fn zero() -> Self {
        DensityValue::exact(BigRational::zero())
    }

    pub fn one() -> Self {
        DensityValue::exact(BigRational::one())
    }

    /// A numeric bracket, clipped to `[0, 1]`.
    pub fn bracket(lo: T, hi: T, checkpoints: Vec<BigUint>) -> Self {
        let clip = |x: T| x.max(T::zero()).min(T::one());
        let (lo, hi) = (clip(lo.min(hi)), clip(hi.max(lo)));
        DensityValue { exact: None, lo, hi, checkpoints, certification: Certification::Numeric, notes: Vec::new() }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn mid(&self) -> T {
        (self.lo + self.hi) / T::of(2.0)
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }

    /// `1 − v`, endpoints swapped.
    pub fn complement(&self) -> Self {
        DensityValue {
            exact: self.exact.as_ref().map(|q| BigRational::one() - q),
            lo: T::one() - self.hi,
            hi: T::one() - self.lo,
            checkpoints: self.checkpoints.clone(),
            certification: self.certification,
            notes: self.notes.clone(),
        }
    }

    pub fn map_scalar<U: Scalar>(&self) -> DensityValue<U> {
        DensityValue {
            exact: self.exact.clone(),
            lo: U::of(self.lo.f64()),
            hi: U::of(self.hi.f64()),
            checkpoints: self.checkpoints.clone(),
            certification: self.certification,
            notes: self.notes.clone(),
        }
    }
}
