use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{alpha_density, analytic, asymptotic, banach, buck_upper, polya, DensityError, DensityValue, Mode, Result, Schedule};
use crate::scalar::Scalar;
use crate::setkit::{simplify, Counter, SetExpr};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    Builtin,
    DualOf(String),
    Combinator(String),
    Fixture,
}

type EvalFn<T> = dyn Fn(&SetExpr, &Schedule) -> Result<DensityValue<T>> + Send + Sync;

/// A named upper or lower density with memoized evaluation.
#[derive(Clone)]
pub struct Functional<T: Scalar = f64> {
    name: String,
    mode: Mode,
    provenance: Provenance,
    eval: Arc<EvalFn<T>>,
    cache: Arc<Mutex<HashMap<String, Result<DensityValue<T>>>>>,
    dual_of: Option<Arc<Functional<T>>>,
    /// Narrow numeric values on unions and intersections with the values of
    /// the operands; sound for monotone, subadditive upper densities and their
    /// lower counterparts.
    operand_bounds: bool,
}

impl<T: Scalar> fmt::Debug for Functional<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Functional").field("name", &self.name).field("mode", &self.mode).field("provenance", &self.provenance).finish()
    }
}

impl<T: Scalar> Functional<T> {
    pub fn new(
        name: impl Into<String>,
        mode: Mode,
        provenance: Provenance,
        eval: impl Fn(&SetExpr, &Schedule) -> Result<DensityValue<T>> + Send + Sync + 'static,
    ) -> Self {
        Functional { name: name.into(), mode, provenance, eval: Arc::new(eval), cache: Arc::default(), dual_of: None, operand_bounds: false }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn eval(&self, e: &SetExpr, sch: &Schedule) -> Result<DensityValue<T>> {
        let key = format!("{}|{:?}", e.key(), sch);
        if let Some(v) = self.cache.lock().unwrap().get(&key) {
            return v.clone();
        }
        let mut v = (self.eval)(e, sch);
        if self.operand_bounds {
            if let Ok(x) = &v {
                if x.exact.is_none() {
                    v = Ok(self.refine(e, x.clone(), sch));
                }
            }
        }
        self.cache.lock().unwrap().insert(key, v.clone());
        v
    }

    fn refine(&self, e: &SetExpr, v: DensityValue<T>, sch: &Schedule) -> DensityValue<T> {
        // finite sets are null for every built-in
        if let Some(x) = strip_finite(e) {
            return match self.eval(&x, sch) {
                Ok(w) if w.exact.is_some() => w,
                Ok(w) => {
                    let lo = v.lo.max(w.lo);
                    DensityValue { lo, hi: v.hi.min(w.hi).max(lo), ..v }
                }
                Err(_) => v,
            };
        }
        let Some((union, a, b)) = split(e) else { return v };
        let (Ok(pa), Ok(pb)) = (self.eval(&a, sch), self.eval(&b, sch)) else { return v };
        let upper = self.mode.is_upper();
        let (zero, one) = (BigRational::zero(), BigRational::one());
        // (floor, ceiling) as rationals when both operands are exact
        let bounds_q = match (&pa.exact, &pb.exact) {
            (Some(x), Some(y)) => Some(match (union, upper) {
                (true, true) => (x.max(y).clone(), (x + y).min(one.clone())),
                (true, false) => (x.max(y).clone(), one.clone()),
                (false, true) => (zero.clone(), x.min(y).clone()),
                (false, false) => ((x + y - &one).max(zero.clone()), x.min(y).clone()),
            }),
            _ => None,
        };
        if let Some((f, c)) = &bounds_q {
            if f == c {
                return DensityValue::exact(f.clone());
            }
        }
        let (floor, ceil) = match (union, upper) {
            (true, true) => (pa.lo.max(pb.lo), (pa.hi + pb.hi).min(T::one())),
            (true, false) => (pa.lo.max(pb.lo), T::one()),
            (false, true) => (T::zero(), pa.hi.min(pb.hi)),
            (false, false) => ((pa.lo + pb.lo - T::one()).max(T::zero()), pa.hi.min(pb.hi)),
        };
        let lo = v.lo.max(floor).min(ceil);
        let hi = v.hi.min(ceil).max(lo);
        DensityValue { lo, hi, ..v }
    }
}

/// A union (`true`) or intersection, with affine maps pushed onto the
/// operands, differences as `A ∩ Bᶜ` and complements through De Morgan's laws.
fn split(e: &SetExpr) -> Option<(bool, SetExpr, SetExpr)> {
    match simplify(e) {
        SetExpr::Union(a, b) => Some((true, (*a).clone(), (*b).clone())),
        SetExpr::Inter(a, b) => Some((false, (*a).clone(), (*b).clone())),
        SetExpr::Diff(a, b) => Some((false, (*a).clone(), SetExpr::compl((*b).clone()))),
        SetExpr::Affine(k, h, x) => {
            let (u, a, b) = split(&x)?;
            Some((u, SetExpr::Affine(k, h, Arc::new(a)), SetExpr::Affine(k, h, Arc::new(b))))
        }
        SetExpr::Compl(x) => match &*x {
            SetExpr::Union(a, b) => Some((false, SetExpr::compl((**a).clone()), SetExpr::compl((**b).clone()))),
            SetExpr::Inter(a, b) => Some((true, SetExpr::compl((**a).clone()), SetExpr::compl((**b).clone()))),
            SetExpr::Diff(a, b) => Some((true, SetExpr::compl((**a).clone()), (**b).clone())),
            _ => None,
        },
        _ => None,
    }
}

/// `X` for `X ∪ F`, `X ∖ F` and `X △ F` with `F` finite, at the top level.
fn strip_finite(e: &SetExpr) -> Option<SetExpr> {
    let mut cur = simplify(e);
    let mut changed = false;
    loop {
        let next = match &cur {
            SetExpr::Union(a, b) | SetExpr::SymDiff(a, b) if matches!(**b, SetExpr::Finite(_)) => (**a).clone(),
            SetExpr::Union(a, b) | SetExpr::SymDiff(a, b) if matches!(**a, SetExpr::Finite(_)) => (**b).clone(),
            SetExpr::Diff(a, b) if matches!(**b, SetExpr::Finite(_)) => (**a).clone(),
            _ => return changed.then_some(cur),
        };
        cur = next;
        changed = true;
    }
}

/// `f^d(S) = 1 − f(Sᶜ)`; the dual of a dual is the original functional.
pub fn dual<T: Scalar>(f: &Functional<T>) -> Functional<T> {
    if let Some(orig) = &f.dual_of {
        return (**orig).clone();
    }
    let inner = f.clone();
    let mut d = Functional::new(format!("dual:{}", f.name), f.mode.flip(), Provenance::DualOf(f.name.clone()), move |e, sch| {
        Ok(inner.eval(&SetExpr::compl(e.clone()), sch)?.complement())
    });
    d.dual_of = Some(Arc::new(f.clone()));
    d
}

const NAMES: [&str; 7] = ["asympt", "log", "alpha:<q>", "banach", "buck", "polya", "analytic"];

pub fn builtin_names() -> &'static [&'static str] {
    &NAMES
}

fn parse_alpha(s: &str) -> Result<BigRational> {
    let bad = || DensityError::Domain(format!("bad alpha {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let (n, d): (i64, i64) = (n.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?);
            if d == 0 {
                return Err(bad());
            }
            Ok(BigRational::new(n.into(), d.into()))
        }
        None => Ok(BigRational::from_integer(s.trim().parse::<i64>().map_err(|_| bad())?.into())),
    }
}

/// A built-in functional by name (`asympt`, `log`, `alpha:<q>`, `banach`,
/// `buck`, `polya`, `analytic`). Lower Buck density is the dual of upper Buck.
pub fn builtin<T: Scalar>(name: &str, mode: Mode, counter: Arc<Counter>) -> Result<Functional<T>> {
    let c = counter;
    let mut f: Functional<T> = match name {
        "asympt" => Functional::new(name, mode, Provenance::Builtin, move |e, s| asymptotic(&c, e, mode, s)),
        "log" => {
            let a = -BigRational::from_integer(1.into());
            Functional::new(name, mode, Provenance::Builtin, move |e, s| alpha_density(&c, e, &a, mode, s))
        }
        "banach" => Functional::new(name, mode, Provenance::Builtin, move |e, s| banach(&c, e, mode, s)),
        "polya" => Functional::new(name, mode, Provenance::Builtin, move |e, s| polya(&c, e, mode, s)),
        "analytic" => Functional::new(name, mode, Provenance::Builtin, move |e, s| analytic(&c, e, mode, s, None)),
        "buck" => {
            let mut up = Functional::new(name, Mode::Upper, Provenance::Builtin, move |e, s| buck_upper(&c, e, s));
            up.operand_bounds = true;
            return Ok(if mode.is_upper() { up } else { dual(&up) });
        }
        _ => match name.strip_prefix("alpha:") {
            Some(q) => {
                let a = parse_alpha(q)?;
                Functional::new(name, mode, Provenance::Builtin, move |e, s| alpha_density(&c, e, &a, mode, s))
            }
            None => return Err(DensityError::Domain(format!("unknown functional {name:?}"))),
        },
    };
    f.operand_bounds = true;
    Ok(f)
}
