use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::densities::{Certification, DensityError, DensityValue, Functional, Mode, Provenance, Result};
use crate::scalar::Scalar;

fn same_mode<T: Scalar>(fs: &[Functional<T>]) -> Result<Mode> {
    let mode = fs.first().ok_or_else(|| DensityError::Domain("no functionals to combine".into()))?.mode();
    if fs.iter().any(|f| f.mode() != mode) {
        return Err(DensityError::MixedModes);
    }
    Ok(mode)
}

fn names<T: Scalar>(fs: &[Functional<T>]) -> String {
    fs.iter().map(Functional::name).collect::<Vec<_>>().join(",")
}

fn merged_certification<T>(vs: &[DensityValue<T>]) -> Certification {
    if vs.iter().all(|v| v.certification == Certification::Structural) {
        Certification::Structural
    } else {
        Certification::Numeric
    }
}

/// `S ↦ (Σ wᵢ fᵢ(S)^q)^{1/q}`, endpoint-wise on brackets.
pub fn q_convex_combine<T: Scalar>(q: &BigRational, weights: &[BigRational], fs: &[Functional<T>]) -> Result<Functional<T>> {
    if q < &BigRational::one() {
        return Err(DensityError::Domain(format!("q = {q} is below 1")));
    }
    let listed = weights.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
    let sum: BigRational = weights.iter().sum();
    if weights.len() != fs.len() || fs.is_empty() || weights.iter().any(Signed::is_negative) || !sum.is_one() {
        return Err(DensityError::WeightSumMismatch(format!("[{listed}] for {} functionals", fs.len())));
    }
    let mode = same_mode(fs)?;
    let name = format!("qmix:{q}:{listed}:{}", names(fs));
    let (q, weights, fs) = (q.clone(), weights.to_vec(), fs.to_vec());
    let qf = T::of(q.to_f64().unwrap());
    let wf: Vec<T> = weights.iter().map(|w| T::of(w.to_f64().unwrap())).collect();
    Ok(Functional::new(name, mode, Provenance::Combinator("qmix".into()), move |e, sch| {
        let vs = fs.iter().map(|f| f.eval(e, sch)).collect::<Result<Vec<_>>>()?;
        let exacts: Option<Vec<&BigRational>> = vs.iter().map(|v| v.exact.as_ref()).collect();
        if let Some(x) = exacts {
            if q.is_one() {
                return Ok(DensityValue::exact(x.iter().zip(&weights).map(|(v, w)| *v * w).sum()));
            }
            if x.windows(2).all(|p| p[0] == p[1]) {
                return Ok(DensityValue::exact(x[0].clone()));
            }
        }
        let mix = |pick: fn(&DensityValue<T>) -> T| {
            let s = vs.iter().zip(&wf).fold(T::zero(), |acc, (v, &w)| acc + w * pick(v).max(T::zero()).powf(qf));
            s.powf(T::one() / qf)
        };
        let mut v = DensityValue::bracket(mix(|v| v.lo), mix(|v| v.hi), Vec::new());
        v.certification = merged_certification(&vs);
        Ok(v)
    }))
}

fn extremal<T: Scalar>(fs: &[Functional<T>], want: Mode, tag: &str, upper: bool) -> Result<Functional<T>> {
    if same_mode(fs)? != want {
        return Err(DensityError::MixedModes);
    }
    let name = format!("{tag}:{}", names(fs));
    let fs = fs.to_vec();
    Ok(Functional::new(name, want, Provenance::Combinator(tag.into()), move |e, sch| {
        let vs = fs.iter().map(|f| f.eval(e, sch)).collect::<Result<Vec<_>>>()?;
        let pick = |a: T, b: T| if upper { a.max(b) } else { a.min(b) };
        let init = if upper { T::neg_infinity() } else { T::infinity() };
        let exacts: Option<Vec<&BigRational>> = vs.iter().map(|v| v.exact.as_ref()).collect();
        if let Some(x) = exacts {
            let best = if upper { x.into_iter().max() } else { x.into_iter().min() };
            return Ok(DensityValue::exact(best.unwrap().clone()));
        }
        let lo = vs.iter().fold(init, |acc, v| pick(acc, v.lo));
        let hi = vs.iter().fold(init, |acc, v| pick(acc, v.hi));
        let mut v = DensityValue::bracket(lo, hi, Vec::new());
        v.certification = merged_certification(&vs);
        Ok(v)
    }))
}

/// Pointwise supremum of upper functionals.
pub fn sup_combine<T: Scalar>(fs: &[Functional<T>]) -> Result<Functional<T>> {
    extremal(fs, Mode::Upper, "sup", true)
}

/// Pointwise infimum of lower functionals.
pub fn inf_combine_dual<T: Scalar>(fs: &[Functional<T>]) -> Result<Functional<T>> {
    extremal(fs, Mode::Lower, "inf", false)
}
