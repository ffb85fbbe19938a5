use std::sync::Arc;

use num_rational::BigRational;

use densitylab::audit::Fixture;
use densitylab::combinators::{q_convex_combine, sup_combine, theta_star, KParam};
use densitylab::densities::{builtin, dual, DensityError, Functional, Mode};
use densitylab::setkit::Counter;

fn rational(s: &str) -> Result<BigRational, DensityError> {
    let bad = || DensityError::Domain(format!("bad rational {s:?}"));
    let int = |t: &str| t.trim().parse::<i64>().map_err(|_| bad());
    match s.split_once('/') {
        Some((n, d)) => {
            let d = int(d)?;
            if d == 0 {
                return Err(bad());
            }
            Ok(BigRational::new(int(n)?.into(), d.into()))
        }
        None => Ok(BigRational::from_integer(int(s)?.into())),
    }
}

fn components(list: &str, mode: Mode, counter: &Arc<Counter>) -> Result<Vec<Functional>, DensityError> {
    list.split(',').map(|m| parse_measure(m.trim(), mode, counter.clone())).collect()
}

/// Resolves a measure name. `mode` applies to built-in bases; `dual:` flips
/// it, and fixtures carry their own mode.
///
/// Names: `asympt`, `log`, `alpha:<q>`, `banach`, `buck`, `polya`,
/// `analytic`, `theta:<K>`, `dual:<name>`, `qmix:<q>:<w,..>:<m,..>`,
/// `sup:<m,..>`, and the fixtures `mfix`, `cofinite`, `dual:cofinite`, `one`.
/// Components of `qmix` and `sup` may not themselves be combinators.
pub fn parse_measure(name: &str, mode: Mode, counter: Arc<Counter>) -> Result<Functional, DensityError> {
    if let Some(f) = Fixture::parse(name) {
        return Ok(f.build(counter));
    }
    if let Some(inner) = name.strip_prefix("dual:") {
        return Ok(dual(&parse_measure(inner, mode, counter)?));
    }
    if let Some(k) = name.strip_prefix("theta:") {
        let t = theta_star(k.parse::<KParam>()?, counter)?;
        return Ok(if mode.is_upper() { t } else { dual(&t) });
    }
    if let Some(rest) = name.strip_prefix("qmix:") {
        let mut parts = rest.splitn(3, ':');
        let (Some(q), Some(w), Some(ms)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(DensityError::Domain(format!("qmix needs q, weights and measures: {name:?}")));
        };
        let weights = w.split(',').map(rational).collect::<Result<Vec<_>, _>>()?;
        return q_convex_combine(&rational(q)?, &weights, &components(ms, mode, &counter)?);
    }
    if let Some(ms) = name.strip_prefix("sup:") {
        return sup_combine(&components(ms, mode, &counter)?);
    }
    builtin(name, mode, counter)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(name: &str, mode: Mode) -> Result<Functional, DensityError> {
        parse_measure(name, mode, Arc::default())
    }

    #[test]
    fn names_and_modes() {
        assert_eq!(m("asympt", Mode::Upper).unwrap().mode(), Mode::Upper);
        assert_eq!(m("dual:asympt", Mode::Upper).unwrap().mode(), Mode::Lower);
        assert_eq!(m("dual:cofinite", Mode::Lower).unwrap().mode(), Mode::Upper);
        assert_eq!(m("theta:inf", Mode::Upper).unwrap().name(), "theta:inf");
        assert_eq!(m("alpha:1/2", Mode::Lower).unwrap().mode(), Mode::Lower);
        assert_eq!(m("mfix", Mode::Lower).unwrap().mode(), Mode::Upper);
    }

    #[test]
    fn combinators() {
        let q = m("qmix:2:1/3,2/3:asympt,alpha:1/2", Mode::Upper).unwrap();
        assert!(q.name().starts_with("qmix:2:"));
        assert!(m("sup:asympt,banach,buck", Mode::Upper).is_ok());
        assert!(matches!(m("qmix:2:1/2,1/3:asympt,log", Mode::Upper), Err(DensityError::WeightSumMismatch(_))));
        assert!(matches!(m("sup:asympt,banach", Mode::Lower), Err(DensityError::MixedModes)));
    }

    #[test]
    fn rejects_unknown() {
        assert!(m("nope", Mode::Upper).is_err());
        assert!(m("theta:1/2", Mode::Upper).is_err());
        assert!(m("qmix:2:1", Mode::Upper).is_err());
    }
}
