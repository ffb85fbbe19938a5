use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::numeric::prepare;
use super::{DensityError, DensityValue, Result, Schedule};
use crate::scalar::Scalar;
use crate::setkit::{count_cells, residue_profile, Counter, NamedSet, ResidueCell, SetExpr, Tri};

/// Which modulus sequence approximates Buck density.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChainKind {
    /// Squared moduli when the set mentions squares, plain otherwise.
    Auto,
    /// `lcm(1, …, m)`.
    Lcm,
    /// `lcm(1, …, m)²`.
    Squared,
}

/// One modulus of the chain: `r` classes meet the set, `w_compl` classes
/// hold a positive share of the complement.
#[derive(Clone, Debug, PartialEq)]
pub struct BuckStep {
    pub k: u64,
    pub r: u64,
    pub w_compl: u64,
    /// Cells whose nonemptiness stayed open and were counted as inhabited.
    pub undecided: u64,
}

impl BuckStep {
    pub fn ratio(&self) -> BigRational {
        BigRational::new(self.r.into(), self.k.into())
    }
}

/// Distinct moduli of the chain up to `depth`, stopping before `bound`.
fn chain_moduli(depth: u32, squared: bool, bound: u64) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    let mut l = 1u64;
    for m in 1..=depth.max(1) as u64 {
        l = l.lcm(&m);
        let k = if squared { l * l } else { l };
        if k > bound {
            break;
        }
        if out.last() != Some(&k) {
            out.push(k);
        }
    }
    out
}

fn inhabited(c: &ResidueCell, strict: bool) -> Option<bool> {
    match c.nonempty {
        Tri::Yes => Some(true),
        Tri::No => Some(false),
        Tri::Unknown if strict => None,
        Tri::Unknown => Some(true),
    }
}

/// `r_k(S)` and `w_k(Sᶜ)` along the chain chosen by the schedule, with
/// moduli capped at the pattern bound.
pub fn buck_chain(counter: &Counter, e: &SetExpr, sch: &Schedule) -> Result<Vec<BuckStep>> {
    let squared = match sch.chain {
        ChainKind::Auto => e.mentions(&|x| matches!(x, SetExpr::Named(NamedSet::Squares))),
        ChainKind::Lcm => false,
        ChainKind::Squared => true,
    };
    let compl = SetExpr::compl(e.clone());
    let mut steps = Vec::new();
    for k in chain_moduli(sch.depth, squared, counter.limits().pattern_bound) {
        let cells = residue_profile(e, k, counter);
        let mut r = 0;
        let mut undecided = 0;
        for (h, c) in cells.iter().enumerate() {
            match inhabited(c, sch.strict) {
                Some(b) => r += b as u64,
                None => return Err(DensityError::UndecidableResidue { expr: e.to_string(), k, h: h as u64 }),
            }
            undecided += (c.nonempty == Tri::Unknown) as u64;
        }
        // an open positivity question counts as positive: w only shrinks the lower bound
        let w_compl = residue_profile(&compl, k, counter).iter().filter(|c| c.positive != Tri::No).count() as u64;
        steps.push(BuckStep { k, r, w_compl, undecided });
        if r + w_compl <= k {
            // r/k ≤ 1 − w/k: the bracket has closed
            break;
        }
    }
    Ok(steps)
}

/// Buck density: exact on eventually periodic and block-shaped sets,
/// otherwise `[max(1 − w_k(Sᶜ)/k), min r_k/k]` over the chain.
pub fn buck_upper<T: Scalar>(counter: &Counter, e: &SetExpr, sch: &Schedule) -> Result<DensityValue<T>> {
    let p = prepare(e, counter);
    if p.finite {
        return Ok(DensityValue::zero());
    }
    if let Some(q) = &p.rangeset_density {
        return Ok(DensityValue::exact(q.clone()));
    }
    // meager parts are not Buck-null, so only the strict shape is usable
    if let Some(q) = p.strict_shape.as_ref().and_then(|s| s.buck(counter.limits().modulus_bound)) {
        return Ok(DensityValue::exact(q));
    }
    let steps = buck_chain(counter, &p.simplified, sch)?;
    let ratios: Vec<BigRational> = steps.iter().map(BuckStep::ratio).collect();
    let hi = ratios.iter().min().cloned().unwrap_or_else(BigRational::one);
    let lo = steps
        .iter()
        .map(|s| BigRational::one() - BigRational::new(s.w_compl.into(), s.k.into()))
        .max()
        .unwrap_or_else(BigRational::zero)
        .max(BigRational::zero());
    let cps = steps.iter().map(|s| BigUint::from(s.k)).collect();
    let mut v = DensityValue::bracket(T::of(lo.to_f64().unwrap()), T::of(hi.to_f64().unwrap()), cps);
    if ratios.windows(2).any(|w| w[1] > w[0]) {
        v = v.with_note("r_k/k is not monotone along the chain");
    }
    let open: u64 = steps.iter().map(|s| s.undecided).sum();
    if open > 0 {
        v = v.with_note(format!("{open} residue cells undecided, counted as inhabited"));
    }
    Ok(v)
}

/// Which residue oracle produced a modular sandwich.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Oracle {
    /// Positive upper density of each class intersection, fully decided.
    Positivity,
    /// Nonemptiness only, with open cells counted as inhabited.
    Nonemptiness,
}

impl Oracle {
    pub fn name(self) -> &'static str {
        match self {
            Oracle::Positivity => "positivity",
            Oracle::Nonemptiness => "nonemptiness",
        }
    }
}

/// Bounds `1 − w_k(Sᶜ)/k ≤ μ_*(S)` and `μ*(S) ≤ w_k(S)/k` valid for every
/// upper density `μ*` with dual `μ_*`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModularBounds {
    pub k: u64,
    pub lo: BigRational,
    pub hi: BigRational,
    pub w_set: u64,
    pub w_compl: u64,
    pub r_set: u64,
    pub oracle: Oracle,
}

pub fn modular_bounds(counter: &Counter, e: &SetExpr, k: u64, strict: bool) -> Result<ModularBounds> {
    if k == 0 {
        return Err(DensityError::Domain("modulus must be positive".into()));
    }
    let p = prepare(e, counter);
    // positivity is unaffected by meager parts
    let set = residue_profile(&p.reduced, k, counter);
    let compl = residue_profile(&SetExpr::compl(p.reduced.clone()), k, counter);
    let (w_set, d1) = count_cells(&set, |c| c.positive);
    let (w_compl, d2) = count_cells(&compl, |c| c.positive);
    let full = residue_profile(&p.simplified, k, counter);
    let r_set = full.iter().filter(|c| c.nonempty != Tri::No).count() as u64;
    let frac = |n: u64| BigRational::new(n.into(), k.into());
    if d1 && d2 {
        return Ok(ModularBounds { k, lo: BigRational::one() - frac(w_compl), hi: frac(w_set), w_set, w_compl, r_set, oracle: Oracle::Positivity });
    }
    if strict {
        let h = set.iter().chain(&compl).position(|c| !c.positive.is_known()).unwrap_or(0) as u64 % k;
        return Err(DensityError::UndecidableResidue { expr: e.to_string(), k, h });
    }
    let compl_full = residue_profile(&SetExpr::compl(p.simplified.clone()), k, counter);
    let r_compl = compl_full.iter().filter(|c| c.nonempty != Tri::No).count() as u64;
    let w_set = set.iter().filter(|c| c.positive != Tri::No).count() as u64;
    let w_compl = compl.iter().filter(|c| c.positive != Tri::No).count() as u64;
    let hi = frac(r_set.min(w_set));
    let lo = BigRational::one() - frac(r_compl.min(w_compl));
    Ok(ModularBounds { k, lo, hi, w_set, w_compl, r_set, oracle: Oracle::Nonemptiness })
}
