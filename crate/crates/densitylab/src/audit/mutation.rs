use std::sync::Arc;

use super::{audit_functional, Axiom, Status, TestFamily};
use crate::densities::{builtin, dual, DensityValue, Functional, Mode, Provenance, Schedule};
use crate::setkit::{Counter, FactorialVariant, SetExpr};

const TOL: f64 = 0.02;

#[derive(Clone, Debug, PartialEq)]
pub struct MutantOutcome {
    pub name: String,
    /// Property the mutant must break, or `None` for the control.
    pub target: Option<Axiom>,
    pub caught: bool,
    pub witness: Option<String>,
}

/// `f + shift` on the single set `at`.
fn shifted(f: Functional, at: SetExpr, shift: f64) -> Functional {
    let key = at.key();
    Functional::new(format!("{}+{shift}@{at}", f.name()), f.mode(), Provenance::Combinator("mutant".into()), move |e, sch| {
        let v = f.eval(e, sch)?;
        Ok(if e.key() == key { DensityValue::bracket(v.lo + shift, v.hi + shift, v.checkpoints.clone()) } else { v })
    })
}

/// Pointwise minimum of lower densities, mislabelled as upper.
fn min_of_lowers(fs: Vec<Functional>) -> Functional {
    let name = format!("min:{}", fs.iter().map(Functional::name).collect::<Vec<_>>().join(","));
    Functional::new(name, Mode::Upper, Provenance::Combinator("mutant".into()), move |e, sch| {
        let vs = fs.iter().map(|f| f.eval(e, sch)).collect::<Result<Vec<_>, _>>()?;
        let lo = vs.iter().map(|v| v.lo).fold(f64::INFINITY, f64::min);
        let hi = vs.iter().map(|v| v.hi).fold(f64::INFINITY, f64::min);
        Ok(DensityValue::bracket(lo, hi, Vec::new()))
    })
}

fn outcome(f: &Functional, fam: &TestFamily, target: Axiom, expect: &str, sch: &Schedule) -> MutantOutcome {
    let r = audit_functional(f, fam, &[target], TOL, sch);
    let a = &r.axioms[0];
    let caught = a.status == Status::Fail && a.witness.as_deref().is_some_and(|w| w.contains(expect));
    MutantOutcome { name: f.name().to_string(), target: Some(target), caught, witness: a.witness.clone() }
}

/// Audits planted mutants and an unmutated control.
pub fn mutation_report() -> Vec<MutantOutcome> {
    let c = Arc::new(Counter::default());
    let sch = Schedule::default();
    let asympt: Functional = builtin("asympt", Mode::Upper, c.clone()).unwrap();
    let evens = SetExpr::ap(2, 0).unwrap();
    let small = TestFamily::custom(vec![evens.clone(), SetExpr::finite(vec![3]), SetExpr::ap(3, 1).unwrap()]);

    let mut out = Vec::new();
    let bumped = shifted(asympt.clone(), evens.clone(), 0.05);
    out.push(outcome(&bumped, &small, Axiom::F2Flat, &evens.to_string(), &sch));
    out.push(outcome(&bumped, &small, Axiom::F2, &evens.to_string(), &sch));

    let fb = SetExpr::fblocks(FactorialVariant::Standard);
    let pair = TestFamily::custom(vec![fb.clone(), SetExpr::compl(fb.clone())]);
    let banach: Functional = builtin("banach", Mode::Upper, c).unwrap();
    let min = min_of_lowers(vec![dual(&asympt), dual(&banach)]);
    out.push(outcome(&min, &pair, Axiom::F3, &fb.to_string(), &sch));

    let control = audit_functional(&asympt, &small, &[Axiom::F1, Axiom::F2, Axiom::F2Flat, Axiom::F3, Axiom::F5], TOL, &sch);
    out.push(MutantOutcome {
        name: asympt.name().to_string(),
        target: None,
        caught: control.failed().is_empty() && control.axioms.iter().all(|a| a.status == Status::Pass),
        witness: None,
    });
    out
}

/// Whether every mutant is caught with its planted witness and the control
/// shows no violation.
pub fn mutation_self_test() -> bool {
    mutation_report().iter().all(|m| m.caught)
}
