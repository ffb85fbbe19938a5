use std::collections::HashMap;

use super::{eq_const, eq_scaled, eval_all, le, pairs, Axiom, AxiomReport, Tally, TestFamily};
use crate::densities::{DensityValue, Functional, Result, Schedule};
use crate::setkit::SetExpr;

pub(crate) const F4_FACTORS: [u64; 3] = [2, 3, 4];
pub(crate) const F4_FLAT_MAX: u64 = 4;
pub(crate) const F5_SHIFT_MAX: u64 = 7;

fn affine(k: u64, h: u64, e: &SetExpr) -> SetExpr {
    SetExpr::affine(k, h, e.clone()).expect("k ≥ 1")
}

/// Finite sets used to perturb for the lower-density null checks.
pub(crate) fn perturbations() -> [SetExpr; 2] {
    [SetExpr::finite(vec![1]), SetExpr::finite(vec![2, 5, 6])]
}

/// Values of one functional on a fixed collection of sets, evaluated once.
pub(crate) struct Table {
    values: HashMap<String, Result<DensityValue>>,
}

impl Table {
    pub(crate) fn build(f: &Functional, sets: Vec<SetExpr>, sch: &Schedule) -> Self {
        let mut seen = HashMap::new();
        let unique: Vec<SetExpr> = sets.into_iter().filter(|e| seen.insert(e.key(), ()).is_none()).collect();
        let vals = eval_all(f, &unique, sch);
        Table { values: unique.iter().map(SetExpr::key).zip(vals).collect() }
    }

    pub(crate) fn get(&self, e: &SetExpr) -> &Result<DensityValue> {
        &self.values[&e.key()]
    }
}

fn requests(axiom: Axiom, sets: &[SetExpr]) -> Vec<SetExpr> {
    let mut out = sets.to_vec();
    let pair_sets = |op: fn(SetExpr, SetExpr) -> SetExpr| pairs(sets.len()).into_iter().map(move |(i, j)| op(sets[i].clone(), sets[j].clone()));
    match axiom {
        Axiom::F1 | Axiom::L4 => out = vec![SetExpr::Full],
        Axiom::Bounded => {}
        Axiom::F2 => {
            out.push(SetExpr::Full);
            out.extend(pair_sets(SetExpr::union));
            out.extend(pair_sets(SetExpr::inter));
        }
        Axiom::F2Flat | Axiom::F3 => out.extend(pair_sets(SetExpr::union)),
        Axiom::F4 => out.extend(sets.iter().flat_map(|e| F4_FACTORS.map(|k| affine(k, 0, e)))),
        Axiom::F4Flat => out.extend(sets.iter().flat_map(|e| (1..=F4_FLAT_MAX).flat_map(move |k| (1..=F4_FLAT_MAX).map(move |h| affine(k, h, e))))),
        Axiom::F5 => out.extend(sets.iter().flat_map(|e| (1..=F5_SHIFT_MAX).map(move |h| affine(1, h, e)))),
        Axiom::L1 => {
            out.extend(pair_sets(SetExpr::diff));
            out.extend(pair_sets(SetExpr::inter));
            out.extend(pairs(sets.len()).into_iter().map(|(i, j)| SetExpr::diff(sets[j].clone(), sets[i].clone())));
        }
        Axiom::L2 => out.extend(pair_sets(SetExpr::inter)),
        Axiom::L3 => {
            out.extend(sets.iter().flat_map(|e| perturbations().map(|p| SetExpr::symdiff(e.clone(), p))));
        }
    }
    out
}

/// Runs the checks of one property against a filled table.
pub(crate) fn check(axiom: Axiom, sets: &[SetExpr], t: &Table, tol: f64) -> Tally {
    let mut tally = Tally::new(axiom.name(), tol);
    let ps = pairs(sets.len());
    match axiom {
        Axiom::F1 => tally.check([t.get(&SetExpr::Full)], |[v]| eq_const(v, 1.0), || "full".into()),
        Axiom::L4 => tally.check([t.get(&SetExpr::Full)], |[v]| eq_const(v, 1.0), || "full".into()),
        Axiom::Bounded => {
            for x in sets {
                tally.check([t.get(x)], |[v]| v.hi.min(1.0 - v.lo), || x.to_string());
            }
        }
        Axiom::F2 | Axiom::F2Flat => {
            let full = SetExpr::Full;
            for &(i, j) in &ps {
                let (x, y) = (&sets[i], &sets[j]);
                let u = SetExpr::union(x.clone(), y.clone());
                for s in [x, y] {
                    tally.check([t.get(s), t.get(&u)], |[a, b]| le(a, b), || format!("{s} ⊆ {u}"));
                }
                if axiom == Axiom::F2 {
                    let n = SetExpr::inter(x.clone(), y.clone());
                    for s in [x, y] {
                        tally.check([t.get(&n), t.get(s)], |[a, b]| le(a, b), || format!("{n} ⊆ {s}"));
                    }
                }
            }
            if axiom == Axiom::F2 {
                for x in sets {
                    tally.check([t.get(x), t.get(&full)], |[a, b]| le(a, b), || format!("{x} ⊆ full"));
                }
            }
        }
        Axiom::F3 => {
            for &(i, j) in &ps {
                let (x, y) = (&sets[i], &sets[j]);
                let u = SetExpr::union(x.clone(), y.clone());
                tally.check([t.get(x), t.get(y), t.get(&u)], |[a, b, c]| a.hi + b.hi - c.lo, || format!("X = {x}, Y = {y}"));
            }
        }
        Axiom::F4 => {
            for x in sets {
                for k in F4_FACTORS {
                    let kx = affine(k, 0, x);
                    tally.check([t.get(&kx), t.get(x)], |[a, b]| eq_scaled(a, b, 1.0 / k as f64), || format!("k = {k}, X = {x}"));
                }
            }
        }
        Axiom::F4Flat => {
            for x in sets {
                for k in 1..=F4_FLAT_MAX {
                    for h in 1..=F4_FLAT_MAX {
                        let y = affine(k, h, x);
                        tally.check([t.get(&y), t.get(x)], |[a, b]| eq_scaled(a, b, 1.0 / k as f64), || format!("k = {k}, h = {h}, X = {x}"));
                    }
                }
            }
        }
        Axiom::F5 => {
            for x in sets {
                for h in 1..=F5_SHIFT_MAX {
                    let y = affine(1, h, x);
                    tally.check([t.get(&y), t.get(x)], |[a, b]| eq_scaled(a, b, 1.0), || format!("{x}+{h}"));
                }
            }
        }
        Axiom::L1 => {
            for &(i, j) in &ps {
                let n = SetExpr::inter(sets[i].clone(), sets[j].clone());
                for (x, y) in [(&sets[i], &sets[j]), (&sets[j], &sets[i])] {
                    let d = SetExpr::diff(x.clone(), y.clone());
                    tally.check([t.get(&d), t.get(&n), t.get(x)], |[a, b, c]| c.hi - a.lo - b.lo, || format!("X = {x}, Y = {y}"));
                }
            }
        }
        Axiom::L2 => {
            for &(i, j) in &ps {
                let (x, y) = (&sets[i], &sets[j]);
                let n = SetExpr::inter(x.clone(), y.clone());
                tally.check([t.get(x), t.get(y), t.get(&n)], |[a, b, c]| 1.0 + c.hi - a.lo - b.lo, || format!("X = {x}, Y = {y}"));
            }
        }
        Axiom::L3 => {
            for x in sets {
                for p in perturbations() {
                    let y = SetExpr::symdiff(x.clone(), p.clone());
                    tally.check([t.get(&y), t.get(x)], |[a, b]| eq_scaled(a, b, 1.0), || format!("{x} △ {p}"));
                }
            }
        }
    }
    tally
}

/// Checks each requested property of `f` over `fam`, in the order given.
pub fn audit_functional(f: &Functional, fam: &TestFamily, axioms: &[Axiom], tol: f64, sch: &Schedule) -> AxiomReport {
    let sets = &fam.sets;
    let all: Vec<SetExpr> = axioms.iter().flat_map(|&a| requests(a, sets)).collect();
    let table = Table::build(f, all, sch);
    let results = axioms.iter().map(|&a| check(a, sets, &table, tol).finish()).collect();
    AxiomReport { functional: f.name().to_string(), family: fam.name().to_string(), seed: fam.seed, tolerance: tol, axioms: results }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit::{FamilyKind, Status};
    use crate::densities::{builtin, Mode};
    use crate::setkit::Counter;
    use std::sync::Arc;

    #[test]
    fn asymptotic_passes_on_periodic_family() {
        let f: Functional = builtin("asympt", Mode::Upper, Arc::new(Counter::default())).unwrap();
        let fam = TestFamily::new(FamilyKind::PeriodicOnly, 3);
        let r = audit_functional(&f, &fam, &[Axiom::F1, Axiom::F2, Axiom::F3, Axiom::F4, Axiom::F4Flat, Axiom::F5], 0.02, &Schedule::default());
        assert!(r.all_pass(), "{r:?}");
        assert!(r.axioms.iter().all(|a| a.status == Status::Pass && a.skipped == 0));
    }

    #[test]
    fn lower_dual_passes_lower_axioms() {
        let f: Functional = crate::densities::dual(&builtin("asympt", Mode::Upper, Arc::new(Counter::default())).unwrap());
        let fam = TestFamily::new(FamilyKind::PeriodicOnly, 5);
        let r = audit_functional(&f, &fam, &Axiom::LOWER, 0.02, &Schedule::default());
        assert!(r.all_pass(), "{r:?}");
    }
}
