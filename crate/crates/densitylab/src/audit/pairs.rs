use super::axioms::{check, perturbations, Table};
use super::{eq_const, eq_scaled, le, pairs, Axiom, AxiomReport, AxiomResult, Status, Tally, TestFamily};
use crate::densities::{dual, Functional, Schedule};
use crate::setkit::SetExpr;

const SHIFT_MAX: u64 = 4;

fn shift(e: &SetExpr, h: u64) -> SetExpr {
    SetExpr::affine(1, h, e.clone()).expect("unit factor")
}

/// Checks the elementary properties of the pair `(μ_*, μ*)` with
/// `μ_* = dual(f)`. Monotonicity of the dual is only required when `f`
/// itself passes F2 on the family.
pub fn audit_conjugate_pair(f: &Functional, fam: &TestFamily, tol: f64, sch: &Schedule) -> AxiomReport {
    let sets = &fam.sets;
    let ps = pairs(sets.len());
    let lower = dual(f);
    let unions: Vec<SetExpr> = ps.iter().map(|&(i, j)| SetExpr::union(sets[i].clone(), sets[j].clone())).collect();
    let inters: Vec<SetExpr> = ps.iter().map(|&(i, j)| SetExpr::inter(sets[i].clone(), sets[j].clone())).collect();
    let perturbed: Vec<SetExpr> = sets.iter().flat_map(|e| perturbations().map(|p| SetExpr::symdiff(e.clone(), p))).collect();

    let mut up_sets = vec![SetExpr::Full];
    up_sets.extend(sets.iter().cloned());
    up_sets.extend(unions.iter().cloned());
    up_sets.extend(inters.iter().cloned());
    up_sets.extend(perturbed.iter().cloned());
    let up = Table::build(f, up_sets, sch);

    let mut low_sets = vec![SetExpr::Empty, SetExpr::Full];
    low_sets.extend(sets.iter().cloned());
    low_sets.extend(unions.iter().cloned());
    low_sets.extend(inters.iter().cloned());
    low_sets.extend(perturbed);
    low_sets.extend(sets.iter().flat_map(|e| (1..=SHIFT_MAX).map(move |h| shift(e, h))));
    let low = Table::build(&lower, low_sets, sch);

    let mut out = Vec::new();

    let mut t = Tally::new("lower-empty", tol);
    t.check([low.get(&SetExpr::Empty)], |[v]| eq_const(v, 0.0), || "empty".into());
    out.push(t.finish());

    let mut t = Tally::new("lower-full", tol);
    t.check([low.get(&SetExpr::Full)], |[v]| eq_const(v, 1.0), || "full".into());
    out.push(t.finish());

    let monotone = check(Axiom::F2, sets, &up, tol).finish();
    if monotone.status == Status::Fail {
        out.push(AxiomResult {
            name: "monotone-dual".into(),
            status: Status::Skipped,
            margin: None,
            witness: None,
            checked: 0,
            skipped: 0,
            reason: Some(format!("{} is not monotone: {}", f.name(), monotone.witness.unwrap_or_default())),
        });
    } else {
        let mut t = Tally::new("monotone-dual", tol);
        for (p, &(i, j)) in ps.iter().enumerate() {
            for s in [&sets[i], &sets[j]] {
                t.check([low.get(s), low.get(&unions[p])], |[a, b]| le(a, b), || format!("{s} ⊆ {}", unions[p]));
                t.check([low.get(&inters[p]), low.get(s)], |[a, b]| le(a, b), || format!("{} ⊆ {s}", inters[p]));
            }
        }
        out.push(t.finish());
    }

    let mut t = Tally::new("lower-le-upper", tol);
    for x in sets.iter().chain(&unions) {
        t.check([low.get(x), up.get(x)], |[a, b]| le(a, b), || x.to_string());
    }
    out.push(t.finish());

    let mut l2 = check(Axiom::L2, sets, &low, tol).finish();
    l2.name = "lower-l2".into();
    out.push(l2);

    let mut t = Tally::new("null-invariance", tol);
    for x in sets {
        for p in perturbations() {
            let y = SetExpr::symdiff(x.clone(), p.clone());
            t.check([up.get(&y), up.get(x)], |[a, b]| eq_scaled(a, b, 1.0), || format!("upper: {x} △ {p}"));
            t.check([low.get(&y), low.get(x)], |[a, b]| eq_scaled(a, b, 1.0), || format!("lower: {x} △ {p}"));
        }
    }
    out.push(t.finish());

    let mut t = Tally::new("dual-translation", tol);
    for x in sets {
        for h in 1..=SHIFT_MAX {
            let y = shift(x, h);
            t.check([low.get(&y), low.get(x)], |[a, b]| eq_scaled(a, b, 1.0), || format!("{x}+{h}"));
        }
    }
    out.push(t.finish());

    AxiomReport { functional: f.name().to_string(), family: fam.name().to_string(), seed: fam.seed, tolerance: tol, axioms: out }
}
