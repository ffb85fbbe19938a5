use std::sync::Arc;

use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::axioms::Table;
use super::{eq_const, le, AxiomReport, Tally, TestFamily};
use crate::densities::{builtin, dual, Functional, Mode, Schedule};
use crate::setkit::{normalize_periodic, Counter, Normalized, SetExpr};

const TRANSLATE_MODULI: [u64; 7] = [2, 3, 4, 5, 6, 8, 12];
const CHAINS: [&[u32]; 4] = [&[1, 3], &[2, 3, 5], &[1, 2, 4, 7], &[3, 5, 6]];

/// Unions of `n` translates of `k·ℕ`, bare and with finite patches, paired
/// with `n/k`.
fn translate_unions(seed: u64) -> Vec<(SetExpr, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut out = Vec::new();
    for k in TRANSLATE_MODULI {
        let n = rng.gen_range(1..=k);
        let mut hs: Vec<u64> = (0..k).collect();
        hs.shuffle(&mut rng);
        let v = hs[..n as usize].iter().map(|&h| SetExpr::ap(k, h).unwrap()).reduce(SetExpr::union).unwrap();
        let d = n as f64 / k as f64;
        let patch = SetExpr::finite((0..3).map(|_| rng.gen_range(1..50)));
        out.push((v.clone(), d));
        out.push((SetExpr::union(v.clone(), patch.clone()), d));
        out.push((SetExpr::diff(v, patch), d));
    }
    out
}

fn chain_sets() -> Vec<(SetExpr, f64)> {
    CHAINS.iter().map(|b| (SetExpr::rangeset(b.to_vec()).unwrap(), b.iter().map(|&a| 0.5f64.powi(a as i32)).sum())).collect()
}

/// Members of the family (plus a few classes) that normalize to an
/// eventually periodic set, with their density.
fn periodic_sets(fam: &TestFamily, counter: &Counter) -> Vec<(SetExpr, f64)> {
    let mut sets = vec![SetExpr::Full, SetExpr::ap(2, 1).unwrap(), SetExpr::ap(6, 5).unwrap()];
    sets.extend(fam.sets.iter().cloned());
    sets.into_iter()
        .filter_map(|e| match normalize_periodic(&e, counter.limits()) {
            Ok(Normalized::Periodic(p)) => Some((e, p.density().to_f64().unwrap())),
            _ => None,
        })
        .collect()
}

/// Checks theorems that constrain every upper density at once: exact values
/// on translate unions, on disjoint-class chains and on periodic sets,
/// monotonicity below periodic sets, and domination by upper Buck density.
pub fn audit_structural_theorems(fs: &[Functional], fam: &TestFamily, tol: f64, sch: &Schedule) -> AxiomReport {
    let counter = Arc::new(Counter::default());
    let buck = fs.iter().find(|f| f.name() == "buck" && f.mode() == Mode::Upper).cloned();
    let buck = buck.unwrap_or_else(|| builtin("buck", Mode::Upper, counter.clone()).expect("built-in"));

    let translates = translate_unions(fam.seed);
    let chains = chain_sets();
    let periodic = periodic_sets(fam, &counter);
    let mut relaxed: Vec<(SetExpr, SetExpr)> = Vec::new();
    for x in &fam.sets {
        for (y, _) in &periodic {
            relaxed.push((SetExpr::inter(x.clone(), y.clone()), y.clone()));
        }
        relaxed.push((x.clone(), SetExpr::Full));
    }
    for a in [(1, 4), (1, 3), (1, 2)] {
        relaxed.push((SetExpr::valpha_ratio(a.0, a.1).unwrap(), SetExpr::Full));
    }

    let mut needed: Vec<SetExpr> = Vec::new();
    needed.extend(translates.iter().map(|p| p.0.clone()));
    needed.extend(chains.iter().map(|p| p.0.clone()));
    needed.extend(periodic.iter().map(|p| p.0.clone()));
    needed.extend(relaxed.iter().flat_map(|(x, y)| [x.clone(), y.clone()]));
    needed.extend(fam.sets.iter().cloned());

    let lowers: Vec<Functional> = fs.iter().map(dual).collect();
    let tables: Vec<Table> = fs.iter().map(|f| Table::build(f, needed.clone(), sch)).collect();
    let low_tables: Vec<Table> =
        lowers.iter().map(|f| Table::build(f, [&translates[..], &periodic[..]].concat().into_iter().map(|p| p.0).collect(), sch)).collect();
    let buck_table = Table::build(&buck, fam.sets.clone(), sch);

    let mut out = Vec::new();

    let mut t = Tally::new("translate-unions", tol);
    for (f, (up, low)) in fs.iter().zip(tables.iter().zip(&low_tables)) {
        for (e, d) in &translates {
            t.check([up.get(e)], |[v]| eq_const(v, *d), || format!("{}({e}) ≠ {d}", f.name()));
            t.check([low.get(e)], |[v]| eq_const(v, *d), || format!("dual:{}({e}) ≠ {d}", f.name()));
        }
    }
    out.push(t.finish());

    let mut t = Tally::new("chain-sets", tol);
    for (f, up) in fs.iter().zip(&tables) {
        for (e, d) in &chains {
            t.check([up.get(e)], |[v]| eq_const(v, *d), || format!("{}({e}) ≠ {d}", f.name()));
        }
    }
    out.push(t.finish());

    let mut t = Tally::new("relaxed-f2", tol);
    for (f, up) in fs.iter().zip(&tables) {
        for (x, y) in &relaxed {
            t.check([up.get(x), up.get(y)], |[a, b]| le(a, b), || format!("{}: {x} ⊆ {y}", f.name()));
        }
    }
    out.push(t.finish());

    let mut t = Tally::new("buck-maximality", tol);
    for (f, up) in fs.iter().zip(&tables) {
        for x in &fam.sets {
            t.check([up.get(x), buck_table.get(x)], |[a, b]| le(a, b), || format!("{}({x}) > buck({x})", f.name()));
        }
    }
    out.push(t.finish());

    let mut t = Tally::new("periodic-squeeze", tol);
    for (f, (up, low)) in fs.iter().zip(tables.iter().zip(&low_tables)) {
        for (e, d) in &periodic {
            t.check([up.get(e)], |[v]| eq_const(v, *d), || format!("{}({e}) ≠ {d}", f.name()));
            t.check([low.get(e)], |[v]| eq_const(v, *d), || format!("dual:{}({e}) ≠ {d}", f.name()));
        }
    }
    out.push(t.finish());

    let functional = fs.iter().map(Functional::name).collect::<Vec<_>>().join(",");
    AxiomReport { functional, family: fam.name().to_string(), seed: fam.seed, tolerance: tol, axioms: out }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit::FamilyKind;

    #[test]
    fn chain_densities() {
        let c = chain_sets();
        assert_eq!(c[0].1, 0.625);
        assert_eq!(c[1].1, 0.25 + 0.125 + 0.03125);
    }

    #[test]
    fn translate_union_count_matches() {
        let c = Counter::default();
        for (e, d) in translate_unions(9) {
            let n = c.count_prefix(&e, &10_080u32.into()).unwrap().to_f64().unwrap();
            assert!((n / 10_080.0 - d).abs() < 0.01, "{e}");
        }
    }

    #[test]
    fn asymptotic_and_banach_pass() {
        let c = Arc::new(Counter::default());
        let fs: Vec<Functional> = ["asympt", "banach"].iter().map(|n| builtin(n, Mode::Upper, c.clone()).unwrap()).collect();
        let r = audit_structural_theorems(&fs, &TestFamily::new(FamilyKind::PeriodicOnly, 2), 0.02, &Schedule::default());
        assert!(r.all_pass(), "{r:?}");
    }
}
