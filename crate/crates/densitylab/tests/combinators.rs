use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;

use densitylab::audit::{FamilyKind, TestFamily};
use densitylab::combinators::{
    iota_index, q_convex_combine, range_construct, sup_combine, target_bits, theta_f2_witness, theta_star, valpha_index, Index, KParam, RangeTarget,
};
use densitylab::densities::{builtin, Functional, Mode, Schedule};
use densitylab::setkit::{Counter, SetExpr};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// `x ∈ rangeset(bits)` straight from the class list `x ≡ Σ_{j<i} 2^{a_j − 1} (mod 2^{a_i})`.
fn classes_hit(bits: &[u32], x: u64) -> usize {
    let mut r = 0u64;
    bits.iter()
        .filter(|&&a| {
            let hit = x % (1 << a) == r % (1 << a);
            r += 1 << (a - 1);
            hit
        })
        .count()
}

/// The first `depth` binary digits of `x ∈ (0, 1)` by long division.
fn digits(x: &BigRational, depth: u32) -> Vec<u32> {
    let (mut n, d) = (x.numer().clone(), x.denom().clone());
    let mut out = Vec::new();
    for i in 1..=depth {
        n *= 2;
        if n >= d {
            out.push(i);
            n -= &d;
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn range_sets_match_brute_force(bits in proptest::collection::btree_set(1u32..=14, 1..6)) {
        let bits: Vec<u32> = bits.into_iter().collect();
        let r = range_construct(&RangeTarget::Bits(bits.clone())).unwrap();
        let top = *bits.last().unwrap();
        let period = 1u64 << top;
        let hits: Vec<usize> = (1..=period).map(|x| classes_hit(&bits, x)).collect();
        prop_assert!(hits.iter().all(|&h| h <= 1));
        prop_assert!(r.disjoint);
        let count = hits.iter().sum::<usize>() as i64;
        prop_assert_eq!(&r.density, &q(count, period as i64));
        let c = Counter::default();
        prop_assert_eq!(c.count_prefix(&r.set, &BigUint::from(period)).unwrap(), BigUint::from(count as u64));
        prop_assert!(r.contains(&r.density));
    }

    #[test]
    fn rational_targets_truncate(n in 1i64..200, extra in 1i64..200, depth in 4u32..40) {
        let x = q(n, n + extra);
        let bits = target_bits(&RangeTarget::Rational(x.clone(), depth)).unwrap();
        prop_assert_eq!(&bits, &digits(&x, depth));
        if bits.is_empty() {
            return Ok(());
        }
        let r = range_construct(&RangeTarget::Rational(x.clone(), depth)).unwrap();
        let gap = &x - &r.density;
        prop_assert!(gap >= BigRational::zero());
        prop_assert!(gap < BigRational::new(BigInt::one(), BigInt::one() << depth));
    }

    #[test]
    fn q_mixes_stay_between_components(w in 1i64..99, qq in 1i64..=3, (m, r) in (2u64..30).prop_flat_map(|m| (Just(m), 0..m))) {
        let c = Arc::new(Counter::default());
        let sch = Schedule::default();
        let fs: Vec<Functional> = ["asympt", "banach"].iter().map(|n| builtin(n, Mode::Upper, c.clone()).unwrap()).collect();
        let weights = vec![q(w, 100), q(100 - w, 100)];
        let mix = q_convex_combine(&q(qq, 1), &weights, &fs).unwrap();
        for e in [SetExpr::ap(m, r).unwrap(), SetExpr::valpha(q(1, 3)).unwrap()] {
            let vals: Vec<f64> = fs.iter().map(|f| f.eval(&e, &sch).unwrap().mid()).collect();
            let want = (weights.iter().zip(&vals).map(|(w, v)| w.to_f64().unwrap() * v.powi(qq as i32)).sum::<f64>()).powf(1.0 / qq as f64);
            let got = mix.eval(&e, &sch).unwrap();
            prop_assert!((got.mid() - want).abs() < 1e-6, "{}: {} vs {}", e, got.mid(), want);
            let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().cloned().fold(0.0, f64::max);
            prop_assert!(lo - 1e-9 <= got.mid() && got.mid() <= hi + 1e-9);
        }
    }
}

#[test]
fn inverse_sqrt_two_bits() {
    let r = range_construct(&RangeTarget::InvSqrt2(40)).unwrap();
    let ten_digits = |x: &BigRational| (x * BigRational::from_integer(10_000_000_000i64.into())).floor();
    assert_eq!(ten_digits(&r.lo), BigRational::from_integer(7_071_067_811i64.into()));
    assert_eq!(ten_digits(&r.hi), BigRational::from_integer(7_071_067_811i64.into()));
    assert!(r.width() <= BigRational::new(1.into(), BigInt::one() << 39));
    assert!(r.disjoint);
    // squares of the bracket ends straddle 1/2
    assert!(&r.lo * &r.lo < q(1, 2) && &r.hi * &r.hi > q(1, 2));
}

#[test]
fn sup_picks_the_largest() {
    let c = Arc::new(Counter::default());
    let sch = Schedule::default();
    let fs: Vec<Functional> = ["asympt", "banach", "log"].iter().map(|n| builtin(n, Mode::Upper, c.clone()).unwrap()).collect();
    let s = sup_combine(&fs).unwrap();
    for e in [SetExpr::valpha(q(1, 4)).unwrap(), SetExpr::ap(3, 1).unwrap(), SetExpr::squares()] {
        let best = fs.iter().map(|f| f.eval(&e, &sch).unwrap().hi).fold(0.0, f64::max);
        assert!((s.eval(&e, &sch).unwrap().hi - best).abs() < 1e-12, "{e}");
    }
}

#[test]
fn theta_values_are_bounded_by_k() {
    let c = Arc::new(Counter::default());
    let sch = Schedule::default();
    let fam = TestFamily::new(FamilyKind::ThetaCatalog, 42);
    for (k, bound) in [("1", Some(1.0)), ("2", Some(2.0)), ("5/2", Some(2.5)), ("inf", None)] {
        let t: Functional = theta_star(k.parse::<KParam>().unwrap(), c.clone()).unwrap();
        let vals: Vec<f64> = fam.sets.iter().map(|e| t.eval(e, &sch).unwrap().hi).collect();
        let top = vals.iter().cloned().fold(0.0, f64::max);
        if let Some(b) = bound {
            assert!(top <= b + 0.02, "theta:{k} reaches {top}");
        }
        assert!(top > 1.0 - 0.02, "theta:{k} stays at {top}");
    }
}

#[test]
fn theta_is_not_monotone() {
    let c = Arc::new(Counter::default());
    let sch = Schedule::default();
    for k in ["1", "2", "inf"] {
        let kp: KParam = k.parse().unwrap();
        let t: Functional = theta_star(kp.clone(), c.clone()).unwrap();
        let (y, x) = theta_f2_witness(&kp);
        let outside = c.count_prefix(&SetExpr::diff(y.clone(), x.clone()), &BigUint::from(1_000_000u32)).unwrap();
        assert!(outside.is_zero(), "{y} ⊄ {x}");
        assert!(!c.count_prefix(&SetExpr::diff(x.clone(), y.clone()), &BigUint::from(1_000_000u32)).unwrap().is_zero());
        let (vy, vx) = (t.eval(&y, &sch).unwrap(), t.eval(&x, &sch).unwrap());
        assert!(vy.lo > vx.hi + 0.01, "theta:{k}: {} vs {}", vy.lo, vx.hi);
    }
}

#[test]
fn index_brackets_are_ordered() {
    let c = Counter::default();
    for e in TestFamily::standard(42).sets {
        let r = iota_index(&c, &e);
        assert!(r.lower <= r.upper, "{e}: {} > {}", r.lower, r.upper);
        if r.exact {
            assert_eq!(r.lower, r.upper);
        }
    }
    for (n, d, want) in [(1, 4, 4), (1, 3, 3), (1, 2, 2), (2, 3, 2), (9, 10, 2)] {
        let a = q(n, d);
        assert_eq!(valpha_index(&a), want);
        assert_eq!(iota_index(&c, &SetExpr::valpha(a).unwrap()).value(), Some(Index::N(want)));
    }
    assert_eq!(iota_index(&c, &SetExpr::Full).value(), Some(Index::N(1)));
    assert_eq!(iota_index(&c, &SetExpr::finite(vec![4])).value(), Some(Index::Infinity));
}
