//! Counting and normalization against a membership oracle written from the
//! set definitions alone.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use proptest::prelude::*;

use densitylab::setkit::{normalize_periodic, BlockFamily, Counter, FactorialVariant, Limits, NamedSet, Normalized, SetExpr};

fn fact(n: u64) -> u128 {
    (1..=n as u128).product()
}

fn is_prime(x: u64) -> bool {
    x >= 2 && (2..).take_while(|d| d * d <= x).all(|d| !x.is_multiple_of(d))
}

/// Block `n` of V_α is the integers in `[α(2n−1)! + (1−α)(2n)! + 1, (2n)! + 1]`.
fn in_valpha(alpha: &BigRational, x: u64) -> bool {
    let xq = BigRational::from_integer(x.into());
    (1..=10u64).any(|n| {
        let (f1, f2) = (BigRational::from_integer(fact(2 * n - 1).into()), BigRational::from_integer(fact(2 * n).into()));
        let a = alpha * &f1 + (BigRational::one() - alpha) * &f2;
        a + BigRational::one() <= xq && xq <= f2 + BigRational::one()
    })
}

fn oracle(e: &SetExpr, x: u64) -> bool {
    if x == 0 {
        return false;
    }
    match e {
        SetExpr::Empty => false,
        SetExpr::Full => true,
        SetExpr::Class(c) => x % c.modulus() == c.offset(),
        SetExpr::Interval(a, b) => *a <= x && x <= *b,
        SetExpr::Finite(xs) => xs.contains(&x),
        SetExpr::Named(NamedSet::Squares) => (1..=x).take_while(|j| j * j <= x).any(|j| j * j == x),
        SetExpr::Named(NamedSet::Primes) => is_prime(x),
        SetExpr::Named(NamedSet::Valpha(a)) => in_valpha(a, x),
        SetExpr::Named(NamedSet::Factorial(v)) => (1..=10u64).any(|n| {
            let hi = match v {
                FactorialVariant::Standard => fact(2 * n) - 1,
                FactorialVariant::Full => fact(2 * n),
            };
            fact(2 * n - 1) <= x as u128 && x as u128 <= hi
        }),
        SetExpr::Named(NamedSet::Rangeset(bits)) => {
            let mut r = 0u128;
            bits.iter().any(|&a| {
                let hit = x as u128 % (1u128 << a) == r;
                r += 1u128 << (a - 1);
                hit
            })
        }
        SetExpr::Union(a, b) => oracle(a, x) || oracle(b, x),
        SetExpr::Inter(a, b) => oracle(a, x) && oracle(b, x),
        SetExpr::Diff(a, b) => oracle(a, x) && !oracle(b, x),
        SetExpr::SymDiff(a, b) => oracle(a, x) != oracle(b, x),
        SetExpr::Compl(a) => !oracle(a, x),
        SetExpr::Affine(k, h, a) => x > *h && (x - h).is_multiple_of(*k) && oracle(a, (x - h) / k),
        SetExpr::Periodic(p) => p.contains(&BigUint::from(x)),
        other => panic!("no oracle for {other}"),
    }
}

fn leaf() -> impl Strategy<Value = SetExpr> {
    prop_oneof![
        (1u64..=12, 0u64..12).prop_map(|(k, h)| SetExpr::ap(k, h).unwrap()),
        (1u64..300, 0u64..300).prop_map(|(a, l)| SetExpr::interval(a, a + l)),
        proptest::collection::vec(1u64..400, 0..8).prop_map(SetExpr::finite),
        Just(SetExpr::squares()),
        Just(SetExpr::primes()),
        Just(SetExpr::Full),
        Just(SetExpr::Empty),
        (1i64..=9).prop_map(|n| SetExpr::valpha_ratio(n, 10).unwrap()),
        Just(SetExpr::fblocks(FactorialVariant::Standard)),
        Just(SetExpr::fblocks(FactorialVariant::Full)),
        proptest::collection::btree_set(1u32..9, 1..4).prop_map(|s| SetExpr::rangeset(s.into_iter().collect()).unwrap()),
    ]
}

fn expr() -> impl Strategy<Value = SetExpr> {
    leaf().prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| SetExpr::union(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| SetExpr::inter(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| SetExpr::diff(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| SetExpr::symdiff(a, b)),
            inner.clone().prop_map(SetExpr::compl),
            (1u64..=4, 0u64..=4, inner).prop_map(|(k, h, a)| SetExpr::affine(k, h, a).unwrap()),
        ]
    })
}

/// Sets built from classes, intervals and finite sets only.
fn periodic_expr() -> impl Strategy<Value = SetExpr> {
    let leaf = prop_oneof![
        (1u64..=12, 0u64..12).prop_map(|(k, h)| SetExpr::ap(k, h).unwrap()),
        (1u64..60, 0u64..60).prop_map(|(a, l)| SetExpr::interval(a, a + l)),
        proptest::collection::vec(1u64..80, 0..6).prop_map(SetExpr::finite),
    ];
    leaf.prop_recursive(3, 10, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| SetExpr::union(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| SetExpr::inter(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| SetExpr::diff(a, b)),
            inner.clone().prop_map(SetExpr::compl),
            (1u64..=3, 0u64..=3, inner).prop_map(|(k, h, a)| SetExpr::affine(k, h, a).unwrap()),
        ]
    })
}

fn n(v: u64) -> BigUint {
    BigUint::from(v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn prefix_counts_match_membership(e in expr()) {
        let c = Counter::default();
        let mut brute = 0u64;
        for x in 1..=3000u64 {
            brute += oracle(&e, x) as u64;
            if x % 250 == 0 || x < 20 {
                prop_assert_eq!(c.count_prefix(&e, &n(x)).unwrap(), n(brute), "{} at {}", e, x);
            }
        }
        let top = c.count_prefix(&e, &n(10_000)).unwrap();
        let brute_top = brute + (3001..=10_000u64).filter(|&x| oracle(&e, x)).count() as u64;
        prop_assert_eq!(top, n(brute_top));
    }

    #[test]
    fn complement_counts(e in expr(), m in 1u64..10_000) {
        let c = Counter::default();
        let a = c.count_prefix(&e, &n(m)).unwrap();
        let b = c.count_prefix(&SetExpr::compl(e.clone()), &n(m)).unwrap();
        prop_assert_eq!(a + b, n(m));
    }

    #[test]
    fn inclusion_exclusion(a in expr(), b in expr(), m in 1u64..10_000) {
        let c = Counter::default();
        let u = c.count_prefix(&SetExpr::union(a.clone(), b.clone()), &n(m)).unwrap();
        let i = c.count_prefix(&SetExpr::inter(a.clone(), b.clone()), &n(m)).unwrap();
        prop_assert_eq!(u + i, c.count_prefix(&a, &n(m)).unwrap() + c.count_prefix(&b, &n(m)).unwrap());
    }

    #[test]
    fn affine_counting(e in expr(), k in 1u64..=7, h in 0u64..=7, m in 1u64..=1000) {
        let c = Counter::default();
        let img = SetExpr::affine(k, h, e.clone()).unwrap();
        prop_assert_eq!(c.count_prefix(&img, &n(k * m + h)).unwrap(), c.count_prefix(&e, &n(m)).unwrap());
    }

    #[test]
    fn normalization_is_idempotent_and_exact(e in periodic_expr()) {
        let limits = Limits::default();
        let Normalized::Periodic(p) = normalize_periodic(&e, &limits).unwrap() else {
            return Err(TestCaseError::fail(format!("{e} did not normalize")));
        };
        let again = normalize_periodic(&SetExpr::Periodic(p.clone()), &limits).unwrap().periodic().unwrap();
        prop_assert_eq!(&again, &p);
        for x in 1..=600u64 {
            prop_assert_eq!(p.contains(&n(x)), oracle(&e, x), "{} at {}", e, x);
        }
        // one full window of whole periods past the threshold
        let m = p.modulus();
        let t = p.threshold().max(1);
        let len = 10 * m * (t + 1);
        let hits = (t..t + len).filter(|&x| oracle(&e, x)).count() as u64;
        let dens = p.density();
        prop_assert_eq!(BigRational::new(hits.into(), len.into()), dens.clone());
        prop_assert_eq!(BigRational::new((p.residues().len() as u64).into(), m.into()), dens);
    }
}

#[test]
fn block_families_verify_first_blocks() {
    let mut fams: Vec<BlockFamily> =
        [(1, 4), (1, 3), (1, 2), (2, 3), (9, 10)].iter().map(|&(a, b)| BlockFamily::valpha(BigRational::new(a.into(), b.into())).unwrap()).collect();
    fams.push(BlockFamily::factorial(FactorialVariant::Standard));
    for f in fams {
        let ell = f.ell().clone();
        let dev: Vec<BigRational> = (1..=12)
            .map(|i| {
                let (a, b) = f.endpoints(i);
                (&a / &b - &ell).abs()
            })
            .collect();
        let head = dev[..3].iter().max().unwrap();
        for i in 1..=12u32 {
            let (a, b) = f.endpoints(i);
            let (next, _) = f.endpoints(i + 1);
            assert!(&a + BigRational::one() <= b && b < next, "block {i} of {}", f.base_name());
            assert!(&dev[i as usize - 1] <= head, "ratio drift at block {i} of {}", f.base_name());
        }
        assert!(dev[11] <= dev[5], "{} does not approach its limit", f.base_name());
    }
}

#[test]
fn large_checkpoint_counts_are_exact() {
    // |fblocks ∩ [1, 18!]| from the block endpoints directly
    let c = Counter::default();
    let top = fact(18);
    let expected: u128 = (1..=9u64).map(|k| fact(2 * k) - fact(2 * k - 1)).sum();
    let got = c.count_prefix(&SetExpr::fblocks(FactorialVariant::Standard), &BigUint::from(top)).unwrap();
    assert_eq!(got.to_u128(), Some(expected));
}
