//! Named reproductions: each recomputes a published value and compares it
//! with an independently derived expectation.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use densitylab::combinators::{range_construct, theta_f2_witness, theta_star, KParam, RangeTarget};
use densitylab::densities::{buck_chain, builtin, modular_bounds, ChainKind, DensityError, DensityValue, Functional, Mode, Schedule};
use densitylab::setkit::{member, primes::is_prime, Counter, FactorialVariant, GroundSet, SetExpr};

use crate::dsl::parse_set_expr;
use crate::report::{decimal, decimal_q, Check, Reproduction};

pub const TARGETS: [&str; 7] = ["example-blocks", "lemma-blocks", "range", "buck-squares", "nonmonotone-theta", "primes-meager", "log-vs-asympt"];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Options {
    pub alpha: Option<String>,
    pub k: Option<u64>,
    pub h: Option<u64>,
    pub depth: Option<u32>,
    pub bits: Option<Vec<u32>>,
    pub big_k: Option<String>,
    pub modulus_depth: Option<usize>,
    pub set: Option<String>,
    pub tol: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum ReproduceError {
    #[error("unknown target {0:?}; expected one of {targets}", targets = TARGETS.join(", "))]
    UnknownTarget(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Eval(#[from] DensityError),
}

type Out = Result<Reproduction, ReproduceError>;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn parse_q(s: &str) -> Result<BigRational, ReproduceError> {
    let bad = || ReproduceError::Usage(format!("bad rational {s:?}"));
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let (n, d): (i64, i64) = (n.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?);
    if d == 0 {
        return Err(bad());
    }
    Ok(q(n, d))
}

/// `p/q` for exact values, `[lo, hi]` for brackets.
fn shown(v: &DensityValue) -> String {
    match &v.exact {
        Some(x) => x.to_string(),
        None => format!("[{}, {}]", decimal(v.lo), decimal(v.hi)),
    }
}

fn params(pairs: &[(&str, Value)]) -> Map<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

struct Ctx {
    counter: Arc<Counter>,
    tol: f64,
}

impl Ctx {
    fn f(&self, name: &str, mode: Mode) -> Functional {
        builtin(name, mode, self.counter.clone()).expect("built-in name")
    }

    /// `v ≤ bound + tol` on the upper endpoint.
    fn at_most(&self, quantity: String, v: &DensityValue, bound: f64) -> Check {
        Check::new(quantity, format!("<= {}", decimal(bound)), shown(v), Some(self.tol), v.hi <= bound + self.tol)
    }

    fn near(&self, quantity: String, v: &DensityValue, target: &BigRational) -> Check {
        let t = target.to_f64().unwrap();
        let pass = v.exact.as_ref().map_or(v.lo >= t - self.tol && v.hi <= t + self.tol, |x| x == target);
        Check::new(quantity, target.to_string(), shown(v), Some(self.tol), pass)
    }
}

fn example_blocks(cx: &Ctx) -> Out {
    let sch = Schedule::default();
    let x = SetExpr::fblocks(FactorialVariant::Standard);
    let y = SetExpr::compl(x.clone());
    let xy = SetExpr::union(x.clone(), y.clone());
    let mut checks = Vec::new();
    for name in ["asympt", "banach"] {
        let f = cx.f(name, Mode::Lower);
        for (label, e) in [("X", &x), ("Y", &y)] {
            checks.push(cx.at_most(format!("{name} lower {label}"), &f.eval(e, &sch)?, 0.0));
        }
        let v = f.eval(&xy, &sch)?;
        checks.push(Check::new(format!("{name} lower X ∪ Y"), "1", shown(&v), None, v.exact == Some(BigRational::one())));
    }
    Ok(Reproduction {
        target: "example-blocks".into(),
        claim: "the factorial blocks X and their complement Y both have lower density 0 while X ∪ Y has lower density 1".into(),
        parameters: params(&[("X", json!(x.to_string())), ("Y", json!(y.to_string()))]),
        checks,
    })
}

fn lemma_blocks(cx: &Ctx, o: &Options) -> Out {
    let alpha = parse_q(o.alpha.as_deref().unwrap_or("1/3"))?;
    let k = o.k.unwrap_or(2);
    let depth = o.depth.unwrap_or(9);
    if k == 0 {
        return Err(ReproduceError::Usage("--k must be positive".into()));
    }
    let sch = Schedule::with_depth(depth);
    let v = SetExpr::valpha(alpha.clone()).map_err(DensityError::from)?;
    let (up, low) = (cx.f("asympt", Mode::Upper), cx.f("asympt", Mode::Lower));
    let expected = &alpha / BigRational::from_integer(k.into());
    let hs: Vec<u64> = o.h.map_or_else(|| (0..k).collect(), |h| vec![h % k]);
    let mut checks = Vec::new();
    for h in hs {
        let e = SetExpr::inter(v.clone(), SetExpr::ap(k, h).map_err(DensityError::from)?);
        checks.push(cx.near(format!("upper density of {e}"), &up.eval(&e, &sch)?, &expected));
        checks.push(cx.at_most(format!("lower density of {e}"), &low.eval(&e, &sch)?, 0.0));
    }
    Ok(Reproduction {
        target: "lemma-blocks".into(),
        claim: "each residue class k·H + h cuts V_α in a set of upper density α/k and lower density 0".into(),
        parameters: params(&[("alpha", json!(alpha.to_string())), ("k", json!(k)), ("h", json!(o.h)), ("depth", json!(depth))]),
        checks,
    })
}

/// `x² ≤ 1/2` for `x ≥ 0`, i.e. `x ≤ 1/√2`.
fn below_inv_sqrt2(x: &BigRational) -> bool {
    x * x * BigRational::from_integer(2.into()) <= BigRational::one()
}

fn range(cx: &Ctx, o: &Options) -> Out {
    let sch = Schedule::default();
    let (target, mut checks) = match (&o.bits, &o.alpha) {
        (Some(b), None) => (RangeTarget::Bits(b.clone()), Vec::new()),
        (None, Some(a)) => {
            let depth = o.depth.unwrap_or(40);
            match a.trim() {
                "1/sqrt2" | "isqrt2" => (RangeTarget::InvSqrt2(depth), Vec::new()),
                s => (RangeTarget::Rational(parse_q(s)?, depth), Vec::new()),
            }
        }
        _ => return Err(ReproduceError::Usage("range needs exactly one of --bits or --alpha".into())),
    };
    let r = range_construct(&target)?;
    // Σ 2^{−aᵢ} from the bit list alone
    let sum: BigRational = r.bits.iter().map(|&a| BigRational::new(BigInt::one(), BigInt::one() << a)).sum();
    let v = cx.f("asympt", Mode::Upper).eval(&r.set, &sch)?;
    checks.push(Check::new("upper density of the construction", sum.to_string(), shown(&v), None, v.exact.as_ref() == Some(&sum)));
    let top = *r.bits.last().unwrap();
    if top <= 20 {
        // the set is periodic with period 2^top: count one full period
        let period = 1u64 << top;
        let hits = (1..=period).filter(|&x| member(&r.set, &BigUint::from(x), GroundSet::Positive)).count();
        let counted = q(hits as i64, period as i64);
        checks.push(Check::new("counted density over one period", sum.to_string(), counted.to_string(), None, counted == sum));
    }
    checks.push(Check::new("classes pairwise disjoint", "true", r.disjoint.to_string(), None, r.disjoint));
    let width = BigRational::new(BigInt::one(), BigInt::one() << (top - 1));
    checks.push(Check::new("bracket width", width.to_string(), r.width().to_string(), None, r.width() == width));
    match &target {
        RangeTarget::Bits(_) => {}
        RangeTarget::Rational(a, depth) => {
            let gap = BigRational::new(BigInt::one(), BigInt::one() << depth);
            checks.push(Check::new("bracket contains target", a.to_string(), format!("[{}, {}]", r.lo, r.hi), None, r.contains(a)));
            checks.push(Check::new("truncation gap", format!("< {gap}"), (a - &r.lo).to_string(), None, a - &r.lo < gap));
        }
        RangeTarget::InvSqrt2(depth) => {
            let gap = BigRational::new(BigInt::one(), BigInt::one() << depth);
            let inside = below_inv_sqrt2(&r.lo) && !below_inv_sqrt2(&r.hi);
            let shown_b = format!("[{}, {}]", decimal_q(&r.lo), decimal_q(&r.hi));
            checks.push(Check::new("bracket contains 1/√2", "0.707106781187", shown_b, None, inside));
            let close = !below_inv_sqrt2(&(&r.lo + &gap));
            checks.push(Check::new("truncation gap", format!("< {gap}"), format!("lo + {gap} exceeds 1/√2: {close}"), None, close));
        }
    }
    Ok(Reproduction {
        target: "range".into(),
        claim: "a union of disjoint classes 2^{a_i}·N + r_i realizes any prescribed binary expansion as its density".into(),
        parameters: params(&[("bits", json!(r.bits)), ("set", json!(r.set.to_string()))]),
        checks,
    })
}

fn buck_squares(cx: &Ctx, o: &Options) -> Out {
    let depth = o.depth.unwrap_or(8);
    let sch = Schedule { chain: ChainKind::Squared, ..Schedule::with_depth(depth) };
    let steps = buck_chain(&cx.counter, &SetExpr::squares(), &sch)?;
    let ratios: Vec<BigRational> = steps.iter().map(|s| s.ratio()).collect();
    let listed = steps.iter().map(|s| format!("{}/{}", s.r, s.k)).collect::<Vec<_>>().join(" ");
    let monotone = ratios.windows(2).all(|w| w[1] <= w[0]);
    let last = ratios.last().cloned().unwrap_or_else(BigRational::one);
    let checks = vec![
        Check::new("r_k/k along the chain", "nonincreasing", listed, None, monotone),
        Check::new(format!("r_k/k at k = {}", steps.last().map_or(1, |s| s.k)), "<= 0.1", decimal_q(&last), None, last <= q(1, 10)),
    ];
    Ok(Reproduction {
        target: "buck-squares".into(),
        claim: "the share of residue classes met by the squares shrinks toward 0 along lcm(1..m)^2".into(),
        parameters: params(&[("depth", json!(depth)), ("moduli", json!(steps.iter().map(|s| s.k).collect::<Vec<_>>()))]),
        checks,
    })
}

fn nonmonotone_theta(cx: &Ctx, o: &Options) -> Out {
    let k: KParam = o.big_k.as_deref().unwrap_or("1").parse()?;
    let sch = Schedule::default();
    let t: Functional = theta_star(k.clone(), cx.counter.clone())?;
    let (y, x) = theta_f2_witness(&k);
    let (vy, vx) = (t.eval(&y, &sch)?, t.eval(&x, &sch)?);
    // no element of Y outside X up to the enumeration horizon
    let n = BigUint::from(1_000_000u32);
    let stray = cx.counter.count_prefix(&SetExpr::diff(y.clone(), x.clone()), &n).map_err(DensityError::from)?;
    let extra = cx.counter.count_prefix(&SetExpr::diff(x.clone(), y.clone()), &n).map_err(DensityError::from)?;
    let checks = vec![
        Check::new(format!("{y} ⊆ {x} up to {n}"), "0 elements outside", format!("{stray} outside"), None, stray.is_zero()),
        Check::new(format!("{x} ∖ {y} nonempty up to {n}"), "> 0", extra.to_string(), None, !extra.is_zero()),
        Check::new(format!("theta({y}) - theta({x})"), "> 0.01", format!("{} vs {}", shown(&vy), shown(&vx)), Some(0.01), vy.lo > vx.hi + 0.01),
    ];
    Ok(Reproduction {
        target: "nonmonotone-theta".into(),
        claim: "theta* assigns a strictly larger value to a subset than to the set containing it".into(),
        parameters: params(&[("K", json!(k.to_string())), ("Y", json!(y.to_string())), ("X", json!(x.to_string()))]),
        checks,
    })
}

/// `φ(k)` plus the number of prime divisors of `k`, by trial division.
fn prime_class_count(k: u64) -> u64 {
    let coprime = (0..k).filter(|h| h.gcd(&k) == 1).count() as u64;
    let divisors = (2..=k).filter(|&p| k.is_multiple_of(p) && is_prime(p)).count() as u64;
    coprime + divisors
}

fn primes_meager(cx: &Ctx, o: &Options) -> Out {
    let depth = o.modulus_depth.unwrap_or(6);
    if depth == 0 || depth > 9 {
        return Err(ReproduceError::Usage("--modulus-depth must be in 1..=9".into()));
    }
    let mut moduli = Vec::new();
    let mut k = 1u64;
    for p in (2u64..).filter(|&p| is_prime(p)).take(depth) {
        k *= p;
        moduli.push(k);
    }
    let primes = SetExpr::primes();
    let mut checks = Vec::new();
    let mut prev: Option<BigRational> = None;
    let mut decreasing = true;
    let mut trail = Vec::new();
    for &k in &moduli {
        let b = modular_bounds(&cx.counter, &primes, k, false)?;
        let expected = prime_class_count(k);
        checks.push(Check::new(format!("r_{k}(primes)"), expected.to_string(), b.r_set.to_string(), None, b.r_set == expected));
        let ratio = q(b.r_set as i64, k as i64);
        decreasing &= prev.as_ref().is_none_or(|p| &ratio < p);
        trail.push(format!("{}/{k}", b.r_set));
        prev = Some(ratio);
    }
    let last = prev.unwrap();
    let top = *moduli.last().unwrap();
    checks.push(Check::new("r_k/k along primorials", "decreasing", trail.join(" "), None, decreasing));
    checks.push(Check::new(format!("upper density bound r_k/k at k = {top}"), "<= 0.2", decimal_q(&last), None, last <= q(1, 5)));
    let b = modular_bounds(&cx.counter, &primes, top, false)?;
    checks.push(Check::new(format!("w_k/k at k = {top}"), "0", b.hi.to_string(), None, b.hi.is_zero()));
    Ok(Reproduction {
        target: "primes-meager".into(),
        claim: "the classes met by the primes form a vanishing share of all classes along the primorials".into(),
        parameters: params(&[("moduli", json!(moduli))]),
        checks,
    })
}

fn log_vs_asympt(cx: &Ctx, o: &Options) -> Out {
    let sch = Schedule::with_depth(o.depth.unwrap_or(9));
    let e = match &o.set {
        Some(s) => parse_set_expr(s).map_err(|err| ReproduceError::Usage(err.to_string()))?,
        None => SetExpr::fblocks(FactorialVariant::Standard),
    };
    let du = cx.f("asympt", Mode::Upper).eval(&e, &sch)?;
    let dl = cx.f("asympt", Mode::Lower).eval(&e, &sch)?;
    let lu = cx.f("log", Mode::Upper).eval(&e, &sch)?;
    let ll = cx.f("log", Mode::Lower).eval(&e, &sch)?;
    let t = cx.tol;
    let checks = vec![
        Check::new("d_* <= log lower", "holds", format!("{} vs {}", shown(&dl), shown(&ll)), Some(t), dl.lo <= ll.hi + t),
        Check::new("log lower <= log upper", "holds", format!("{} vs {}", shown(&ll), shown(&lu)), Some(t), ll.lo <= lu.hi + t),
        Check::new("log upper <= d^*", "holds", format!("{} vs {}", shown(&lu), shown(&du)), Some(t), lu.lo <= du.hi + t),
        Check::new("log upper < d^*", "separated", format!("{} vs {}", shown(&lu), shown(&du)), Some(t), lu.hi + t < du.lo),
        Check::new("d_* < log lower", "separated", format!("{} vs {}", shown(&dl), shown(&ll)), Some(t), dl.hi + t < ll.lo),
    ];
    Ok(Reproduction {
        target: "log-vs-asympt".into(),
        claim: "logarithmic density sits strictly inside the asymptotic bracket on the factorial blocks".into(),
        parameters: params(&[("set", json!(e.to_string())), ("depth", json!(sch.depth))]),
        checks,
    })
}

pub fn reproduce(target: &str, o: &Options) -> Out {
    let cx = Ctx { counter: Arc::new(Counter::default()), tol: o.tol };
    match target {
        "example-blocks" => example_blocks(&cx),
        "lemma-blocks" => lemma_blocks(&cx, o),
        "range" => range(&cx, o),
        "buck-squares" => buck_squares(&cx, o),
        "nonmonotone-theta" => nonmonotone_theta(&cx, o),
        "primes-meager" => primes_meager(&cx, o),
        "log-vs-asympt" => log_vs_asympt(&cx, o),
        other => Err(ReproduceError::UnknownTarget(other.into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_class_counts() {
        let got: Vec<u64> = [2, 6, 30, 210, 2310].iter().map(|&k| prime_class_count(k)).collect();
        assert_eq!(got, vec![2, 4, 11, 52, 485]);
    }

    #[test]
    fn inv_sqrt2_comparison() {
        assert!(below_inv_sqrt2(&q(7071, 10000)));
        assert!(!below_inv_sqrt2(&q(7072, 10000)));
    }

    #[test]
    fn unknown_target() {
        let o = Options { tol: 0.02, ..Options::default() };
        assert!(matches!(reproduce("nope", &o), Err(ReproduceError::UnknownTarget(_))));
    }
}
