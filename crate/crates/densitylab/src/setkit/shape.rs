//! Structural decomposition into a periodic pattern or a two-pattern block shape,
//! valid up to a finite set and, optionally, up to meager leaves.

use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;

use super::blocks::BlockFamily;
use super::count::member;
use super::expr::{GroundSet, NamedSet, SetExpr};
use super::residues::{BoolOp, Residues};
use super::Limits;

/// `(B ∩ inner) ∪ (Bᶜ ∩ outer)` where `B` is the union of the blocks of a base
/// family pushed through `maps` (innermost first). Blocks grow without bound,
/// gaps do too, and the endpoint ratio tends to `ell < 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockShape {
    pub base: String,
    pub maps: Vec<(u64, u64)>,
    pub ell: BigRational,
    pub inner: Residues,
    pub outer: Residues,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    Periodic(Residues),
    Blocks(BlockShape),
}

impl BlockShape {
    fn same_blocks(&self, other: &BlockShape) -> bool {
        self.base == other.base && self.maps == other.maps
    }

    fn mix(&self) -> BigRational {
        (BigRational::one() - &self.ell) * self.inner.density() + &self.ell * self.outer.density()
    }
}

impl Shape {
    fn blocks(s: BlockShape) -> Shape {
        if s.inner == s.outer {
            Shape::Periodic(s.inner)
        } else {
            Shape::Blocks(s)
        }
    }

    fn map_patterns(&self, f: impl Fn(&Residues) -> Option<Residues>) -> Option<Shape> {
        Some(match self {
            Shape::Periodic(p) => Shape::Periodic(f(p)?),
            Shape::Blocks(b) => Shape::blocks(BlockShape { inner: f(&b.inner)?, outer: f(&b.outer)?, ..b.clone() }),
        })
    }

    pub fn combine(&self, other: &Shape, op: BoolOp, bound: u64) -> Option<Shape> {
        let c = |x: &Residues, y: &Residues| x.combine(y, op, bound).ok();
        match (self, other) {
            (Shape::Periodic(p), Shape::Periodic(q)) => Some(Shape::Periodic(c(p, q)?)),
            (Shape::Periodic(p), s @ Shape::Blocks(_)) => s.map_patterns(|x| c(p, x)),
            (s @ Shape::Blocks(_), Shape::Periodic(q)) => s.map_patterns(|x| c(x, q)),
            (Shape::Blocks(a), Shape::Blocks(b)) if a.same_blocks(b) => {
                Some(Shape::blocks(BlockShape { inner: c(&a.inner, &b.inner)?, outer: c(&a.outer, &b.outer)?, ..a.clone() }))
            }
            _ => None,
        }
    }

    pub fn complement(&self) -> Shape {
        self.map_patterns(|p| Some(p.complement())).unwrap()
    }

    pub fn affine(&self, k: u64, h: u64, bound: u64) -> Option<Shape> {
        let mut s = self.map_patterns(|p| p.affine(k, h, bound).ok())?;
        if let Shape::Blocks(b) = &mut s {
            b.maps.push((k, h));
        }
        Some(s)
    }

    /// Upper (`true`) or lower asymptotic density.
    pub fn asymptotic(&self, upper: bool) -> BigRational {
        match self {
            Shape::Periodic(p) => p.density(),
            Shape::Blocks(b) => {
                let (o, m) = (b.outer.density(), b.mix());
                if upper {
                    o.max(m)
                } else {
                    o.min(m)
                }
            }
        }
    }

    pub fn banach(&self, upper: bool) -> BigRational {
        match self {
            Shape::Periodic(p) => p.density(),
            Shape::Blocks(b) => {
                let (i, o) = (b.inner.density(), b.outer.density());
                if upper {
                    i.max(o)
                } else {
                    i.min(o)
                }
            }
        }
    }

    /// Density of the smallest periodic pattern containing the set eventually.
    pub fn buck(&self, bound: u64) -> Option<BigRational> {
        match self {
            Shape::Periodic(p) => Some(p.density()),
            Shape::Blocks(b) => Some(b.inner.combine(&b.outer, BoolOp::Union, bound).ok()?.density()),
        }
    }

    pub fn patterns(&self) -> Vec<&Residues> {
        match self {
            Shape::Periodic(p) => vec![p],
            Shape::Blocks(b) => vec![&b.inner, &b.outer],
        }
    }
}

fn family_shape(f: &BlockFamily) -> Option<Shape> {
    if !f.gap() || f.ell() >= &BigRational::one() {
        return None;
    }
    Some(Shape::Blocks(BlockShape {
        base: f.base_name(),
        maps: Vec::new(),
        ell: f.ell().clone(),
        inner: f.inner().map_or_else(Residues::full, |c| c.pattern()),
        outer: Residues::empty(),
    }))
}

/// Whether the set lies inside a finite union of affine images of the squares
/// and the primes, up to a finite set.
pub fn is_meager(e: &SetExpr) -> bool {
    match e {
        SetExpr::Named(NamedSet::Squares) | SetExpr::Named(NamedSet::Primes) => true,
        SetExpr::Empty | SetExpr::Finite(_) | SetExpr::Interval(..) => true,
        SetExpr::Affine(_, _, a) => is_meager(a),
        SetExpr::Inter(a, b) => is_meager(a) || is_meager(b),
        SetExpr::Diff(a, _) => is_meager(a),
        SetExpr::Union(a, b) | SetExpr::SymDiff(a, b) => is_meager(a) && is_meager(b),
        _ => false,
    }
}

/// Shape of the set up to finite sets; with `meager_null` also up to meager parts.
pub fn shape_of(e: &SetExpr, meager_null: bool, limits: &Limits) -> Option<Shape> {
    let bound = limits.pattern_bound;
    if meager_null && is_meager(e) {
        return Some(Shape::Periodic(Residues::empty()));
    }
    match e {
        SetExpr::Empty | SetExpr::Finite(_) | SetExpr::Interval(..) => Some(Shape::Periodic(Residues::empty())),
        SetExpr::Full => Some(Shape::Periodic(Residues::full())),
        SetExpr::Class(c) => Some(Shape::Periodic(c.pattern())),
        SetExpr::Periodic(p) => Some(Shape::Periodic(p.pattern().clone())),
        SetExpr::Blocks(f) => family_shape(f),
        SetExpr::Named(NamedSet::Rangeset(bits)) => {
            let top = *bits.last()?;
            let m = 1u64.checked_shl(top).filter(|&m| top < 64 && m <= bound)?;
            let mut r = Vec::new();
            for (k, off) in SetExpr::rangeset_classes(bits) {
                r.extend((off as u64..m).step_by(k as usize));
            }
            Some(Shape::Periodic(Residues::new(m, r)))
        }
        SetExpr::Named(NamedSet::Squares) | SetExpr::Named(NamedSet::Primes) => None,
        SetExpr::Named(_) => family_shape(&e.as_block_family()?),
        SetExpr::Union(a, b) => binary(a, b, BoolOp::Union, meager_null, limits),
        SetExpr::Inter(a, b) => binary(a, b, BoolOp::Inter, meager_null, limits),
        SetExpr::Diff(a, b) => binary(a, b, BoolOp::Diff, meager_null, limits),
        SetExpr::SymDiff(a, b) => binary(a, b, BoolOp::SymDiff, meager_null, limits),
        SetExpr::Compl(a) => Some(shape_of(a, meager_null, limits)?.complement()),
        SetExpr::Affine(k, h, a) => shape_of(a, meager_null, limits)?.affine(*k, *h, bound),
    }
}

fn binary(a: &SetExpr, b: &SetExpr, op: BoolOp, meager_null: bool, limits: &Limits) -> Option<Shape> {
    let sa = shape_of(a, meager_null, limits)?;
    let sb = shape_of(b, meager_null, limits)?;
    sa.combine(&sb, op, limits.pattern_bound)
}

fn valpha_param(e: &SetExpr) -> Option<&BigRational> {
    match e {
        SetExpr::Named(NamedSet::Valpha(a)) => Some(a),
        _ => None,
    }
}

/// `X ∩ F`, `F ∩ X` and `F \ X` for a finite `F`, as an explicit finite set.
fn finite_operand(e: &SetExpr, a: &SetExpr, b: &SetExpr) -> Option<SetExpr> {
    let keep = |xs: &[u64], other: &SetExpr, want: bool| {
        SetExpr::finite(xs.iter().copied().filter(|&x| member(other, &BigUint::from(x), GroundSet::Nonnegative) == want))
    };
    match (e, a, b) {
        (SetExpr::Inter(..), SetExpr::Finite(xs), y) | (SetExpr::Inter(..), y, SetExpr::Finite(xs)) => Some(keep(xs, y, true)),
        (SetExpr::Diff(..), SetExpr::Finite(xs), y) => Some(keep(xs, y, false)),
        _ => None,
    }
}

/// Rewrites with exact set identities: nested `V_α` families, shared affine
/// maps, idempotent operands, and boolean operations that keep a finite set
/// finite.
pub fn simplify(e: &SetExpr) -> SetExpr {
    let bin = |a: &Arc<SetExpr>, b: &Arc<SetExpr>| (simplify(a), simplify(b));
    match e {
        SetExpr::Union(a, b) | SetExpr::Inter(a, b) | SetExpr::Diff(a, b) | SetExpr::SymDiff(a, b) => {
            let (a, b) = bin(a, b);
            let rebuild = |x: SetExpr, y: SetExpr| match e {
                SetExpr::Union(..) => SetExpr::union(x, y),
                SetExpr::Inter(..) => SetExpr::inter(x, y),
                SetExpr::Diff(..) => SetExpr::diff(x, y),
                _ => SetExpr::symdiff(x, y),
            };
            if let Some(f) = finite_operand(e, &a, &b) {
                return f;
            }
            if a == b {
                return match e {
                    SetExpr::Union(..) | SetExpr::Inter(..) => a,
                    _ => SetExpr::Empty,
                };
            }
            if let (Some(x), Some(y)) = (valpha_param(&a), valpha_param(&b)) {
                // V_x ⊆ V_y whenever x ≤ y
                let (small, big) = if x <= y { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
                match e {
                    SetExpr::Union(..) => return big,
                    SetExpr::Inter(..) => return small,
                    SetExpr::Diff(..) if x <= y => return SetExpr::Empty,
                    _ => {}
                }
            }
            if let (SetExpr::Affine(k1, h1, x), SetExpr::Affine(k2, h2, y)) = (&a, &b) {
                if (k1, h1) == (k2, h2) {
                    return SetExpr::Affine(*k1, *h1, Arc::new(simplify(&rebuild((**x).clone(), (**y).clone()))));
                }
            }
            rebuild(a, b)
        }
        SetExpr::Compl(a) => match simplify(a) {
            SetExpr::Compl(inner) => (*inner).clone(),
            s => SetExpr::compl(s),
        },
        SetExpr::Affine(k, h, a) => SetExpr::Affine(*k, *h, Arc::new(simplify(a))),
        _ => e.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setkit::FactorialVariant;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn shape(e: &SetExpr) -> Shape {
        shape_of(e, true, &Limits::default()).unwrap()
    }

    #[test]
    fn valpha_in_class() {
        let e = SetExpr::inter(SetExpr::valpha_ratio(1, 3).unwrap(), SetExpr::ap(2, 1).unwrap());
        let s = shape(&e);
        assert_eq!(s.asymptotic(true), q(1, 6));
        assert_eq!(s.asymptotic(false), q(0, 1));
        assert_eq!(s.banach(true), q(1, 2));
        assert_eq!(s.buck(1 << 20).unwrap(), q(1, 2));
    }

    #[test]
    fn factorial_pair_union_is_full() {
        let x = SetExpr::fblocks(FactorialVariant::Standard);
        let s = shape(&SetExpr::union(x.clone(), SetExpr::compl(x)));
        assert_eq!(s, Shape::Periodic(Residues::full()));
    }

    #[test]
    fn complement_of_blocks() {
        let s = shape(&SetExpr::compl(SetExpr::valpha_ratio(1, 4).unwrap()));
        assert_eq!(s.asymptotic(true), q(1, 1));
        assert_eq!(s.asymptotic(false), q(3, 4));
    }

    #[test]
    fn meager_parts_vanish() {
        let e = SetExpr::union(SetExpr::primes(), SetExpr::ap(3, 2).unwrap());
        assert_eq!(shape(&e), Shape::Periodic(Residues::class(3, 2)));
        assert!(shape_of(&e, false, &Limits::default()).is_none());
    }

    #[test]
    fn nested_valpha() {
        let e = SetExpr::union(SetExpr::valpha_ratio(1, 4).unwrap(), SetExpr::valpha_ratio(1, 2).unwrap());
        assert_eq!(simplify(&e), SetExpr::valpha_ratio(1, 2).unwrap());
    }
}
