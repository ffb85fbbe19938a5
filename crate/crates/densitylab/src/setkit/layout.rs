//! Piecewise-periodic description of a set on a prefix of the positive integers.

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::blocks::BlockFamily;
use super::expr::{NamedSet, SetExpr};
use super::residues::{BoolOp, Residues};
use super::{Limits, SetError};

/// A maximal run `[start, next start − 1]` on which membership follows `pattern`.
#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub start: BigUint,
    pub pattern: Arc<Residues>,
}

/// Consecutive pieces starting at 1. With `horizon = None` the last piece
/// extends forever; otherwise the layout is only valid on `[1, horizon]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Layout {
    pieces: Vec<Piece>,
    horizon: Option<BigUint>,
    /// `cum[i]` = number of elements before `pieces[i].start`.
    cum: Vec<BigUint>,
}

impl Layout {
    fn from_pieces(raw: Vec<Piece>, horizon: Option<BigUint>) -> Layout {
        let mut pieces: Vec<Piece> = Vec::with_capacity(raw.len());
        for p in raw {
            if let Some(last) = pieces.last_mut() {
                if last.start == p.start {
                    *last = p;
                    continue;
                }
                if last.pattern == p.pattern {
                    continue;
                }
            }
            pieces.push(p);
        }
        let mut cum = Vec::with_capacity(pieces.len());
        let mut acc = BigUint::zero();
        for (i, p) in pieces.iter().enumerate() {
            cum.push(acc.clone());
            if let Some(next) = pieces.get(i + 1) {
                acc += p.pattern.count_range(&p.start, &(&next.start - 1u32));
            }
        }
        Layout { pieces, horizon, cum }
    }

    fn uniform(pattern: Residues) -> Layout {
        Layout::from_pieces(vec![Piece { start: BigUint::one(), pattern: Arc::new(pattern) }], None)
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn horizon(&self) -> Option<&BigUint> {
        self.horizon.as_ref()
    }

    pub fn covers(&self, n: &BigUint) -> bool {
        self.horizon.as_ref().is_none_or(|h| n <= h)
    }

    /// Last element of piece `i`, `None` for an unbounded final piece.
    pub fn piece_end(&self, i: usize) -> Option<BigUint> {
        match self.pieces.get(i + 1) {
            Some(next) => Some(&next.start - 1u32),
            None => self.horizon.clone(),
        }
    }

    /// Index of the piece containing `x ≥ 1`.
    pub fn locate(&self, x: &BigUint) -> usize {
        self.pieces.partition_point(|p| &p.start <= x).saturating_sub(1)
    }

    /// `|S ∩ [1, n]|`; `n` must be covered.
    pub fn count(&self, n: &BigUint) -> BigUint {
        if n.is_zero() {
            return BigUint::zero();
        }
        let i = self.locate(n);
        let p = &self.pieces[i];
        &self.cum[i] + p.pattern.count_range(&p.start, n)
    }

    pub fn contains(&self, x: &BigUint) -> bool {
        !x.is_zero() && self.pieces[self.locate(x)].pattern.contains(x)
    }

    /// Smallest element `≥ from` that also lies in `class`, within the covered range.
    pub fn first_at_or_after(&self, from: &BigUint, class: Option<&Residues>, bound: u64) -> Option<BigUint> {
        let from = if from.is_zero() { BigUint::one() } else { from.clone() };
        let mut i = self.locate(&from);
        while i < self.pieces.len() {
            let p = &self.pieces[i];
            let pat = match class {
                Some(c) => p.pattern.combine(c, BoolOp::Inter, bound).ok()?,
                None => (*p.pattern).clone(),
            };
            let lo = if p.start > from { p.start.clone() } else { from.clone() };
            if let Some(x) = pat.first_at_or_after(&lo) {
                match self.piece_end(i) {
                    Some(end) if x > end => {}
                    _ => return Some(x),
                }
            }
            i += 1;
        }
        None
    }
}

/// Builds a layout valid at least on `[1, horizon]`, or `None` when the
/// expression has no piecewise-periodic form within the pattern bound.
pub fn build(e: &SetExpr, horizon: &BigUint, limits: &Limits) -> Option<Layout> {
    match e {
        SetExpr::Empty => Some(Layout::uniform(Residues::empty())),
        SetExpr::Full => Some(Layout::uniform(Residues::full())),
        SetExpr::Class(c) => Some(Layout::uniform(c.pattern())),
        SetExpr::Interval(a, b) => {
            let a = (*a).max(1);
            if a > *b {
                return Some(Layout::uniform(Residues::empty()));
            }
            let pieces = vec![piece(1u32.into(), Residues::empty()), piece(a.into(), Residues::full()), piece((*b + 1).into(), Residues::empty())];
            Some(Layout::from_pieces(pieces, None))
        }
        SetExpr::Finite(xs) => {
            let mut pieces = vec![piece(1u32.into(), Residues::empty())];
            for &x in xs.iter().filter(|&&x| x >= 1) {
                pieces.push(piece(x.into(), Residues::full()));
                pieces.push(piece((x + 1).into(), Residues::empty()));
            }
            Some(Layout::from_pieces(pieces, None))
        }
        SetExpr::Periodic(p) => {
            let mut pieces = vec![piece(1u32.into(), Residues::empty())];
            for &x in p.patch() {
                pieces.push(piece(x.into(), Residues::full()));
                pieces.push(piece((x + 1).into(), Residues::empty()));
            }
            pieces.push(piece(p.threshold().into(), p.pattern().clone()));
            Some(Layout::from_pieces(pieces, None))
        }
        SetExpr::Blocks(f) => Some(blocks_layout(f, horizon)),
        SetExpr::Named(NamedSet::Valpha(_)) | SetExpr::Named(NamedSet::Factorial(_)) => Some(blocks_layout(&e.as_block_family()?, horizon)),
        SetExpr::Named(NamedSet::Rangeset(bits)) => {
            let m = 1u64.checked_shl(*bits.last()?)?;
            if m > limits.pattern_bound {
                return None;
            }
            let mut r = Vec::new();
            for (k, off) in SetExpr::rangeset_classes(bits) {
                let k = k as u64;
                let mut x = off as u64;
                while x < m {
                    r.push(x);
                    x += k;
                }
            }
            Some(Layout::uniform(Residues::new(m, r)))
        }
        SetExpr::Named(_) => None,
        SetExpr::Union(a, b) => merge(a, b, BoolOp::Union, horizon, limits),
        SetExpr::Inter(a, b) => merge(a, b, BoolOp::Inter, horizon, limits),
        SetExpr::Diff(a, b) => merge(a, b, BoolOp::Diff, horizon, limits),
        SetExpr::SymDiff(a, b) => merge(a, b, BoolOp::SymDiff, horizon, limits),
        SetExpr::Compl(a) => {
            let l = build(a, horizon, limits)?;
            let pieces = l.pieces.iter().map(|p| Piece { start: p.start.clone(), pattern: Arc::new(p.pattern.complement()) }).collect();
            Some(Layout::from_pieces(pieces, l.horizon))
        }
        SetExpr::Affine(k, h, a) => {
            let inner_h = if horizon > &BigUint::from(*h) { (horizon - *h) / *k } else { BigUint::zero() };
            let l = build(a, &inner_h.max(BigUint::one()), limits)?;
            // the image of piece 1 starts at k + h; an equal start replaces the empty lead piece
            let mut pieces = vec![piece(1u32.into(), Residues::empty())];
            for p in &l.pieces {
                let pat = p.pattern.affine(*k, *h, limits.pattern_bound).ok()?;
                pieces.push(piece(&p.start * *k + *h, pat));
            }
            let hz = l.horizon.map(|t| t * *k + *h + (*k - 1));
            Some(Layout::from_pieces(pieces, hz))
        }
    }
}

fn piece(start: BigUint, pattern: Residues) -> Piece {
    Piece { start, pattern: Arc::new(pattern) }
}

fn blocks_layout(f: &BlockFamily, horizon: &BigUint) -> Layout {
    let inner = f.inner().map_or_else(Residues::full, |c| c.pattern());
    let mut pieces = vec![piece(1u32.into(), Residues::empty())];
    let mut n = 1;
    loop {
        let (lo, hi) = f.block(n);
        if &lo > horizon {
            let end = lo - 1u32;
            return Layout::from_pieces(pieces, Some(end));
        }
        pieces.push(piece(lo, inner.clone()));
        pieces.push(piece(hi + 1u32, Residues::empty()));
        n += 1;
    }
}

fn merge(a: &SetExpr, b: &SetExpr, op: BoolOp, horizon: &BigUint, limits: &Limits) -> Option<Layout> {
    let la = build(a, horizon, limits)?;
    let lb = build(b, horizon, limits)?;
    let hz = match (&la.horizon, &lb.horizon) {
        (Some(x), Some(y)) => Some(x.min(y).clone()),
        (Some(x), None) | (None, Some(x)) => Some(x.clone()),
        (None, None) => None,
    };
    let mut starts: Vec<&BigUint> = la.pieces.iter().chain(lb.pieces.iter()).map(|p| &p.start).collect();
    starts.sort();
    starts.dedup();
    let mut pieces = Vec::with_capacity(starts.len());
    let (mut i, mut j) = (0, 0);
    for s in starts {
        if hz.as_ref().is_some_and(|h| s > h) {
            break;
        }
        while i + 1 < la.pieces.len() && &la.pieces[i + 1].start <= s {
            i += 1;
        }
        while j + 1 < lb.pieces.len() && &lb.pieces[j + 1].start <= s {
            j += 1;
        }
        let pat = la.pieces[i].pattern.combine(&lb.pieces[j].pattern, op, limits.pattern_bound).ok()?;
        pieces.push(piece(s.clone(), pat));
    }
    Some(Layout::from_pieces(pieces, hz))
}

pub(crate) fn not_layout(e: &SetExpr, n: &BigUint) -> SetError {
    SetError::EnumerationRequired { expr: e.to_string(), n: n.to_string() }
}
