//! Per-residue decisions: does `S ∩ (k·H + h)` have elements, infinitely many,
//! or positive upper asymptotic density.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::count::Counter;
use super::expr::{NamedSet, SetExpr};
use super::normalize::{normalize_periodic, Normalized};
use super::shape::{shape_of, Shape};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tri {
    Yes,
    No,
    Unknown,
}

impl Tri {
    fn from_bool(b: bool) -> Tri {
        if b {
            Tri::Yes
        } else {
            Tri::No
        }
    }

    fn or(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::Yes, _) | (_, Tri::Yes) => Tri::Yes,
            (Tri::No, Tri::No) => Tri::No,
            _ => Tri::Unknown,
        }
    }

    pub fn is_yes(self) -> bool {
        self == Tri::Yes
    }

    pub fn is_known(self) -> bool {
        self != Tri::Unknown
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResidueCell {
    pub nonempty: Tri,
    pub infinite: Tri,
    pub positive: Tri,
}

impl ResidueCell {
    const UNKNOWN: ResidueCell = ResidueCell { nonempty: Tri::Unknown, infinite: Tri::Unknown, positive: Tri::Unknown };
    const NONE: ResidueCell = ResidueCell { nonempty: Tri::No, infinite: Tri::No, positive: Tri::No };
    const ALL: ResidueCell = ResidueCell { nonempty: Tri::Yes, infinite: Tri::Yes, positive: Tri::Yes };

    fn or(self, o: ResidueCell) -> ResidueCell {
        ResidueCell { nonempty: self.nonempty.or(o.nonempty), infinite: self.infinite.or(o.infinite), positive: self.positive.or(o.positive) }
    }

    /// Propagates `positive ⇒ infinite ⇒ nonempty` and its contrapositive.
    fn close(mut self) -> ResidueCell {
        if self.positive == Tri::Yes {
            self.infinite = Tri::Yes;
        }
        if self.infinite == Tri::Yes {
            self.nonempty = Tri::Yes;
        }
        if self.nonempty == Tri::No {
            self.infinite = Tri::No;
        }
        if self.infinite == Tri::No {
            self.positive = Tri::No;
        }
        self
    }
}

/// Decision for a single class, with a witness element when one was found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueStatus {
    pub nonempty: Tri,
    pub infinite: Tri,
    pub positive: Tri,
    pub witness: Option<BigUint>,
}

/// Largest value scanned when a nonemptiness question has no structural answer.
const SCAN_LIMIT: u64 = 1 << 20;

fn structural(e: &SetExpr, k: u64, counter: &Counter) -> Vec<ResidueCell> {
    let limits = counter.limits();
    if let Ok(Normalized::Periodic(p)) = normalize_periodic(e, limits) {
        let mut patch = vec![false; k as usize];
        for x in p.patch() {
            patch[(x % k) as usize] = true;
        }
        return p
            .pattern()
            .class_hits(k)
            .into_iter()
            .zip(patch)
            .map(|(inf, pt)| ResidueCell { nonempty: Tri::from_bool(inf || pt), infinite: Tri::from_bool(inf), positive: Tri::from_bool(inf) })
            .collect();
    }
    let mut cells = match e {
        SetExpr::Named(NamedSet::Squares) => {
            let mut hit = vec![false; k as usize];
            // j² mod k by successive odd increments
            let mut sq = 0u64;
            for j in 0..k {
                hit[sq as usize] = true;
                sq += 2 * j + 1;
                while sq >= k {
                    sq -= k;
                }
            }
            hit.iter().map(|&b| ResidueCell { nonempty: Tri::from_bool(b), infinite: Tri::from_bool(b), positive: Tri::No }).collect()
        }
        SetExpr::Named(NamedSet::Primes) => (0..k)
            .map(|h| {
                let g = h.gcd(&k);
                if g == 1 {
                    ResidueCell { nonempty: Tri::Yes, infinite: Tri::Yes, positive: Tri::No }
                } else {
                    // the only candidate is g itself
                    let lone = super::primes::is_prime(g) && g % k == h;
                    ResidueCell { nonempty: Tri::from_bool(lone), infinite: Tri::No, positive: Tri::No }
                }
            })
            .collect(),
        SetExpr::Named(NamedSet::Rangeset(bits)) => (0..k)
            .map(|h| {
                // (m, r) meets (k, h) iff gcd(m, k) divides h − r
                let meets = SetExpr::rangeset_classes(bits).into_iter().any(|(m, r)| {
                    let g = (m % k as u128).gcd(&(k as u128));
                    (h as u128 % g + g - r % g).is_multiple_of(g)
                });
                if meets {
                    ResidueCell::ALL
                } else {
                    ResidueCell::NONE
                }
            })
            .collect(),
        SetExpr::Union(a, b) => {
            let (x, y) = (structural(a, k, counter), structural(b, k, counter));
            x.into_iter().zip(y).map(|(p, q)| p.or(q)).collect()
        }
        SetExpr::Inter(a, b) => {
            let (x, y) = (structural(a, k, counter), structural(b, k, counter));
            x.into_iter().zip(y).map(|(p, q)| if p.nonempty == Tri::No || q.nonempty == Tri::No { ResidueCell::NONE } else { ResidueCell::UNKNOWN }).collect()
        }
        SetExpr::Diff(a, _) => {
            structural(a, k, counter).into_iter().map(|c| if c.nonempty == Tri::No { ResidueCell::NONE } else { ResidueCell::UNKNOWN }).collect()
        }
        SetExpr::Compl(a) => {
            structural(a, k, counter).into_iter().map(|c| if c.positive == Tri::No { ResidueCell::ALL } else { ResidueCell::UNKNOWN }).collect()
        }
        SetExpr::Affine(m, s, a) => {
            let inner = structural(a, k, counter);
            let mut out = vec![ResidueCell::NONE; k as usize];
            for (c, cell) in inner.into_iter().enumerate() {
                let h = ((*m as u128 * c as u128 + *s as u128) % k as u128) as usize;
                out[h] = out[h].or(cell);
            }
            out
        }
        _ => vec![ResidueCell::UNKNOWN; k as usize],
    };
    let meets = |s: &Shape| {
        let mut hits = vec![false; k as usize];
        for p in s.patterns() {
            hits.iter_mut().zip(p.class_hits(k)).for_each(|(a, b)| *a |= b);
        }
        hits
    };
    if let Some(s) = shape_of(e, true, limits) {
        for (c, hit) in cells.iter_mut().zip(meets(&s)) {
            c.positive = Tri::from_bool(hit);
        }
    }
    if let Some(s @ Shape::Blocks(_)) = shape_of(e, false, limits) {
        for (c, hit) in cells.iter_mut().zip(meets(&s)) {
            if hit {
                c.nonempty = Tri::Yes;
                c.infinite = Tri::Yes;
            } else {
                c.infinite = Tri::No;
            }
        }
    }
    cells.into_iter().map(ResidueCell::close).collect()
}

/// Cells for every residue `h < k`; open nonemptiness questions are settled by
/// a bounded scan where possible.
pub fn residue_profile(e: &SetExpr, k: u64, counter: &Counter) -> Vec<ResidueCell> {
    assert!(k >= 1, "modulus must be positive");
    let mut cells = structural(e, k, counter);
    if cells.iter().any(|c| c.nonempty == Tri::Unknown) {
        let lim = SCAN_LIMIT.min(counter.limits().enumeration_cutoff);
        if let Ok(bm) = counter.bitmap(e, &BigUint::from(lim)) {
            let mut x = 1;
            while let Some(y) = bm.next_from(x).filter(|&y| y <= lim) {
                let c = &mut cells[(y % k) as usize];
                if c.nonempty == Tri::Unknown {
                    *c = ResidueCell { nonempty: Tri::Yes, ..*c }.close();
                }
                x = y + 1;
            }
        }
    }
    cells
}

/// Status of `S ∩ (k·H + h)` with a witness element when nonempty.
pub fn residue_status(e: &SetExpr, k: u64, h: u64, counter: &Counter) -> ResidueStatus {
    let h = h % k;
    let cell = residue_profile(e, k, counter)[h as usize];
    let witness = if cell.nonempty == Tri::Yes {
        let from = e.as_block_family().map_or(BigUint::from(1u32), |f| {
            // first block long enough to contain every class
            (1..).map(|n| f.block(n)).find(|(lo, hi)| hi >= lo && (hi - lo).to_u64().is_none_or(|len| len >= k)).map(|(lo, _)| lo).unwrap()
        });
        let limit = BigUint::from(10u32).pow(40);
        counter.first_element(e, &from, Some((k, h)), &limit).ok().flatten()
    } else {
        None
    };
    ResidueStatus { nonempty: cell.nonempty, infinite: cell.infinite, positive: cell.positive, witness }
}

/// Number of cells where `pick` says yes, and whether every cell was decided.
pub fn count_cells(cells: &[ResidueCell], pick: impl Fn(&ResidueCell) -> Tri) -> (u64, bool) {
    let yes = cells.iter().filter(|c| pick(c) == Tri::Yes).count() as u64;
    let decided = cells.iter().all(|c| pick(c).is_known());
    (yes, decided)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setkit::FactorialVariant;

    #[test]
    fn squares_mod_four() {
        let c = Counter::default();
        let s = residue_status(&SetExpr::squares(), 4, 2, &c);
        assert_eq!((s.nonempty, s.positive, s.witness), (Tri::No, Tri::No, None));
    }

    #[test]
    fn valpha_has_long_witness() {
        let c = Counter::default();
        let e = SetExpr::valpha_ratio(1, 2).unwrap();
        let s = residue_status(&e, 5, 3, &c);
        assert_eq!((s.nonempty, s.positive), (Tri::Yes, Tri::Yes));
        let w = s.witness.unwrap();
        assert_eq!(&w % 5u32, BigUint::from(3u32));
        assert!(w >= BigUint::from(16u32));
    }

    #[test]
    fn primes_mod_six() {
        let c = Counter::default();
        let s = residue_status(&SetExpr::primes(), 6, 3, &c);
        assert_eq!((s.nonempty, s.infinite, s.positive), (Tri::Yes, Tri::No, Tri::No));
        assert_eq!(s.witness, Some(3u32.into()));
    }

    #[test]
    fn factorial_blocks_fill_every_class() {
        let c = Counter::default();
        let cells = residue_profile(&SetExpr::fblocks(FactorialVariant::Standard), 12, &c);
        assert!(cells.iter().all(|x| x.positive == Tri::Yes));
    }

    #[test]
    fn rangeset_classes_mod_eight() {
        let c = Counter::default();
        let e = SetExpr::rangeset(vec![1, 3]).unwrap();
        let cells = residue_profile(&e, 8, &c);
        let yes: Vec<u64> = (0..8).filter(|&h| cells[h as usize].positive == Tri::Yes).collect();
        assert_eq!(yes, vec![0, 1, 2, 4, 6]);
    }
}
