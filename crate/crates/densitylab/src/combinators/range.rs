use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::densities::{DensityError, Result};
use crate::setkit::SetExpr;

/// Largest admissible bit position: moduli stay below `2^62`.
pub const MAX_BIT: u32 = 62;

/// Largest number of low bits of `x` enumerated per pair in the disjointness check.
const SCAN_BITS: u32 = 16;

#[derive(Clone, Debug, PartialEq)]
pub enum RangeTarget {
    Bits(Vec<u32>),
    /// Binary digits of a rational in `(0, 1)` up to position `depth`.
    Rational(BigRational, u32),
    /// Binary digits of `1/√2` up to position `depth`.
    InvSqrt2(u32),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RangeResult {
    pub set: SetExpr,
    pub bits: Vec<u32>,
    /// `Σ 2^{−aᵢ}`, the density of `set`.
    pub density: BigRational,
    pub lo: BigRational,
    pub hi: BigRational,
    pub disjoint: bool,
}

/// Positions of the one-bits of `⌊x·2^depth⌋ / 2^depth`, given that integer.
fn one_bits(scaled: &BigUint, depth: u32) -> Vec<u32> {
    (1..=depth).filter(|&i| scaled.bit((depth - i) as u64)).collect()
}

pub fn target_bits(t: &RangeTarget) -> Result<Vec<u32>> {
    Ok(match t {
        RangeTarget::Bits(b) => b.clone(),
        RangeTarget::Rational(q, depth) => {
            if !q.is_positive() || q >= &BigRational::one() {
                return Err(DensityError::Domain(format!("target {q} is outside (0, 1)")));
            }
            let scaled = (q * BigRational::from_integer(BigInt::one() << *depth)).floor().to_integer();
            one_bits(&scaled.to_biguint().unwrap(), *depth)
        }
        RangeTarget::InvSqrt2(depth) => {
            // ⌊2^d/√2⌋ = ⌊√(2^{2d−1})⌋
            let scaled = (BigUint::one() << (2 * *depth as u64).saturating_sub(1)).sqrt();
            one_bits(&scaled, *depth)
        }
    })
}

/// Whether `2^{aᵢ}·x + rᵢ ≡ r_j (mod 2^{aᵢ+t})` has no solution for every
/// pair `i < j`, where `t = min(a_j − aᵢ, 16)` and `x` runs over all residues
/// mod `2^t`. No solution modulo `2^{aᵢ+t}` rules one out modulo `2^{a_j}`.
pub fn classes_disjoint(classes: &[(u128, u128)]) -> bool {
    for (i, &(mi, ri)) in classes.iter().enumerate() {
        for &(mj, rj) in &classes[i + 1..] {
            let t = (mj.trailing_zeros() - mi.trailing_zeros()).min(SCAN_BITS);
            let m = mi << t;
            let target = rj % m;
            if (0..1u128 << t).any(|x| (mi * x + ri) % m == target) {
                return false;
            }
        }
    }
    true
}

/// The set `⋃ (2^{aᵢ}·ℕ + rᵢ)` with `rᵢ = Σ_{j<i} 2^{a_j−1}` and its density
/// bracket `[Σ 2^{−aᵢ}, Σ 2^{−aᵢ} + 2^{1−a_d}]`.
pub fn range_construct(t: &RangeTarget) -> Result<RangeResult> {
    let bits = target_bits(t)?;
    if let Some(&top) = bits.iter().find(|&&a| a > MAX_BIT) {
        return Err(DensityError::BitOverflow { bit: top, limit: MAX_BIT });
    }
    let set = SetExpr::rangeset(bits.clone())?;
    let density: BigRational = bits.iter().map(|&a| BigRational::new(BigInt::one(), BigInt::one() << a)).sum();
    let last = *bits.last().unwrap();
    let hi = &density + BigRational::new(BigInt::one(), BigInt::one() << (last - 1));
    let disjoint = classes_disjoint(&SetExpr::rangeset_classes(&bits));
    Ok(RangeResult { set, bits, lo: density.clone(), hi, density, disjoint })
}

impl RangeResult {
    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn is_empty_bracket(&self) -> bool {
        (&self.hi - &self.lo).is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inv_sqrt2_bits() {
        let bits = target_bits(&RangeTarget::InvSqrt2(40)).unwrap();
        assert_eq!(bits, vec![1, 3, 4, 6, 8, 14, 17, 18, 19, 20, 23, 24, 27, 28, 31, 32, 33, 34, 35, 36, 37, 40]);
    }

    #[test]
    fn rational_target_five_eighths() {
        let r = range_construct(&RangeTarget::Rational(BigRational::new(5.into(), 8.into()), 10)).unwrap();
        assert_eq!(r.bits, vec![1, 3]);
        assert_eq!(r.density, BigRational::new(5.into(), 8.into()));
        assert!(r.disjoint);
    }

    #[test]
    fn overlapping_classes_detected() {
        // 2ℕ and 4ℕ + 2 meet
        assert!(!classes_disjoint(&[(2, 0), (4, 2)]));
        assert!(classes_disjoint(&[(2, 0), (4, 1)]));
    }

    #[test]
    fn overflow() {
        assert!(matches!(range_construct(&RangeTarget::Bits(vec![1, 63])), Err(DensityError::BitOverflow { .. })));
    }
}
