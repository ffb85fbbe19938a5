use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::expr::ResidueClass;
use super::SetError;

/// Number of leading blocks checked by [`BlockFamily::new`].
pub const VERIFY_HORIZON: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FactorialVariant {
    /// `⋃ ⟦(2n−1)!, (2n)!−1⟧`.
    Standard,
    /// `⋃ ⟦(2n−1)!, (2n)!⟧`.
    Full,
}

type IndexFn = dyn Fn(u32) -> (BigRational, BigRational) + Send + Sync;

/// Source of the real endpoints `(aₙ, bₙ)`; block `n` holds the integers in `[aₙ + 1, bₙ]`.
#[derive(Clone)]
pub enum BlockIndexer {
    /// `aₙ = α(2n−1)! + (1−α)(2n)!`, `bₙ = (2n)! + 1`.
    Valpha(BigRational),
    Factorial(FactorialVariant),
    Custom {
        name: String,
        f: Arc<IndexFn>,
    },
}

impl PartialEq for BlockIndexer {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (BlockIndexer::Valpha(a), BlockIndexer::Valpha(b)) => a == b,
            (BlockIndexer::Factorial(a), BlockIndexer::Factorial(b)) => a == b,
            (BlockIndexer::Custom { name: a, .. }, BlockIndexer::Custom { name: b, .. }) => a == b,
            _ => false,
        }
    }
}

impl fmt::Debug for BlockIndexer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockIndexer::Valpha(a) => write!(f, "Valpha({a})"),
            BlockIndexer::Factorial(v) => write!(f, "Factorial({v:?})"),
            BlockIndexer::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

pub(crate) fn factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

impl BlockIndexer {
    pub fn endpoints(&self, n: u32) -> (BigRational, BigRational) {
        let fact = |k: u32| BigRational::from_integer(BigInt::from(factorial(k)));
        match self {
            BlockIndexer::Valpha(alpha) => {
                let one = BigRational::one();
                let a = alpha * fact(2 * n - 1) + (&one - alpha) * fact(2 * n);
                (a, fact(2 * n) + one)
            }
            BlockIndexer::Factorial(v) => {
                let one = BigRational::one();
                let a = fact(2 * n - 1) - &one;
                let b = match v {
                    FactorialVariant::Standard => fact(2 * n) - one,
                    FactorialVariant::Full => fact(2 * n),
                };
                (a, b)
            }
            BlockIndexer::Custom { f, .. } => f(n),
        }
    }

    pub fn name(&self) -> String {
        match self {
            BlockIndexer::Valpha(a) => format!("valpha({a})"),
            BlockIndexer::Factorial(FactorialVariant::Standard) => "fblocks".into(),
            BlockIndexer::Factorial(FactorialVariant::Full) => "fblocks_full".into(),
            BlockIndexer::Custom { name, .. } => name.clone(),
        }
    }
}

/// A union of integer blocks whose endpoint ratio tends to `ell`, optionally
/// intersected with a residue class.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockFamily {
    indexer: BlockIndexer,
    ell: BigRational,
    gap: bool,
    inner: Option<ResidueClass>,
}

impl BlockFamily {
    /// Builds a family after checking the first [`VERIFY_HORIZON`] blocks:
    /// `aₙ + 1 ≤ bₙ < aₙ₊₁`, and the deviation `|aₙ/bₙ − ℓ|` never exceeds its
    /// maximum over the first three blocks and shrinks between `n = 6` and `n = 12`.
    pub fn new(indexer: BlockIndexer, ell: BigRational, gap: bool, inner: Option<ResidueClass>) -> Result<Self, SetError> {
        if ell.is_negative() || ell > BigRational::one() {
            return Err(SetError::InvalidBlocks(format!("ratio limit {ell} outside [0,1]")));
        }
        let one = BigRational::one();
        let mut dev = Vec::new();
        let mut prev_b: Option<BigRational> = None;
        for n in 1..=VERIFY_HORIZON + 1 {
            let (a, b) = indexer.endpoints(n);
            if let Some(pb) = &prev_b {
                if pb >= &a {
                    return Err(SetError::InvalidBlocks(format!("block {} overlaps block {}", n - 1, n)));
                }
            }
            if n > VERIFY_HORIZON {
                break;
            }
            if a.is_negative() || &a + &one > b {
                return Err(SetError::InvalidBlocks(format!("block {n} is empty")));
            }
            dev.push((&a / &b - &ell).abs());
            prev_b = Some(b);
        }
        let head = dev[..3].iter().max().unwrap().clone();
        if dev.iter().any(|d| d > &head) || dev[11] > dev[5] {
            return Err(SetError::InvalidBlocks("endpoint ratio does not approach the declared limit".into()));
        }
        Ok(BlockFamily { indexer, ell, gap, inner })
    }

    pub fn valpha(alpha: BigRational) -> Result<Self, SetError> {
        if !alpha.is_positive() || alpha >= BigRational::one() {
            return Err(SetError::Domain(format!("valpha parameter {alpha} outside ]0,1[")));
        }
        let ell = BigRational::one() - &alpha;
        BlockFamily::new(BlockIndexer::Valpha(alpha), ell, true, None)
    }

    pub fn factorial(v: FactorialVariant) -> Self {
        BlockFamily::new(BlockIndexer::Factorial(v), BigRational::zero(), true, None).expect("factorial blocks satisfy the block invariants")
    }

    pub fn indexer(&self) -> &BlockIndexer {
        &self.indexer
    }

    pub fn ell(&self) -> &BigRational {
        &self.ell
    }

    pub fn gap(&self) -> bool {
        self.gap
    }

    pub fn inner(&self) -> Option<ResidueClass> {
        self.inner
    }

    pub fn with_inner(&self, inner: Option<ResidueClass>) -> Self {
        BlockFamily { inner, ..self.clone() }
    }

    pub fn endpoints(&self, n: u32) -> (BigRational, BigRational) {
        self.indexer.endpoints(n)
    }

    /// Integer range `[⌈aₙ⌉ + 1, ⌊bₙ⌋]` of block `n ≥ 1`, before the inner class is applied.
    pub fn block(&self, n: u32) -> (BigUint, BigUint) {
        let (a, b) = self.endpoints(n);
        let lo = ceil_nonneg(&a) + 1u32;
        let hi = floor_nonneg(&b);
        (lo, hi)
    }

    /// The two checkpoint candidates `⌈aₙ⌉` and `⌊bₙ⌋`.
    pub fn endpoint_checkpoints(&self, n: u32) -> (BigUint, BigUint) {
        let (a, b) = self.endpoints(n);
        (ceil_nonneg(&a), floor_nonneg(&b))
    }

    pub fn contains(&self, x: &BigUint) -> bool {
        if let Some(c) = self.inner {
            if !c.contains(x) {
                return false;
            }
        }
        let mut n = 1;
        loop {
            let (lo, hi) = self.block(n);
            if x < &lo {
                return false;
            }
            if x <= &hi {
                return true;
            }
            n += 1;
        }
    }

    /// Display key of the underlying blocks, ignoring the inner class.
    pub fn base_name(&self) -> String {
        self.indexer.name()
    }
}

pub(crate) fn floor_nonneg(q: &BigRational) -> BigUint {
    q.floor().to_integer().to_biguint().unwrap_or_default()
}

pub(crate) fn ceil_nonneg(q: &BigRational) -> BigUint {
    q.ceil().to_integer().to_biguint().unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn valpha_first_block_is_three() {
        let f = BlockFamily::valpha(q(1, 2)).unwrap();
        assert_eq!(f.block(1), (3u32.into(), 3u32.into()));
        assert!(f.contains(&3u32.into()));
        assert!(!f.contains(&4u32.into()));
    }

    #[test]
    fn catalog_alphas_verify() {
        for (n, d) in [(1, 4), (1, 3), (1, 2), (2, 3), (9, 10), (1, 100)] {
            BlockFamily::valpha(q(n, d)).unwrap();
        }
    }

    #[test]
    fn factorial_blocks() {
        let f = BlockFamily::factorial(FactorialVariant::Standard);
        assert_eq!(f.block(1), (1u32.into(), 1u32.into()));
        assert_eq!(f.block(2), (6u32.into(), 23u32.into()));
        let g = BlockFamily::factorial(FactorialVariant::Full);
        assert_eq!(g.block(2), (6u32.into(), 24u32.into()));
    }

    #[test]
    fn rejects_overlapping_blocks() {
        let f = Arc::new(|n: u32| (q(n as i64, 1), q(n as i64 + 5, 1)));
        let err = BlockFamily::new(BlockIndexer::Custom { name: "bad".into(), f }, q(1, 1), false, None);
        assert!(err.is_err());
    }
}
