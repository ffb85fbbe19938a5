use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::blocks::{BlockFamily, BlockIndexer, FactorialVariant};
use super::residues::Residues;
use super::SetError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum GroundSet {
    #[default]
    Positive,
    Nonnegative,
}

impl GroundSet {
    pub fn admits(self, x: &BigUint) -> bool {
        self == GroundSet::Nonnegative || !x.is_zero()
    }
}

/// The residue class `h mod k` with `0 ≤ h < k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ResidueClass {
    k: u64,
    h: u64,
}

impl ResidueClass {
    pub fn new(k: u64, h: u64) -> Result<Self, SetError> {
        if k == 0 {
            return Err(SetError::Domain("modulus must be at least 1".into()));
        }
        Ok(ResidueClass { k, h: h % k })
    }

    pub fn modulus(&self) -> u64 {
        self.k
    }

    pub fn offset(&self) -> u64 {
        self.h
    }

    pub fn contains(&self, x: &BigUint) -> bool {
        (x % self.k).to_u64() == Some(self.h)
    }

    pub fn pattern(&self) -> Residues {
        Residues::class(self.k, self.h)
    }
}

/// An eventually periodic set: below `threshold` it equals `patch`, from
/// `threshold` on it follows the residue pattern.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PeriodicSet {
    pattern: Residues,
    threshold: u64,
    patch: Vec<u64>,
}

impl PeriodicSet {
    /// Canonicalizes: minimal modulus, and the threshold lowered while the
    /// element just below it already follows the pattern.
    pub fn new(pattern: Residues, threshold: u64, patch: Vec<u64>) -> Self {
        let threshold = threshold.max(1);
        let mut patch: Vec<u64> = patch.into_iter().filter(|&x| x >= 1 && x < threshold).collect();
        patch.sort_unstable();
        patch.dedup();
        let mut t = threshold;
        while t > 1 {
            let x = t - 1;
            let in_patch = patch.last() == Some(&x);
            if in_patch != pattern.contains_residue(x) {
                break;
            }
            if in_patch {
                patch.pop();
            }
            t -= 1;
        }
        PeriodicSet { pattern, threshold: t, patch }
    }

    pub fn from_parts(modulus: u64, residues: Vec<u64>, threshold: u64, patch: Vec<u64>) -> Result<Self, SetError> {
        if modulus == 0 {
            return Err(SetError::Domain("modulus must be at least 1".into()));
        }
        Ok(PeriodicSet::new(Residues::new(modulus, residues), threshold, patch))
    }

    pub fn pattern(&self) -> &Residues {
        &self.pattern
    }

    pub fn modulus(&self) -> u64 {
        self.pattern.modulus()
    }

    pub fn residues(&self) -> &[u64] {
        self.pattern.residues()
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn patch(&self) -> &[u64] {
        &self.patch
    }

    pub fn density(&self) -> BigRational {
        self.pattern.density()
    }

    pub fn contains(&self, x: &BigUint) -> bool {
        match x.to_u64() {
            Some(v) if v < self.threshold => self.patch.binary_search(&v).is_ok(),
            _ => self.pattern.contains(x),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NamedSet {
    Squares,
    Primes,
    /// `V_α`, with `α` rational in `]0,1[`.
    Valpha(BigRational),
    /// `⋃ᵢ (2^{aᵢ} mod-class rᵢ)`, `rᵢ = Σ_{j<i} 2^{aⱼ−1}`, `aᵢ` strictly increasing.
    Rangeset(Vec<u32>),
    Factorial(FactorialVariant),
}

/// Symbolic subset of the ground set.
#[derive(Clone, Debug, PartialEq)]
pub enum SetExpr {
    Empty,
    Full,
    Class(ResidueClass),
    /// Integers `x` with `a ≤ x ≤ b`.
    Interval(u64, u64),
    Periodic(PeriodicSet),
    Blocks(BlockFamily),
    /// Sorted, deduplicated elements.
    Finite(Vec<u64>),
    Named(NamedSet),
    Union(Arc<SetExpr>, Arc<SetExpr>),
    Inter(Arc<SetExpr>, Arc<SetExpr>),
    Diff(Arc<SetExpr>, Arc<SetExpr>),
    SymDiff(Arc<SetExpr>, Arc<SetExpr>),
    Compl(Arc<SetExpr>),
    /// `k·e + h`, `k ≥ 1`.
    Affine(u64, u64, Arc<SetExpr>),
}

impl SetExpr {
    pub fn ap(k: u64, h: u64) -> Result<SetExpr, SetError> {
        Ok(SetExpr::Class(ResidueClass::new(k, h)?))
    }

    pub fn interval(a: u64, b: u64) -> SetExpr {
        SetExpr::Interval(a, b)
    }

    pub fn finite<I: IntoIterator<Item = u64>>(xs: I) -> SetExpr {
        let mut v: Vec<u64> = xs.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        SetExpr::Finite(v)
    }

    pub fn squares() -> SetExpr {
        SetExpr::Named(NamedSet::Squares)
    }

    pub fn primes() -> SetExpr {
        SetExpr::Named(NamedSet::Primes)
    }

    pub fn valpha(alpha: BigRational) -> Result<SetExpr, SetError> {
        BlockFamily::valpha(alpha.clone())?;
        Ok(SetExpr::Named(NamedSet::Valpha(alpha)))
    }

    pub fn valpha_ratio(num: i64, den: i64) -> Result<SetExpr, SetError> {
        if den == 0 {
            return Err(SetError::Domain("zero denominator".into()));
        }
        SetExpr::valpha(BigRational::new(num.into(), den.into()))
    }

    pub fn rangeset(bits: Vec<u32>) -> Result<SetExpr, SetError> {
        if bits.is_empty() {
            return Err(SetError::Domain("rangeset needs at least one bit position".into()));
        }
        if bits[0] == 0 || bits.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SetError::Domain("rangeset bit positions must be positive and strictly increasing".into()));
        }
        if *bits.last().unwrap() > 120 {
            return Err(SetError::ModulusOverflow { modulus: format!("2^{}", bits.last().unwrap()), bound: 1 << 63 });
        }
        Ok(SetExpr::Named(NamedSet::Rangeset(bits)))
    }

    pub fn fblocks(v: FactorialVariant) -> SetExpr {
        SetExpr::Named(NamedSet::Factorial(v))
    }

    pub fn union(a: SetExpr, b: SetExpr) -> SetExpr {
        SetExpr::Union(Arc::new(a), Arc::new(b))
    }

    pub fn inter(a: SetExpr, b: SetExpr) -> SetExpr {
        SetExpr::Inter(Arc::new(a), Arc::new(b))
    }

    pub fn diff(a: SetExpr, b: SetExpr) -> SetExpr {
        SetExpr::Diff(Arc::new(a), Arc::new(b))
    }

    pub fn symdiff(a: SetExpr, b: SetExpr) -> SetExpr {
        SetExpr::SymDiff(Arc::new(a), Arc::new(b))
    }

    pub fn compl(a: SetExpr) -> SetExpr {
        SetExpr::Compl(Arc::new(a))
    }

    pub fn affine(k: u64, h: u64, a: SetExpr) -> Result<SetExpr, SetError> {
        if k == 0 {
            return Err(SetError::Domain("affine factor must be at least 1".into()));
        }
        Ok(SetExpr::Affine(k, h, Arc::new(a)))
    }

    /// Block family behind a block-valued leaf, if any.
    pub fn as_block_family(&self) -> Option<BlockFamily> {
        match self {
            SetExpr::Blocks(f) => Some(f.clone()),
            SetExpr::Named(NamedSet::Valpha(a)) => BlockFamily::valpha(a.clone()).ok(),
            SetExpr::Named(NamedSet::Factorial(v)) => Some(BlockFamily::factorial(*v)),
            _ => None,
        }
    }

    /// Residue classes `(2^{aᵢ}, rᵢ)` of a rangeset leaf.
    pub fn rangeset_classes(bits: &[u32]) -> Vec<(u128, u128)> {
        let mut r: u128 = 0;
        bits.iter()
            .map(|&a| {
                let cls = (1u128 << a, r);
                r += 1u128 << (a - 1);
                cls
            })
            .collect()
    }

    /// Whether any subexpression satisfies `pred`.
    pub fn mentions(&self, pred: &dyn Fn(&SetExpr) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        match self {
            SetExpr::Union(a, b) | SetExpr::Inter(a, b) | SetExpr::Diff(a, b) | SetExpr::SymDiff(a, b) => a.mentions(pred) || b.mentions(pred),
            SetExpr::Compl(a) | SetExpr::Affine(_, _, a) => a.mentions(pred),
            _ => false,
        }
    }

    pub fn key(&self) -> String {
        self.to_string()
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, xs: &[u64]) -> fmt::Result {
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

/// Prints in the command-line grammar; `periodic(...)` and custom block
/// families use extensions of it.
impl fmt::Display for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetExpr::Empty => write!(f, "empty"),
            SetExpr::Full => write!(f, "full"),
            SetExpr::Class(c) => write!(f, "ap({},{})", c.modulus(), c.offset()),
            SetExpr::Interval(a, b) => write!(f, "interval({a},{b})"),
            SetExpr::Periodic(p) => {
                write!(f, "periodic({},{{", p.modulus())?;
                write_list(f, p.residues())?;
                write!(f, "}},{},{{", p.threshold())?;
                write_list(f, p.patch())?;
                write!(f, "}})")
            }
            SetExpr::Blocks(b) => match (b.indexer(), b.inner()) {
                (BlockIndexer::Custom { name, .. }, None) => write!(f, "blocks({name})"),
                (_, None) => write!(f, "{}", b.base_name()),
                (_, Some(c)) => write!(f, "inter({},ap({},{}))", b.base_name(), c.modulus(), c.offset()),
            },
            SetExpr::Finite(xs) => {
                write!(f, "finite{{")?;
                write_list(f, xs)?;
                write!(f, "}}")
            }
            SetExpr::Named(n) => match n {
                NamedSet::Squares => write!(f, "squares"),
                NamedSet::Primes => write!(f, "primes"),
                NamedSet::Valpha(a) => write!(f, "valpha({a})"),
                NamedSet::Rangeset(bits) => {
                    write!(f, "rangeset(")?;
                    for (i, b) in bits.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{b}")?;
                    }
                    write!(f, ")")
                }
                NamedSet::Factorial(FactorialVariant::Standard) => write!(f, "fblocks"),
                NamedSet::Factorial(FactorialVariant::Full) => write!(f, "fblocks_full"),
            },
            SetExpr::Union(a, b) => write!(f, "union({a},{b})"),
            SetExpr::Inter(a, b) => write!(f, "inter({a},{b})"),
            SetExpr::Diff(a, b) => write!(f, "diff({a},{b})"),
            SetExpr::SymDiff(a, b) => write!(f, "symdiff({a},{b})"),
            SetExpr::Compl(a) => write!(f, "compl({a})"),
            SetExpr::Affine(k, h, a) => write!(f, "affine({k},{h},{a})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_offset() {
        let c = ResidueClass::new(4, 9).unwrap();
        assert_eq!((c.modulus(), c.offset()), (4, 1));
        assert!(ResidueClass::new(0, 1).is_err());
    }

    #[test]
    fn periodic_threshold_is_minimal() {
        // odds from 1 on, written with a redundant patch
        let p = PeriodicSet::from_parts(2, vec![1], 6, vec![1, 3, 5]).unwrap();
        assert_eq!(p.threshold(), 1);
        assert!(p.patch().is_empty());
        let q = PeriodicSet::from_parts(6, vec![1], 7, vec![]).unwrap();
        assert_eq!(q.threshold(), 2);
    }

    #[test]
    fn display_roundtrip_text() {
        let e = SetExpr::union(SetExpr::ap(4, 1).unwrap(), SetExpr::ap(6, 3).unwrap());
        assert_eq!(e.to_string(), "union(ap(4,1),ap(6,3))");
        assert_eq!(SetExpr::valpha_ratio(1, 3).unwrap().to_string(), "valpha(1/3)");
    }

    #[test]
    fn rangeset_offsets() {
        assert_eq!(SetExpr::rangeset_classes(&[1, 3]), vec![(2, 0), (8, 1)]);
    }
}
