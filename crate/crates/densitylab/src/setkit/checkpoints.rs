use num_bigint::BigUint;
use num_traits::Zero;

use super::expr::{NamedSet, SetExpr};

fn geometric(depth: u32) -> Vec<BigUint> {
    (1..=depth).map(|i| BigUint::from(10u32).pow(i)).collect()
}

fn collect(e: &SetExpr, depth: u32, out: &mut Vec<BigUint>) {
    if let Some(f) = e.as_block_family() {
        for n in 1..=depth {
            let (a, b) = f.endpoint_checkpoints(n);
            out.extend([a, b].into_iter().filter(|x| !x.is_zero()));
        }
        return;
    }
    match e {
        SetExpr::Named(NamedSet::Rangeset(bits)) => {
            out.extend(geometric(depth));
            for &a in bits {
                for c in [1u32, 2, 4] {
                    out.push(BigUint::from(c) << a);
                }
            }
        }
        SetExpr::Union(a, b) | SetExpr::Inter(a, b) | SetExpr::Diff(a, b) | SetExpr::SymDiff(a, b) => {
            collect(a, depth, out);
            collect(b, depth, out);
        }
        SetExpr::Compl(a) => collect(a, depth, out),
        SetExpr::Affine(k, h, a) => {
            let mut inner = Vec::new();
            collect(a, depth, &mut inner);
            out.extend(inner.iter().map(|x| x * *k + *h));
            out.extend(inner);
        }
        _ => out.extend(geometric(depth)),
    }
}

/// Strictly increasing evaluation points: block endpoints `⌈aₙ⌉`, `⌊bₙ⌋` for
/// `n ≤ depth`, powers of ten for periodic parts, merged across operands.
pub fn checkpoints(e: &SetExpr, depth: u32) -> Vec<BigUint> {
    let depth = depth.max(1);
    let mut out = Vec::new();
    collect(e, depth, &mut out);
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setkit::FactorialVariant;

    fn nums(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| x.into()).collect()
    }

    #[test]
    fn factorial_depth_three() {
        assert_eq!(checkpoints(&SetExpr::fblocks(FactorialVariant::Standard), 3), nums(&[1, 5, 23, 119, 719]));
    }

    #[test]
    fn periodic_is_geometric() {
        assert_eq!(checkpoints(&SetExpr::ap(7, 2).unwrap(), 3), nums(&[10, 100, 1000]));
    }

    #[test]
    fn rangeset_period_boundaries() {
        let c = checkpoints(&SetExpr::rangeset(vec![1, 3]).unwrap(), 2);
        for x in [8u64, 16, 32, 10, 100] {
            assert!(c.contains(&x.into()));
        }
    }
}
