use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::setkit::{FactorialVariant, PeriodicSet, SetExpr};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    Standard,
    PeriodicOnly,
    ThetaCatalog,
    /// Hand-picked sets; not reachable by name.
    Custom,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Standard => "standard",
            FamilyKind::PeriodicOnly => "periodic-only",
            FamilyKind::ThetaCatalog => "theta-catalog",
            FamilyKind::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Option<FamilyKind> {
        [FamilyKind::Standard, FamilyKind::PeriodicOnly, FamilyKind::ThetaCatalog].into_iter().find(|k| k.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TestFamily {
    pub kind: FamilyKind,
    pub seed: u64,
    pub sets: Vec<SetExpr>,
}

fn valpha(n: i64, d: i64) -> SetExpr {
    SetExpr::valpha(BigRational::new(n.into(), d.into())).expect("catalog alpha")
}

fn ap(k: u64, h: u64) -> SetExpr {
    SetExpr::ap(k, h).expect("positive modulus")
}

/// A periodic set with modulus `≤ 48`, a nonempty proper residue set and a
/// finite patch below a random threshold.
pub fn random_periodic(rng: &mut ChaCha8Rng) -> SetExpr {
    let m = rng.gen_range(2..=48u64);
    let mut all: Vec<u64> = (0..m).collect();
    all.shuffle(rng);
    let take = rng.gen_range(1..m) as usize;
    let mut residues = all[..take].to_vec();
    residues.sort_unstable();
    let threshold = rng.gen_range(1..=60u64);
    let patch: Vec<u64> = (1..threshold).filter(|_| rng.gen_bool(0.3)).collect();
    SetExpr::Periodic(PeriodicSet::from_parts(m, residues, threshold, patch).expect("positive modulus"))
}

impl TestFamily {
    pub fn new(kind: FamilyKind, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fb = SetExpr::fblocks(FactorialVariant::Standard);
        let sets = match kind {
            FamilyKind::Standard => {
                let mut s = vec![SetExpr::finite(vec![1]), SetExpr::finite(vec![3, 9]), SetExpr::interval(5, 40), ap(2, 0), ap(3, 1)];
                s.extend((0..6).map(|_| random_periodic(&mut rng)));
                s.extend([valpha(1, 4), valpha(1, 3), valpha(1, 2), valpha(2, 3)]);
                s.extend([fb.clone(), SetExpr::fblocks(FactorialVariant::Full)]);
                s.extend([SetExpr::rangeset(vec![1, 3]).unwrap(), SetExpr::rangeset(vec![2, 3, 5]).unwrap()]);
                s.extend([SetExpr::squares(), SetExpr::primes()]);
                s.extend([
                    SetExpr::compl(fb.clone()),
                    SetExpr::union(valpha(1, 2), ap(3, 0)),
                    SetExpr::union(SetExpr::primes(), ap(4, 1)),
                    SetExpr::affine(2, 1, valpha(1, 3)).unwrap(),
                    SetExpr::union(valpha(1, 4), fb),
                    SetExpr::diff(ap(2, 1), SetExpr::squares()),
                    SetExpr::inter(valpha(2, 3), ap(3, 2)),
                    SetExpr::symdiff(SetExpr::rangeset(vec![1, 3]).unwrap(), ap(4, 0)),
                    SetExpr::compl(valpha(1, 3)),
                ]);
                s
            }
            FamilyKind::PeriodicOnly => {
                let mut s = vec![ap(2, 0), ap(3, 1), ap(5, 4)];
                s.extend((0..27).map(|_| random_periodic(&mut rng)));
                s
            }
            FamilyKind::ThetaCatalog => {
                let mut s = vec![SetExpr::Full, SetExpr::finite(vec![1]), SetExpr::finite(vec![3, 9]), ap(2, 0), ap(3, 1)];
                s.extend((0..3).map(|_| random_periodic(&mut rng)));
                s.extend([valpha(1, 4), valpha(1, 3), valpha(1, 2), valpha(2, 3), valpha(9, 10)]);
                s.extend([
                    SetExpr::affine(2, 1, valpha(1, 3)).unwrap(),
                    SetExpr::affine(3, 0, valpha(1, 2)).unwrap(),
                    SetExpr::affine(2, 0, valpha(2, 3)).unwrap(),
                ]);
                s
            }
            FamilyKind::Custom => Vec::new(),
        };
        TestFamily { kind, seed, sets }
    }

    pub fn custom(sets: Vec<SetExpr>) -> Self {
        TestFamily { kind: FamilyKind::Custom, seed: 0, sets }
    }

    pub fn standard(seed: u64) -> Self {
        TestFamily::new(FamilyKind::Standard, seed)
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Members with an eventually periodic description.
    pub fn periodic_members(&self) -> Vec<SetExpr> {
        self.sets.iter().filter(|e| matches!(e, SetExpr::Periodic(_) | SetExpr::Class(_) | SetExpr::Full)).cloned().collect()
    }
}
