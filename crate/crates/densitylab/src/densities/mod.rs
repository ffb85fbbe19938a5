//! Density functionals: exact values on structured sets, certified brackets
//! from checkpoint schedules elsewhere.

mod alpha;
mod analytic;
mod asymptotic;
mod banach;
mod buck;
mod functional;
pub mod numeric;
mod polya;
mod value;

use num_rational::BigRational;

use crate::setkit::SetError;

pub use alpha::alpha_density;
pub use analytic::{analytic, zeta};
pub use asymptotic::{asymptotic, asymptotic_numeric, enumeration_asymptotic};
pub use banach::banach;
pub use buck::{buck_chain, buck_upper, modular_bounds, BuckStep, ChainKind, ModularBounds, Oracle};
pub use functional::{builtin, builtin_names, dual, Functional, Provenance};
pub use polya::polya;
pub use value::{Certification, DensityValue};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Upper,
    Lower,
}

impl Mode {
    pub fn flip(self) -> Mode {
        match self {
            Mode::Upper => Mode::Lower,
            Mode::Lower => Mode::Upper,
        }
    }

    pub fn is_upper(self) -> bool {
        self == Mode::Upper
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Upper => "upper",
            Mode::Lower => "lower",
        }
    }
}

/// Discretization of the limits behind every numeric estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub depth: u32,
    /// Leading checkpoints ignored when extremizing.
    pub burn_in: usize,
    /// Increasing toward 1 from below.
    pub polya_s: Vec<BigRational>,
    /// Decreasing toward 1 from above.
    pub analytic_s: Vec<BigRational>,
    pub window_count: usize,
    pub tolerance: f64,
    pub chain: ChainKind,
    /// Unknown residues are an error instead of counting as inhabited.
    pub strict: bool,
}

fn ratios(v: &[(i64, i64)]) -> Vec<BigRational> {
    v.iter().map(|&(n, d)| BigRational::new(n.into(), d.into())).collect()
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule {
            depth: 9,
            burn_in: 2,
            polya_s: ratios(&[(9, 10), (19, 20), (49, 50), (99, 100)]),
            analytic_s: ratios(&[(11, 10), (21, 20), (51, 50), (101, 100)]),
            window_count: 32,
            tolerance: 0.02,
            chain: ChainKind::Auto,
            strict: false,
        }
    }
}

impl Schedule {
    pub fn with_depth(depth: u32) -> Self {
        Schedule { depth, ..Schedule::default() }
    }

    /// Checks the monotonicity requirements on the parameter lists.
    pub fn validate(&self) -> Result<(), DensityError> {
        let one = BigRational::from_integer(1.into());
        let up = self.polya_s.windows(2).all(|w| w[0] < w[1]) && self.polya_s.iter().all(|s| s < &one && s > &BigRational::default());
        let down = self.analytic_s.windows(2).all(|w| w[0] > w[1]) && self.analytic_s.iter().all(|s| s > &one);
        if self.depth == 0 || !up || !down || self.polya_s.is_empty() || self.analytic_s.is_empty() {
            return Err(DensityError::Domain("schedule parameters are not monotone toward 1".into()));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 || self.window_count == 0 {
            return Err(DensityError::Domain("tolerance and window count must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum DensityError {
    #[error(transparent)]
    Set(#[from] SetError),
    #[error("undecidable residue {h} mod {k} for {expr}")]
    UndecidableResidue { expr: String, k: u64, h: u64 },
    #[error("tail bound unreachable for {expr} at s = {s}")]
    TailBoundUnreachable { expr: String, s: String },
    #[error("index not exact for {0}")]
    IotaNotExact(String),
    #[error("weights must be nonnegative and sum to 1, got {0}")]
    WeightSumMismatch(String),
    #[error("combinator inputs must share a mode")]
    MixedModes,
    #[error("bit position {bit} puts the modulus above 2^{limit}")]
    BitOverflow { bit: u32, limit: u32 },
    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T, E = DensityError> = std::result::Result<T, E>;
