//! Symbolic subsets of the positive integers.
//!
//! A [`SetExpr`] is an expression tree over residue classes, intervals, finite
//! sets, block families and a few named catalog sets. Membership is always
//! decidable; prefix counts are computed in closed form wherever the tree
//! admits it and by bitmap enumeration below [`Limits::enumeration_cutoff`]
//! otherwise.

pub mod bitmap;
mod blocks;
mod checkpoints;
mod count;
mod expr;
mod layout;
mod normalize;
pub mod primes;
mod residues;
mod shape;
mod status;

pub use blocks::{BlockFamily, BlockIndexer, FactorialVariant};
pub use checkpoints::checkpoints;
pub use count::{count_prefix, count_window, first_element, member, Counter};
pub use expr::{GroundSet, NamedSet, PeriodicSet, ResidueClass, SetExpr};
pub use layout::{Layout, Piece};
pub use normalize::{normalize_periodic, Normalized};
pub use residues::{BoolOp, Residues};
pub use shape::{is_meager, shape_of, simplify, BlockShape, Shape};
pub use status::{count_cells, residue_profile, residue_status, ResidueCell, ResidueStatus, Tri};

/// Resource bounds shared by every counting routine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest `n` for which counts may fall back to element enumeration.
    pub enumeration_cutoff: u64,
    /// Largest modulus a residue pattern may be lifted to.
    pub modulus_bound: u64,
    /// Largest modulus for which a rangeset is expanded into an explicit residue list.
    pub pattern_bound: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { enumeration_cutoff: 10_000_000, modulus_bound: 1_000_000_000, pattern_bound: 1 << 20 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SetError {
    #[error("enumeration required: no closed-form count for {expr} at n = {n}")]
    EnumerationRequired { expr: String, n: String },
    #[error("modulus overflow: {modulus} exceeds bound {bound}")]
    ModulusOverflow { modulus: String, bound: u64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid block family: {0}")]
    InvalidBlocks(String),
}
