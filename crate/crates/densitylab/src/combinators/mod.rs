//! New functionals from old ones, the index `ι`, the quasi-density `θ*`,
//! and the binary range construction.

mod iota;
mod mix;
mod range;
mod theta;

pub use iota::{iota_index, valpha_index, Index, IotaResult, IotaWitness, WITNESS_CAP};
pub use mix::{inf_combine_dual, q_convex_combine, sup_combine};
pub use range::{classes_disjoint, range_construct, target_bits, RangeResult, RangeTarget, MAX_BIT};
pub use theta::{theta_f2_witness, theta_star, KParam, ThetaCase, ThetaWeights};
