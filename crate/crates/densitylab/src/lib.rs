//! Upper and lower densities of symbolic sets of positive integers.

pub mod audit;
pub mod combinators;
pub mod densities;
pub mod scalar;
pub mod setkit;

pub use scalar::Scalar;

pub type DensityValueF64 = densities::DensityValue<f64>;
pub type DensityValueF32 = densities::DensityValue<f32>;
pub type FunctionalF64 = densities::Functional<f64>;
pub type FunctionalF32 = densities::Functional<f32>;
