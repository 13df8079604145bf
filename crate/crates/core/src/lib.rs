//! Numerical laboratory for Banach convex bodies, Crofton measures, zonoid
//! symmetrization and mixed volumes of Finsler sets, with Monte-Carlo
//! verification of the smooth BKK identities.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the aliases
//! at the crate root fix the scalar for the common case.

pub mod banach;
pub mod crofton;
pub mod error;
pub mod fspace;
pub mod geometry;
pub mod linalg;
pub mod mixedvol;
mod montecarlo;
pub mod scalar;
pub mod solver;
pub mod sphere;

pub use error::{Error, Result};
pub use scalar::Real;

pub type NormSpecF64 = banach::NormSpec<f64>;
pub type NormSpecF32 = banach::NormSpec<f32>;
pub type SymmetrizedNormF64 = banach::SymmetrizedNorm<f64>;
pub type SymmetrizedNormF32 = banach::SymmetrizedNorm<f32>;
pub type GrassmannDensityF64 = crofton::GrassmannDensity<f64>;
pub type GrassmannDensityF32 = crofton::GrassmannDensity<f32>;
pub type FunctionSpaceF64 = fspace::FunctionSpaceOnX<f64>;
pub type FunctionSpaceF32 = fspace::FunctionSpaceOnX<f32>;
pub type SphereGridF64 = sphere::SphereGrid<f64>;
